#!/usr/bin/env python3
"""Kolmogorov-Sinai rate match in the driven double well.

Classical side: the positive Lyapunov exponent from two independent
Benettin runs (different tangent seeds and start points).  Quantum side:
the von Neumann entropy production rate of the decohered packet, fitted
after the decoherence transient.  The central claim under test is that the
open-system entropy rate is set by the flow's KS rate, not by the coupling.

The quantum run holds an n x n density matrix; at the default n = 1024 it
takes on the order of fifteen minutes."""

import argparse
import math

from decolab.bath import BathParams
from decolab.classical import ks_entropy_rate, lyapunov_spectrum
from decolab.config import UnitsConfig
from decolab.diagnostics import entropy_production_rate
from decolab.grids import Gaussian, SpatialGrid, build_density_matrix
from decolab.potentials import DrivenDoubleWell, HamiltonianSpec
from decolab.quantum import EvolverConfig, evolve

SEED_POINTS = ((1.0, 0.0), (-0.5, 0.3))


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1024)
    parser.add_argument("--hbar", type=float, default=0.01)
    parser.add_argument("--gamma", type=float, default=0.0025)
    parser.add_argument("--temperature", type=float, default=2.0)
    parser.add_argument("--dt", type=float, default=0.02)
    parser.add_argument("--t-end", type=float, default=30.0)
    parser.add_argument("--window", type=float, nargs=2, default=[8.0, 28.0])
    parser.add_argument("--t-avg", type=float, default=2000.0, help="Benettin averaging time")
    return parser.parse_args()


def main():
    args = parse_args()
    pot = DrivenDoubleWell(m=1.0, a=0.25, b=0.5, drive_amp=0.2, drive_freq=1.4)

    rates = []
    for x0 in SEED_POINTS:
        spec = lyapunov_spectrum(pot, x0, t_avg=args.t_avg)
        rates.append(ks_entropy_rate(spec))
        print(f"benettin from {x0}: lam+ = {spec.exponents[0]:.6f}, "
              f"ks rate = {rates[-1]:.6f}")
    spread = abs(rates[0] - rates[1]) / rates[0]
    print(f"seed-to-seed spread {spread:.1%}")

    units = UnitsConfig(hbar=args.hbar)
    grid = SpatialGrid(n=args.n, x_min=-4.0, x_max=4.0, hbar=args.hbar)
    ham = HamiltonianSpec(potential=pot, mass=1.0)
    state = Gaussian(x0=0.0, p0=0.0, dx_sigma=math.sqrt(args.hbar / 2.0))
    bath = BathParams(
        gamma=args.gamma, temperature=args.temperature, mass=1.0, units=units
    )
    print(f"quantum run: n={args.n} hbar={args.hbar} D={bath.diffusion}")
    cfg = EvolverConfig(dt=args.dt, record_every=25)
    result = evolve(build_density_matrix(grid, state), ham, bath, cfg, t_end=args.t_end)
    fit = entropy_production_rate(result.series, tuple(args.window))

    ratio = fit.slope / rates[0]
    print(f"entropy slope  {fit.slope:.4f} nats/time (r^2 {fit.r_squared:.4f})")
    print(f"ks rate        {rates[0]:.4f}")
    print(f"ratio          {ratio:.3f}")


if __name__ == "__main__":
    main()
