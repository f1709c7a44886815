#!/usr/bin/env python3
"""Entropy production on the inverted harmonic ridge with the coupling swept
over two decades.  Post-transient, every coupling should produce entropy at
the instability rate lam, so the normalized slopes land on a plateau at 1.
The fit window opens later for weaker coupling (longer decoherence
transient) and closes when the packet approaches the grid edge."""

import argparse
import math

from decolab.bath import BathParams
from decolab.config import UnitsConfig
from decolab.diagnostics import entropy_production_rate
from decolab.grids import Gaussian, SpatialGrid, build_density_matrix, state_wavefunction
from decolab.potentials import HamiltonianSpec, InvertedHarmonic
from decolab.quantum import EvolverConfig, evolve, evolve_wavefunction

HBAR = 0.25
LAM = 1.0
SIGMA0 = 0.5
T_END = 2.35
TEMPERATURE = 100.0


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--gammas", type=float, nargs="+", default=[5e-5, 5e-4, 5e-3],
        help="friction coefficients; D = 2 m gamma T spans two decades",
    )
    parser.add_argument("--n", type=int, default=512)
    return parser.parse_args()


def fit_window(diffusion, x_max):
    t_on = 0.45 + abs(0.5 * math.log(diffusion * SIGMA0**2 / (LAM * HBAR**2)))
    sigma_inf = math.sqrt(SIGMA0**2 + diffusion / (4.0 * LAM**3))
    t_off = min(math.log((x_max / 3.2) / sigma_inf), T_END)
    return t_on, t_off


def main():
    args = parse_args()
    units = UnitsConfig(hbar=HBAR)
    grid = SpatialGrid(n=args.n, x_min=-22.5, x_max=22.5, hbar=HBAR)
    ham = HamiltonianSpec(potential=InvertedHarmonic(m=1.0, lam=LAM), mass=1.0)
    state = Gaussian(x0=0.0, p0=0.0, dx_sigma=SIGMA0)
    cfg = EvolverConfig(dt=0.005, record_every=5)

    print(f"{'gamma':>9} {'D':>7} {'window':>14} {'slope/lam':>10} {'r^2':>8}")
    for gamma in args.gammas:
        bath = BathParams(gamma=gamma, temperature=TEMPERATURE, mass=1.0, units=units)
        result = evolve(build_density_matrix(grid, state), ham, bath, cfg, t_end=T_END)
        window = fit_window(bath.diffusion, grid.x_max)
        fit = entropy_production_rate(result.series, window)
        print(
            f"{gamma:9.1e} {bath.diffusion:7.3f} "
            f"({window[0]:5.2f},{window[1]:5.2f}) {fit.slope / LAM:10.4f} "
            f"{fit.r_squared:8.5f}"
        )

    # closed-system control: no bath, no entropy
    psi0 = state_wavefunction(grid, state)
    result = evolve_wavefunction(grid, psi0, ham, cfg, t_end=T_END)
    fit = entropy_production_rate(result.series, (0.5, T_END))
    print(f"{'bath off':>9} {0.0:7.3f} {'(0.50, 2.35)':>14} {fit.slope / LAM:10.4f}")


if __name__ == "__main__":
    main()
