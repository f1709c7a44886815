#!/usr/bin/env python3
"""Closed harmonic oscillator over ten periods: trace, purity, and the
classical track.  The quantum mean must ride the leapfrog trajectory to
within a small fraction of the oscillation amplitude."""

import argparse
import math

import numpy as np

from decolab.classical import TrajectoryEnsemble, step_hamiltonian
from decolab.grids import Gaussian, SpatialGrid, state_wavefunction
from decolab.potentials import HamiltonianSpec, Harmonic
from decolab.quantum import EvolverConfig, evolve_wavefunction


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=512, help="grid points")
    parser.add_argument("--periods", type=int, default=10)
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--x0", type=float, default=1.0, help="initial displacement")
    parser.add_argument("--dt", type=float, default=0.005)
    return parser.parse_args()


def classical_track(pot, x0, dt, times):
    ens = TrajectoryEnsemble(x=np.array([x0]), p=np.array([0.0]), mass=pot.m, rng_seed=0)
    out = [ens.x[0]]
    k = 1
    t = 0.0
    while k < len(times):
        ens = step_hamiltonian(ens, pot, dt)
        t += dt
        if t >= times[k] - 0.5 * dt:
            out.append(ens.x[0])
            k += 1
    return np.array(out)


def main():
    args = parse_args()
    grid = SpatialGrid(n=args.n, x_min=-8.0, x_max=8.0, hbar=1.0)
    pot = Harmonic(m=1.0, omega=args.omega)
    ham = HamiltonianSpec(potential=pot, mass=1.0)
    sigma = math.sqrt(grid.hbar / (2.0 * pot.m * args.omega))
    psi0 = state_wavefunction(grid, Gaussian(x0=args.x0, p0=0.0, dx_sigma=sigma))
    cfg = EvolverConfig(dt=args.dt, record_every=20)
    t_end = args.periods * 2.0 * math.pi / args.omega

    result = evolve_wavefunction(grid, psi0, ham, cfg, t_end=t_end)
    series = result.series
    xc = classical_track(pot, args.x0, args.dt, series.t)

    trace_drift = float(np.max(np.abs(series.trace - 1.0)))
    purity_drift = float(np.max(np.abs(series.purity - 1.0)))
    track_err = float(np.max(np.abs(series.mean_x - xc))) / abs(args.x0)
    print(f"periods={args.periods} n={args.n} dt={args.dt}")
    print(f"trace drift      {trace_drift:.3e}")
    print(f"purity drift     {purity_drift:.3e}")
    print(f"<x> track error  {track_err:.3e} of amplitude")


if __name__ == "__main__":
    main()
