#!/usr/bin/env python3
"""Decoherence-rate check for cat states: the off-diagonal matrix element
at the initial separation decays at D delta_x^2 / hbar^2.  Each separation
is stepped with the bare decoherence map and the log-linear fit is compared
against the analytic rate."""

import argparse

import numpy as np

from decolab.bath import BathParams
from decolab.diagnostics import linear_fit
from decolab.grids import CatPair, SpatialGrid, build_density_matrix
from decolab.quantum import step_decoherence


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gamma", type=float, default=0.25)
    parser.add_argument("--temperature", type=float, default=1.0)
    parser.add_argument("--sigma", type=float, default=1.0, help="packet width")
    parser.add_argument(
        "--separations", type=float, nargs="+", default=[4.0, 8.0, 16.0],
        help="cat separations in units of the packet width",
    )
    return parser.parse_args()


def fitted_rate(grid, bath, delta_x, n_steps=16):
    rho = build_density_matrix(
        grid, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=delta_x)
    )
    i = int(np.argmin(np.abs(grid.x - 0.5 * delta_x)))
    j = int(np.argmin(np.abs(grid.x + 0.5 * delta_x)))
    rate_expect = bath.diffusion * (grid.x[i] - grid.x[j]) ** 2 / grid.hbar**2
    dt = 0.2 / rate_expect
    mags = [abs(rho.values[i, j])]
    for _ in range(n_steps):
        rho = step_decoherence(rho, bath, dt)
        mags.append(abs(rho.values[i, j]))
    t = dt * np.arange(n_steps + 1)
    fit = linear_fit(t, np.log(np.array(mags)))
    return -fit.slope, rate_expect


def main():
    args = parse_args()
    grid = SpatialGrid(n=256, x_min=-16.0, x_max=16.0, hbar=1.0)
    bath = BathParams(gamma=args.gamma, temperature=args.temperature, mass=1.0)
    print(f"D = {bath.diffusion}")
    print(f"{'delta_x':>8} {'fitted':>12} {'analytic':>12} {'rel err':>9}")
    for mult in args.separations:
        delta_x = mult * args.sigma
        fitted, expect = fitted_rate(grid, bath, delta_x)
        print(
            f"{delta_x:8.1f} {fitted:12.4f} {expect:12.4f} "
            f"{abs(fitted - expect) / expect:9.2e}"
        )


if __name__ == "__main__":
    main()
