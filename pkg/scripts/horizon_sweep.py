#!/usr/bin/env python3
"""Predictability horizon in the undriven quartic double well.

A balanced minimum-uncertainty packet (sigma_x = sigma_p = sqrt(hbar/2))
starts one sigma off the hilltop, bath off.  The matched classical ensemble
is a deterministic stratified lattice with the same first and second
moments.  The breakdown time is the first record where |<x>_quantum -
<x>_classical| exceeds the threshold; it is fitted against ln(1/hbar).

The hilltop instability rate lam = sqrt(2 b / m) is measured independently
with the Benettin tangent-space method and printed next to the fitted
slope.  For a minimum-uncertainty packet the unstable-direction seed cannot
shrink faster than sqrt(hbar/2 m lam), so the measured slope sits near
1/(2 lam) rather than 1/lam; the intercept tracks the threshold."""

import argparse
import hashlib
import json
import math
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from decolab.bath import bath_off
from decolab.classical import TrajectoryEnsemble, langevin_series, lyapunov_spectrum
from decolab.diagnostics import linear_fit
from decolab.grids import Gaussian, SpatialGrid, state_wavefunction
from decolab.potentials import HamiltonianSpec, QuarticDoubleWell
from decolab.quantum import EvolverConfig, evolve_wavefunction
from decolab.runner import VERSION

DT = 0.005
RECORD_EVERY = 10


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--decades", type=float, default=3.0,
        help="hbar span below 1e-2, in half-decade steps",
    )
    parser.add_argument("--threshold", type=float, default=0.1)
    parser.add_argument("--lattice", type=int, default=64, help="strata per axis")
    parser.add_argument("--t-end", type=float, default=17.0)
    parser.add_argument(
        "--out", default=None,
        help="also write scaling.csv and summary.json to this directory",
    )
    return parser.parse_args()


def stratified_lattice(k):
    z = ndtri((np.arange(k) + 0.5) / k)
    zx, zp = np.meshgrid(z, z, indexing="ij")
    return zx.ravel(), zp.ravel()


def breakdown_time(pot, hbar, threshold, zx, zp, t_end):
    lam = math.sqrt(2.0 * pot.b / pot.m)
    sigma = math.sqrt(hbar / (2.0 * lam))
    n = max(1024, 1 << math.ceil(math.log2(2.0 / hbar)))
    grid = SpatialGrid(n=n, x_min=-3.0, x_max=3.0, hbar=hbar)
    ham = HamiltonianSpec(potential=pot, mass=pot.m)
    psi0 = state_wavefunction(
        grid, Gaussian(x0=sigma, p0=0.0, dx_sigma=sigma)
    )
    cfg = EvolverConfig(dt=DT, record_every=RECORD_EVERY)
    quantum = evolve_wavefunction(grid, psi0, ham, cfg, t_end=t_end)

    ens = TrajectoryEnsemble(
        x=sigma + sigma * zx, p=(hbar / (2.0 * sigma)) * zp, mass=pot.m, rng_seed=0
    )
    _, classical = langevin_series(
        ens, pot, bath_off(pot.m), dt=DT, t_end=t_end, record_every=RECORD_EVERY
    )
    gap = np.abs(quantum.series.mean_x - classical.mean_x)
    crossed = np.nonzero(gap > threshold)[0]
    return (quantum.series.t[crossed[0]] if len(crossed) else math.inf), n


def write_artifacts(out_dir, args, points, fit, lam_eff):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    knobs = {
        "decades": args.decades,
        "threshold": args.threshold,
        "lattice": args.lattice,
        "t_end": args.t_end,
        "dt": DT,
        "record_every": RECORD_EVERY,
    }
    cfg_hash = hashlib.sha256(
        json.dumps(knobs, sort_keys=True).encode("utf-8")
    ).hexdigest()
    finite = [p for p in points if p["t_breakdown"] is not None]
    lines = [
        f"# config_hash={cfg_hash} version={VERSION} scenario=quartic-horizon",
        "ln_inv_hbar,t_breakdown",
    ]
    for p in finite:
        lines.append(
            "%.17g,%.17g" % (math.log(1.0 / p["hbar"]), p["t_breakdown"])
        )
    (out / "scaling.csv").write_text("\n".join(lines) + "\n")
    summary = {
        "scenario_id": "quartic-horizon",
        "config_hash": cfg_hash,
        "version": VERSION,
        "inputs": knobs,
        "lam_eff": float(lam_eff),
        "points": points,
        "fits": {
            "horizon": {
                "slope": fit.slope,
                "intercept": fit.intercept,
                "stderr": fit.stderr,
                "r_squared": fit.r_squared,
                "window": [
                    math.log(1.0 / finite[0]["hbar"]),
                    math.log(1.0 / finite[-1]["hbar"]),
                ],
            }
        },
        "files": {"scaling": "scaling.csv"},
    }
    (out / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )


def main():
    args = parse_args()
    pot = QuarticDoubleWell(m=1.0, a=0.25, b=0.5)
    zx, zp = stratified_lattice(args.lattice)
    spectrum = lyapunov_spectrum(pot, (0.0, 0.0), t_avg=2000.0)
    lam_eff = spectrum.exponents[0]

    n_points = int(round(2 * args.decades)) + 1
    hbars = [1e-2 * 10 ** (-0.5 * k) for k in range(n_points)]
    log_inv, t_star, points = [], [], []
    print(f"{'hbar':>9} {'n':>7} {'t*':>7}")
    for hbar in hbars:
        t_b, n = breakdown_time(pot, hbar, args.threshold, zx, zp, args.t_end)
        print(f"{hbar:9.2e} {n:7d} {t_b:7.2f}")
        points.append(
            {"hbar": hbar, "n": n,
             "t_breakdown": float(t_b) if math.isfinite(t_b) else None}
        )
        if math.isfinite(t_b):
            log_inv.append(math.log(1.0 / hbar))
            t_star.append(t_b)

    fit = linear_fit(np.array(log_inv), np.array(t_star))
    print(f"benettin rate     {lam_eff:.4f}")
    print(f"fitted slope      {fit.slope:.4f}  (1/lam = {1.0 / lam_eff:.4f},"
          f" 1/2lam = {0.5 / lam_eff:.4f})")
    print(f"r^2               {fit.r_squared:.5f}")
    if args.out is not None:
        write_artifacts(args.out, args, points, fit, lam_eff)


if __name__ == "__main__":
    main()
