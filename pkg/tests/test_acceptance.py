"""End-to-end acceptance gates.

One test per top-level criterion.  Each computes its quantities from the
public API at the stated tolerances and prints a single ``[accept]``
verdict line (visible under ``pytest -rA`` or ``-s``) before asserting.
The heavy gates (3, 4, 5) re-run their frozen scenarios from scratch; the
whole module is the slow part of the suite and budgets its own runtimes.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.special import ndtri

import decolab.observer as ob
from decolab.bath import BathParams, bath_off
from decolab.classical import (
    TrajectoryEnsemble,
    ks_entropy_rate,
    langevin_series,
    lyapunov_spectrum,
    step_hamiltonian,
)
from decolab.compressors import Lz78GapGamma
from decolab.config import UnitsConfig, scenario_from_mapping
from decolab.diagnostics import critical_scales, entropy_production_rate, linear_fit
from decolab.grids import (
    CatPair,
    Gaussian,
    SpatialGrid,
    build_density_matrix,
    state_wavefunction,
)
from decolab.potentials import (
    DrivenDoubleWell,
    HamiltonianSpec,
    Harmonic,
    InvertedHarmonic,
    QuarticDoubleWell,
)
from decolab.quantum import EvolverConfig, evolve, evolve_wavefunction, step_decoherence
from decolab.runner import run_classical, run_observer, run_quantum, run_timescales
from decolab.timescales import (
    HYPERION,
    JUPITER,
    LAMBDA_SOLAR,
    SOLAR_ACTION_I,
    standoff_scale,
    t_hbar,
    t_r,
    tau_d,
)
from decolab.units import CGS, HBAR_CGS, LENGTH, SECONDS_PER_YEAR, Quantity


def _gate(label, ok, detail):
    print(f"[accept] {label}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


# ------------------------------------------------------------ criterion 1


def test_unitary_baseline():
    grid = SpatialGrid(n=512, x_min=-8.0, x_max=8.0, hbar=1.0)
    pot = Harmonic(m=1.0, omega=1.0)
    ham = HamiltonianSpec(potential=pot, mass=1.0)
    psi0 = state_wavefunction(
        grid, Gaussian(x0=1.0, p0=0.0, dx_sigma=math.sqrt(0.5))
    )
    cfg = EvolverConfig(dt=0.005, record_every=20)
    start = time.monotonic()
    result = evolve_wavefunction(grid, psi0, ham, cfg, t_end=20.0 * math.pi)
    elapsed = time.monotonic() - start
    series = result.series

    ens = TrajectoryEnsemble(x=np.array([1.0]), p=np.array([0.0]), mass=1.0, rng_seed=0)
    track, k = [1.0], 1
    for step in range(int(round(20.0 * math.pi / 0.005))):
        ens = step_hamiltonian(ens, pot, 0.005)
        if k < len(series.t) and ens.t >= series.t[k] - 0.0025:
            track.append(ens.x[0])
            k += 1
    track = np.array(track)

    trace_drift = float(np.max(np.abs(series.trace - 1.0)))
    purity_drift = float(np.max(np.abs(series.purity - 1.0)))
    track_err = float(np.max(np.abs(series.mean_x - track)))
    ok = (
        trace_drift <= 1e-6
        and purity_drift <= 1e-4
        and track_err <= 1e-3
        and elapsed <= 30.0
    )
    assert _gate(
        "criterion-1 unitary-baseline",
        ok,
        f"trace {trace_drift:.1e}, purity {purity_drift:.1e}, "
        f"track {track_err:.1e} of amplitude, {elapsed:.1f}s",
    )


# ------------------------------------------------------------ criterion 2


def test_decoherence_rate_scaling():
    grid = SpatialGrid(n=256, x_min=-16.0, x_max=16.0, hbar=1.0)
    bath = BathParams(gamma=0.25, temperature=1.0, mass=1.0)
    fitted, expected = [], []
    for delta_x in (4.0, 8.0, 16.0):
        rho = build_density_matrix(
            grid, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=delta_x)
        )
        i = int(np.argmin(np.abs(grid.x - 0.5 * delta_x)))
        j = int(np.argmin(np.abs(grid.x + 0.5 * delta_x)))
        rate = bath.diffusion * (grid.x[i] - grid.x[j]) ** 2 / grid.hbar**2
        dt = 0.2 / rate
        mags = [abs(rho.values[i, j])]
        for _ in range(16):
            rho = step_decoherence(rho, bath, dt)
            mags.append(abs(rho.values[i, j]))
        fit = linear_fit(dt * np.arange(17), np.log(np.array(mags)))
        fitted.append(-fit.slope)
        expected.append(rate)
    rel = max(abs(f - e) / e for f, e in zip(fitted, expected))
    exponent = linear_fit(np.log(np.array([4.0, 8.0, 16.0])), np.log(np.array(fitted))).slope
    ok = rel <= 0.02 and abs(exponent - 2.0) <= 0.05
    assert _gate(
        "criterion-2 decoherence-rates",
        ok,
        f"worst rate error {rel:.1e}, exponent {exponent:.4f}",
    )


# ------------------------------------------------------------ criterion 3

HBAR_RIDGE = 0.25
SIGMA_RIDGE = 0.5
T_END_RIDGE = 2.35


def _ridge_window(diffusion, x_max):
    t_on = 0.45 + abs(0.5 * math.log(diffusion * SIGMA_RIDGE**2 / HBAR_RIDGE**2))
    sigma_inf = math.sqrt(SIGMA_RIDGE**2 + diffusion / 4.0)
    return t_on, min(math.log((x_max / 3.2) / sigma_inf), T_END_RIDGE)


def test_entropy_rate_plateau():
    units = UnitsConfig(hbar=HBAR_RIDGE)
    grid = SpatialGrid(n=512, x_min=-22.5, x_max=22.5, hbar=HBAR_RIDGE)
    ham = HamiltonianSpec(potential=InvertedHarmonic(m=1.0, lam=1.0), mass=1.0)
    state = Gaussian(x0=0.0, p0=0.0, dx_sigma=SIGMA_RIDGE)
    cfg = EvolverConfig(dt=0.005, record_every=5)

    start = time.monotonic()
    slopes = []
    for gamma in (5e-5, 5e-4, 5e-3):
        bath = BathParams(gamma=gamma, temperature=100.0, mass=1.0, units=units)
        result = evolve(
            build_density_matrix(grid, state), ham, bath, cfg, t_end=T_END_RIDGE
        )
        fit = entropy_production_rate(
            result.series, _ridge_window(bath.diffusion, grid.x_max)
        )
        slopes.append(fit.slope)
    control = evolve_wavefunction(
        grid, state_wavefunction(grid, state), ham, cfg, t_end=T_END_RIDGE
    )
    control_slope = entropy_production_rate(control.series, (0.5, T_END_RIDGE)).slope
    elapsed = time.monotonic() - start

    spread = max(abs(s - 1.0) for s in slopes)
    ok = spread <= 0.25 and abs(control_slope) <= 0.01 and elapsed <= 600.0
    assert _gate(
        "criterion-3 entropy-plateau",
        ok,
        "slopes/lam " + "/".join(f"{s:.3f}" for s in slopes)
        + f", control {control_slope:.1e}, {elapsed:.0f}s",
    )


# ------------------------------------------------------------ criterion 4

KS_WINDOW = (8.0, 28.0)
KS_T_END = 30.0


def test_ks_rate_match():
    pot = DrivenDoubleWell(m=1.0, a=0.25, b=0.5, drive_amp=0.2, drive_freq=1.4)
    rates = [
        ks_entropy_rate(lyapunov_spectrum(pot, x0, t_avg=2000.0))
        for x0 in ((1.0, 0.0), (-0.5, 0.3))
    ]
    seed_spread = abs(rates[0] - rates[1]) / rates[0]

    hbar = 0.01
    units = UnitsConfig(hbar=hbar)
    grid = SpatialGrid(n=1024, x_min=-4.0, x_max=4.0, hbar=hbar)
    ham = HamiltonianSpec(potential=pot, mass=1.0)
    state = Gaussian(x0=0.0, p0=0.0, dx_sigma=math.sqrt(hbar / 2.0))
    bath = BathParams(gamma=0.0025, temperature=2.0, mass=1.0, units=units)
    cfg = EvolverConfig(dt=0.02, record_every=25)
    start = time.monotonic()
    result = evolve(build_density_matrix(grid, state), ham, bath, cfg, t_end=KS_T_END)
    elapsed = time.monotonic() - start
    fit = entropy_production_rate(result.series, KS_WINDOW)

    ratio = fit.slope / rates[0]
    ok = seed_spread <= 0.05 and abs(ratio - 1.0) <= 0.30 and elapsed <= 1800.0
    assert _gate(
        "criterion-4 ks-rate-match",
        ok,
        f"lam+ {rates[0]:.4f} (seed spread {seed_spread:.1%}), "
        f"entropy slope {fit.slope:.4f}, ratio {ratio:.2f}, {elapsed:.0f}s",
    )


# ------------------------------------------------------------ criterion 5


def _horizon_point(pot, hbar, zx, zp, threshold):
    lam = math.sqrt(2.0 * pot.b / pot.m)
    sigma = math.sqrt(hbar / (2.0 * lam))
    n = max(1024, 1 << math.ceil(math.log2(2.0 / hbar)))
    grid = SpatialGrid(n=n, x_min=-3.0, x_max=3.0, hbar=hbar)
    ham = HamiltonianSpec(potential=pot, mass=pot.m)
    psi0 = state_wavefunction(grid, Gaussian(x0=sigma, p0=0.0, dx_sigma=sigma))
    cfg = EvolverConfig(dt=0.005, record_every=10)
    quantum = evolve_wavefunction(grid, psi0, ham, cfg, t_end=17.0)
    ens = TrajectoryEnsemble(
        x=sigma + sigma * zx, p=(hbar / (2.0 * sigma)) * zp, mass=pot.m, rng_seed=0
    )
    _, classical = langevin_series(
        ens, pot, bath_off(pot.m), dt=0.005, t_end=17.0, record_every=10
    )
    gap = np.abs(quantum.series.mean_x - classical.mean_x)
    crossed = np.nonzero(gap > threshold)[0]
    assert len(crossed), f"no breakdown before t=17 at hbar={hbar}"
    return float(quantum.series.t[crossed[0]])


def test_predictability_horizon():
    pot = QuarticDoubleWell(m=1.0, a=0.25, b=0.5)
    lam_eff = lyapunov_spectrum(pot, (0.0, 0.0), t_avg=2000.0).exponents[0]
    z = ndtri((np.arange(64) + 0.5) / 64)
    zx, zp = [a.ravel() for a in np.meshgrid(z, z, indexing="ij")]

    hbars = [1e-2 * 10 ** (-0.5 * k) for k in range(7)]
    t_star = [_horizon_point(pot, hb, zx, zp, threshold=0.1) for hb in hbars]
    fit = linear_fit(np.log(1.0 / np.array(hbars)), np.array(t_star))

    slope_err = abs(fit.slope * lam_eff - 1.0)
    ok = fit.r_squared >= 0.95 and slope_err <= 0.20
    assert _gate(
        "criterion-5 predictability-horizon",
        ok,
        f"r^2 {fit.r_squared:.4f}, slope {fit.slope:.4f}, "
        f"lam_eff {lam_eff:.4f}, slope*lam_eff {fit.slope * lam_eff:.3f}",
    )


# ------------------------------------------------------------ criterion 6


def test_critical_scales_product():
    worst_product = 0.0
    lam = LAMBDA_SOLAR.value
    for gamma, temp, mass in ((1.0, 300.0, 1.0), (1e-20, 100.0, 1.898e30)):
        bath = BathParams(gamma=gamma, temperature=temp, mass=mass, units=CGS)
        scales = critical_scales(bath, lam, JUPITER.chi.value)
        worst_product = max(
            worst_product, abs(scales.l_c * scales.sigma_c / HBAR_CGS.value - 1.0)
        )
    bath = JUPITER.bath
    scales = critical_scales(bath, lam, JUPITER.chi.value)
    ratio = (
        standoff_scale(bath, LAMBDA_SOLAR).value / scales.l_c
    )
    root2_err = abs(ratio - math.sqrt(2.0))
    ok = worst_product <= 1e-12 and root2_err <= 1e-12
    assert _gate(
        "criterion-6 critical-scales",
        ok,
        f"worst |l_c sigma_c/hbar - 1| {worst_product:.1e}, "
        f"standoff/l_c {ratio:.12f}",
    )


# ------------------------------------------------------------ criterion 7


def test_headline_timescales():
    myr = 1e6 * SECONDS_PER_YEAR
    solar = t_r(LAMBDA_SOLAR, SOLAR_ACTION_I, HBAR_CGS).value / myr
    jupiter = t_hbar(JUPITER.lyapunov_rate, JUPITER.dp0, JUPITER.chi, HBAR_CGS).value / myr
    hyperion = (
        t_hbar(HYPERION.lyapunov_rate, HYPERION.dp0, HYPERION.chi, HBAR_CGS).value
        / SECONDS_PER_YEAR
    )
    grain = BathParams(gamma=1.0, temperature=300.0, mass=1.0, units=CGS)
    tau_gamma = (tau_d(grain, Quantity(1.0, LENGTH)) * grain.gamma).value
    l_c = critical_scales(JUPITER.bath, LAMBDA_SOLAR.value, JUPITER.chi.value).l_c

    checks = {
        "solar 711 Myr +-5%": abs(solar - 711.0) / 711.0 <= 0.05,
        "jupiter 682 Myr x2": 341.0 <= jupiter <= 1364.0,
        "hyperion 20 yr x2": 10.0 <= hyperion <= 40.0,
        "tau_D*gamma 1e-40 +-1 order": abs(math.log10(tau_gamma) + 40.0) <= 1.0,
        "l_c 1e-29 cm +-2 orders": abs(math.log10(l_c) + 29.0) <= 2.0,
    }
    ok = all(checks.values())
    failed = [name for name, passed in checks.items() if not passed]
    assert _gate(
        "criterion-7 headline-numbers",
        ok,
        f"solar {solar:.1f} Myr, jupiter {jupiter:.0f} Myr, hyperion {hyperion:.1f} yr, "
        f"tau_D*gamma {tau_gamma:.2e}, l_c {l_c:.2e} cm"
        + (f"; failed: {failed}" if failed else ""),
    )


# ------------------------------------------------------------ criterion 8


def _pointer_oracle(axes, amps):
    mats = [ob.PointerBasis(axes=np.array([ax])).basis_matrix(0) for ax in axes]
    probs = []
    for i in range(2):
        for j in range(2):
            v = np.kron(mats[0][:, i], mats[1][:, j])
            probs.append(abs(np.vdot(v, amps)) ** 2)
    return np.array(probs)


def test_observer_suite():
    truth_ok = True
    for c_in in (0, 1):
        for t_in in (0, 1):
            out = ob.cnot(ob.basis_state(2, 2 * c_in + t_in), 0, 1).amplitudes
            want = np.zeros(4)
            want[2 * c_in + (t_in ^ c_in)] = 1.0
            truth_ok &= bool(np.max(np.abs(out - want)) <= 1e-12)

    cols = [ob.cnot(ob.basis_state(2, i), 0, 1).amplitudes for i in range(4)]
    cn = np.array(cols).T
    hh = np.kron(ob.basis_x(), ob.basis_x())
    cols_r = [ob.cnot(ob.basis_state(2, i), 1, 0).amplitudes for i in range(4)]
    reversal_err = float(np.max(np.abs(cn - hh @ np.array(cols_r).T @ hh)))

    rng = np.random.default_rng(11)
    prob_err = prob_sum_err = 0.0
    for _ in range(5):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps = amps / np.linalg.norm(amps)
        axes = rng.normal(size=(2, 3))
        axes = axes / np.linalg.norm(axes, axis=1, keepdims=True)
        p = ob.pointer_probabilities(ob.pure_state(amps), ob.PointerBasis(axes=axes))
        prob_err = max(prob_err, float(np.max(np.abs(p - _pointer_oracle(axes, amps)))))
        prob_sum_err = max(prob_sum_err, abs(float(p.sum()) - 1.0))

    rotating = ob.measurement_chain(
        ob.rotation_y(math.pi / 2), ob.basis_z(), 8, mode="full_tree"
    )
    alternating = ob.measurement_chain(
        None, lambda k: ob.basis_x() if k % 2 == 0 else ob.basis_z(), 8, mode="full_tree"
    )
    bit_err = 0.0
    for tree in (rotating, alternating):
        for depth in range(1, 9):
            gain = ob.record_entropy(tree, depth) - ob.record_entropy(tree, depth - 1)
            bit_err = max(bit_err, abs(gain - 1.0))

    comp = Lz78GapGamma()
    n = 4096
    const_ratio = comp.compressed_bits([0] * n, 2) / n
    random_bits = comp.compressed_bits(np.random.default_rng(7).integers(0, 2, n).tolist(), 2)
    random_ratio = random_bits / n

    summary = ob.tree_summary(rotating)
    z_slope = linear_fit(
        np.array(summary["depth"], dtype=float), np.array(summary["avg_z_bits"])
    ).slope

    ok = (
        truth_ok
        and reversal_err <= 1e-12
        and prob_err <= 1e-12
        and prob_sum_err <= 1e-12
        and bit_err <= 1e-9
        and const_ratio <= 0.10
        and random_ratio >= 0.90
        and 0.8 <= z_slope <= 1.2
    )
    assert _gate(
        "criterion-8 observer-suite",
        ok,
        f"truth {truth_ok}, reversal {reversal_err:.1e}, oracle {prob_err:.1e}, "
        f"sum {prob_sum_err:.1e}, bit gain err {bit_err:.1e}, const {const_ratio:.1%}, "
        f"random {random_ratio:.1%}, Z slope {z_slope:.3f}",
    )


# ------------------------------------------------------------ criterion 9


def _artifact_bytes(out_dir):
    from pathlib import Path

    out = Path(out_dir)
    return {
        str(p.relative_to(out)): p.read_bytes()
        for p in sorted(out.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }


def test_determinism(tmp_path):
    density = scenario_from_mapping(
        {
            "scenario_id": "accept-determinism",
            "seed": 5,
            "grid": {"n": 128, "x_min": -16.0, "x_max": 16.0},
            "potential": {"kind": "quartic_double_well", "params": {"a": 0.02, "b": 0.5}},
            "state": {"kind": "gaussian", "x0": 1.0, "dx_sigma": 1.0},
            "bath": {"gamma": 0.05, "temperature": 2.0},
            "evolver": {"dt": 0.02, "t_end": 0.4, "record_every": 2},
            "sweep": {"parameter": "bath.gamma", "values": [0.05, 0.1, 0.2]},
        }
    )
    run_quantum(density, out_dir=tmp_path / "q1", threads=1)
    run_quantum(density, out_dir=tmp_path / "q2", threads=3)
    sweep_ok = _artifact_bytes(tmp_path / "q1") == _artifact_bytes(tmp_path / "q2")

    classical = scenario_from_mapping(
        {
            "scenario_id": "accept-determinism-cl",
            "seed": 7,
            "state": {"kind": "gaussian", "x0": 1.0, "dx_sigma": 0.5},
            "potential": {"kind": "driven_double_well", "params": {}},
            "evolver": {"dt": 0.01, "t_end": 2.0, "record_every": 10},
            "classical": {
                "ensemble": 64,
                "sigma_x": 0.5,
                "sigma_p": 0.5,
                # short spin-up: byte-equality, not convergence, is under test
                "lyapunov": {"x0": [1.0, 0.0], "t_avg": 50.0, "drift_tol": 0.5},
            },
            "bath": {"gamma": 0.05, "temperature": 2.0},
        }
    )
    run_classical(classical, out_dir=tmp_path / "c1")
    run_classical(classical, out_dir=tmp_path / "c2")
    classical_ok = _artifact_bytes(tmp_path / "c1") == _artifact_bytes(tmp_path / "c2")

    observer = scenario_from_mapping(
        {
            "scenario_id": "accept-determinism-ob",
            "seed": 9,
            "observer": {"depth": 6, "mode": "sample", "dynamics": "rotation_y",
                         "angle": 0.9, "policy": "z"},
        }
    )
    run_observer(observer, out_dir=tmp_path / "o1")
    run_observer(observer, out_dir=tmp_path / "o2")
    observer_ok = _artifact_bytes(tmp_path / "o1") == _artifact_bytes(tmp_path / "o2")

    run_timescales({"preset": "all"}, tmp_path / "t1")
    run_timescales({"preset": "all"}, tmp_path / "t2")
    timescales_ok = _artifact_bytes(tmp_path / "t1") == _artifact_bytes(tmp_path / "t2")

    seed_shift = scenario_from_mapping({**density.as_dict(), "seed": 6})
    run_quantum(seed_shift, out_dir=tmp_path / "q3", threads=1)
    hash_moves = json.loads((tmp_path / "q3" / "summary.json").read_text())[
        "config_hash"
    ] != json.loads((tmp_path / "q1" / "summary.json").read_text())["config_hash"]

    ok = sweep_ok and classical_ok and observer_ok and timescales_ok and hash_moves
    assert _gate(
        "criterion-9 determinism",
        ok,
        f"sweep threads 1==3: {sweep_ok}, classical {classical_ok}, "
        f"observer {observer_ok}, timescales {timescales_ok}, seed moves hash: {hash_moves}",
    )
