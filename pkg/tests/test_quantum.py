"""Quantum evolver: unitary flow, decoherence, relaxation, composition, Moyal.

Rate fits use fixed matrix elements (exact exponentials), free spreading and
Ehrenfest motion use analytic oracles, and the Moyal monitor is cross-checked
against finite differencing independent of the spectral implementation.
"""

import math

import numpy as np
import pytest

from decolab.bath import BathParams, bath_off
from decolab.diagnostics import linear_fit
from decolab.errors import (
    ConfigError,
    NumericalAbort,
    StabilityWarning,
    UnsupportedPotential,
)
from decolab.grids import (
    CatPair,
    DensityMatrix,
    Gaussian,
    SpatialGrid,
    WignerField,
    build_density_matrix,
    momentum_moments,
    position_moments,
    state_wavefunction,
)
from decolab.potentials import (
    GravityRadial,
    HamiltonianSpec,
    Harmonic,
    InvertedHarmonic,
    QuarticDoubleWell,
)
from decolab.quantum import (
    EvolverConfig,
    evolve,
    evolve_wavefunction,
    moyal_correction_magnitude,
    step_decoherence,
    step_relaxation,
    step_unitary,
)

GRID16 = SpatialGrid(n=256, x_min=-16.0, x_max=16.0)
GRID_SMALL = SpatialGrid(n=128, x_min=-16.0, x_max=16.0)


def _ham(pot):
    return HamiltonianSpec(pot)


# --------------------------------------------------------------------------
# unitary flow


def test_coherent_state_ehrenfest():
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    psi0 = state_wavefunction(GRID16, Gaussian(x0=3.0, p0=0.0, dx_sigma=math.sqrt(0.5)))
    res = evolve_wavefunction(GRID16, psi0, ham, EvolverConfig(dt=0.01, record_every=50), 20 * math.pi)
    s = res.series
    expect = 3.0 * np.cos(s.t)
    assert np.abs(s.mean_x - expect).max() <= 1e-3 * 3.0
    assert np.abs(s.trace - 1.0).max() <= 1e-6
    assert np.abs(s.purity - 1.0).max() <= 1e-4


def test_ground_state_stationary():
    # sigma^2 = hbar / (2 m omega) is the stationary width
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    psi0 = state_wavefunction(GRID16, Gaussian(x0=0.0, p0=0.0, dx_sigma=math.sqrt(0.5)))
    res = evolve_wavefunction(GRID16, psi0, ham, EvolverConfig(dt=0.01, record_every=100), 20 * math.pi)
    s = res.series
    assert np.abs(s.mean_x).max() < 1e-4
    assert np.abs(s.mean_p).max() < 1e-4
    assert np.abs(s.var_x - 0.5).max() < 1e-4
    assert np.abs(s.var_p - 0.5).max() < 1e-4


def test_step_unitary_dm_period():
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    rho = build_density_matrix(GRID_SMALL, Gaussian(x0=2.0, p0=0.0, dx_sigma=math.sqrt(0.5)))
    dt = 0.01
    n_steps = 628
    for k in range(n_steps):
        rho = step_unitary(rho, ham, dt, t=k * dt)
    mx, _ = position_moments(rho)
    assert mx == pytest.approx(2.0 * math.cos(n_steps * dt), abs=2e-3)
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)
    assert rho.purity() == pytest.approx(1.0, abs=1e-8)


def test_free_spreading():
    # Delta x(t)^2 = Delta x^2 + (hbar t / (2 m Delta x))^2
    grid = SpatialGrid(n=512, x_min=-40.0, x_max=40.0)
    ham = _ham(Harmonic(m=1.0, omega=0.0))
    psi0 = state_wavefunction(grid, Gaussian(x0=0.0, p0=0.0, dx_sigma=1.0))
    res = evolve_wavefunction(grid, psi0, ham, EvolverConfig(dt=0.01, record_every=100), 3.0)
    s = res.series
    expect = 1.0 + (s.t / 2.0) ** 2
    assert np.abs(s.var_x - expect).max() / expect.max() < 0.005


def test_gravity_rejected_on_grid():
    ham = HamiltonianSpec(GravityRadial(gm=1.0, m=1.0))
    rho = build_density_matrix(GRID_SMALL, Gaussian(x0=0.0, p0=0.0, dx_sigma=1.0))
    with pytest.raises(UnsupportedPotential):
        step_unitary(rho, ham, 0.01)


# --------------------------------------------------------------------------
# decoherence term


def _separation_index(grid, delta):
    # element at (x, x') = (+delta/2, -delta/2); both land on grid nodes here
    i = int(np.argmin(np.abs(grid.x - delta / 2.0)))
    j = int(np.argmin(np.abs(grid.x + delta / 2.0)))
    return i, j


def test_decoherence_rates_scale_as_delta_squared():
    bath = BathParams(gamma=0.25, temperature=1.0, mass=1.0)
    d = bath.diffusion
    assert d == 0.5
    rates = []
    deltas = (4.0, 8.0, 16.0)
    for delta in deltas:
        rho = build_density_matrix(GRID16, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=delta))
        i, j = _separation_index(GRID16, delta)
        assert abs((GRID16.x[i] - GRID16.x[j]) - delta) < 1e-9
        rate_expect = d * delta**2
        dt = 0.2 / rate_expect
        ts, peaks = [], []
        cur = rho
        for k in range(16):
            ts.append(k * dt)
            peaks.append(abs(cur.values[i, j]))
            cur = step_decoherence(cur, bath, dt)
        fit = linear_fit(np.array(ts), np.log(peaks))
        rate = -fit.slope
        assert rate == pytest.approx(rate_expect, rel=0.02)
        rates.append(rate)
    expo = linear_fit(np.log(deltas), np.log(rates))
    assert expo.slope == pytest.approx(2.0, abs=0.05)


def test_decoherence_identity_at_zero_coupling():
    rho = build_density_matrix(GRID_SMALL, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=6.0))
    out = step_decoherence(rho, bath_off(mass=1.0), 0.5)
    assert np.array_equal(out.values, rho.values)


def test_decoherence_diagonal_untouched():
    rho = build_density_matrix(GRID_SMALL, CatPair(x0=0.0, p0=0.3, dx_sigma=1.0, delta_x=6.0))
    bath = BathParams(gamma=2.0, temperature=5.0, mass=1.0)
    out = step_decoherence(rho, bath, 1.0)
    np.testing.assert_array_equal(np.diag(out.values), np.diag(rho.values))


@pytest.mark.parametrize("w1", [0.3, 0.5, 0.8])
def test_decoherence_never_increases_purity(w1):
    r1 = build_density_matrix(GRID_SMALL, Gaussian(x0=-2.0, p0=0.5, dx_sigma=0.8))
    r2 = build_density_matrix(GRID_SMALL, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=5.0))
    rho = DensityMatrix(GRID_SMALL, w1 * r1.values + (1 - w1) * r2.values)
    bath = BathParams(gamma=0.5, temperature=1.0, mass=1.0)
    out = step_decoherence(rho, bath, 0.3)
    assert out.purity() <= rho.purity() + 1e-12
    assert np.all(np.abs(out.values) <= np.abs(rho.values) + 1e-15)


# --------------------------------------------------------------------------
# relaxation term


def test_relaxation_identity_at_zero_gamma():
    rho = build_density_matrix(GRID_SMALL, Gaussian(x0=1.0, p0=1.0, dx_sigma=1.0))
    out = step_relaxation(rho, bath_off(mass=1.0), 0.1)
    assert np.array_equal(out.values, rho.values)


def test_momentum_decay_full_stepping():
    # <p>(t) = p0 e^{-2 gamma t} under the three-term generator with V = 0
    ham = _ham(Harmonic(m=1.0, omega=0.0))
    bath = BathParams(gamma=0.25, temperature=1.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=0.0, p0=2.0, dx_sigma=1.0))
    res = evolve(rho0, ham, bath, EvolverConfig(dt=0.02, record_every=10), 2.0)
    s = res.series
    expect = 2.0 * np.exp(-0.5 * s.t)
    assert np.abs(s.mean_p - expect).max() <= 0.02 * 2.0


def test_equilibration_to_thermal_variance():
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    bath = BathParams(gamma=0.5, temperature=1.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=0.0, p0=0.0, dx_sigma=1.0))
    res = evolve(rho0, ham, bath, EvolverConfig(dt=0.02, record_every=100), 10.0)
    s = res.series
    assert s.var_p[-1] == pytest.approx(1.0, rel=0.05)


def test_upwind_scheme_consistency():
    rho = build_density_matrix(GRID16, Gaussian(x0=0.5, p0=1.5, dx_sigma=1.2))
    bath = BathParams(gamma=0.2, temperature=1.0, mass=1.0)
    dt = 0.01
    a = step_relaxation(rho, bath, dt, scheme="spectral_shear")
    b = step_relaxation(rho, bath, dt, scheme="upwind_fd")
    assert b.trace() == pytest.approx(1.0, abs=1e-8)
    scale = np.abs(rho.values).max()
    assert np.abs(a.values - b.values).max() / scale < 0.05
    mp_a, _ = momentum_moments(a)
    mp_b, _ = momentum_moments(b)
    assert mp_b == pytest.approx(mp_a, rel=0.02)


# --------------------------------------------------------------------------
# composed evolution


def test_unitary_limit_preserves_purity():
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=2.0, p0=0.0, dx_sigma=1.0))
    res = evolve(rho0, ham, bath_off(mass=1.0), EvolverConfig(dt=0.02, record_every=25), 4.0)
    assert np.abs(res.series.purity - 1.0).max() <= 1e-6
    assert np.abs(res.series.entropy_nats).max() <= 1e-4


def test_richardson_convergence_order():
    ham = _ham(QuarticDoubleWell(m=1.0, a=0.02, b=0.5))
    bath = BathParams(gamma=0.1, temperature=2.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=1.0, p0=0.0, dx_sigma=1.0))
    finals = []
    for dt in (0.04, 0.02, 0.01):
        res = evolve(rho0, ham, bath, EvolverConfig(dt=dt, record_every=1000), 1.0)
        finals.append(res.series.mean_x[-1])
    d1 = abs(finals[0] - finals[1])
    d2 = abs(finals[1] - finals[2])
    order = math.log2(d1 / d2)
    assert order == pytest.approx(2.0, abs=0.3)


def test_trace_drift_term_combinations():
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    grid = SpatialGrid(n=64, x_min=-12.0, x_max=12.0)
    rho0 = build_density_matrix(grid, Gaussian(x0=1.0, p0=0.5, dx_sigma=1.0))
    # bath off exercises {unitary}; a warm bath exercises all three terms.
    # friction-only (T=0) runs violate positivity by design and are covered
    # by the manual loops below, outside the positivity monitor.
    baths = {
        "unitary": bath_off(mass=1.0),
        "all_terms": BathParams(gamma=0.1, temperature=1.0, mass=1.0),
    }
    for name, bath in baths.items():
        res = evolve(rho0, ham, bath, EvolverConfig(dt=0.01, record_every=500), 20.0)
        drift = np.abs(res.series.trace - 1.0).max()
        assert drift <= 1e-6, "%s drifted %g" % (name, drift)


def test_trace_drift_manual_term_combinations():
    grid = SpatialGrid(n=64, x_min=-12.0, x_max=12.0)
    rho = build_density_matrix(grid, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=4.0))
    bath = BathParams(gamma=0.1, temperature=1.0, mass=1.0)
    cur = rho
    for _ in range(200):
        cur = step_decoherence(cur, bath, 0.01)
    assert cur.trace() == pytest.approx(1.0, abs=1e-10)
    cur = rho
    for _ in range(200):
        cur = step_relaxation(cur, bath, 0.01)
    assert cur.trace() == pytest.approx(1.0, abs=1e-7)
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    cur = rho
    for k in range(200):
        cur = step_unitary(cur, ham, 0.01, t=0.01 * k)
        cur = step_decoherence(cur, bath, 0.01)
    assert cur.trace() == pytest.approx(1.0, abs=1e-8)
    cur = rho
    for k in range(200):
        cur = step_unitary(cur, ham, 0.01, t=0.01 * k)
        cur = step_relaxation(cur, bath, 0.01)
    assert cur.trace() == pytest.approx(1.0, abs=1e-7)
    cur = rho
    for _ in range(200):
        cur = step_relaxation(cur, bath, 0.01)
        cur = step_decoherence(cur, bath, 0.01)
    assert cur.trace() == pytest.approx(1.0, abs=1e-7)


def test_hermiticity_after_steps():
    ham = _ham(QuarticDoubleWell(m=1.0, a=0.02, b=0.5))
    bath = BathParams(gamma=0.3, temperature=2.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=1.0, p0=0.0, dx_sigma=1.0))
    res = evolve(rho0, ham, bath, EvolverConfig(dt=0.02, record_every=50), 2.0)
    assert res.rho_final.hermiticity_residual() <= 1e-8


def test_stability_warning():
    ham = _ham(Harmonic(m=1.0, omega=5.0))
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=0.0, p0=0.0, dx_sigma=1.0))
    with pytest.warns(StabilityWarning):
        evolve(rho0, ham, bath_off(mass=1.0), EvolverConfig(dt=0.1, record_every=10), 0.5)


def test_positivity_abort():
    r1 = build_density_matrix(GRID_SMALL, Gaussian(x0=-3.0, p0=0.0, dx_sigma=0.7))
    r2 = build_density_matrix(GRID_SMALL, Gaussian(x0=3.0, p0=0.0, dx_sigma=0.7))
    bad = DensityMatrix(GRID_SMALL, 1.001 * r1.values - 0.001 * r2.values)
    ham = _ham(Harmonic(m=1.0, omega=1.0))
    with pytest.raises(NumericalAbort):
        evolve(bad, ham, bath_off(mass=1.0), EvolverConfig(dt=0.01, record_every=10), 0.1)


def test_absorbing_mask_tracks_survival():
    ham = _ham(InvertedHarmonic(m=1.0, lam=1.0))
    bath = BathParams(gamma=0.05, temperature=2.0, mass=1.0)
    rho0 = build_density_matrix(GRID16, Gaussian(x0=0.5, p0=0.0, dx_sigma=0.7))
    res = evolve(
        rho0,
        ham,
        bath,
        EvolverConfig(dt=0.01, record_every=50, absorbing_mask_width=0.15),
        3.0,
    )
    assert res.survival < 1.0
    assert np.abs(res.series.trace - 1.0).max() < 1e-9
    assert np.isfinite(res.series.entropy_nats).all()


def test_mass_mismatch_rejected():
    ham = _ham(Harmonic(m=2.0, omega=1.0))
    bath = BathParams(gamma=0.1, temperature=1.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=0.0, p0=0.0, dx_sigma=1.0))
    with pytest.raises(ConfigError):
        evolve(rho0, ham, bath, EvolverConfig(dt=0.01), 0.1)


def test_commuting_limit_order():
    # for V = 0 the kinetic and decoherence substeps commute to O(dt^2);
    # dt must keep dt*D*u^2 small over the cat's off-diagonal support
    ham = _ham(Harmonic(m=1.0, omega=0.0))
    bath = BathParams(gamma=0.1, temperature=0.5, mass=1.0)
    rho = build_density_matrix(GRID_SMALL, CatPair(x0=0.0, p0=0.0, dx_sigma=1.0, delta_x=5.0))
    resid = []
    for dt in (0.02, 0.01):
        uc = step_decoherence(step_unitary(rho, ham, dt), bath, dt)
        cu = step_unitary(step_decoherence(rho, bath, dt), ham, dt)
        resid.append(np.abs(uc.values - cu.values).max())
    order = math.log2(resid[0] / resid[1])
    assert order == pytest.approx(2.0, abs=0.3)


def test_config_validation():
    with pytest.raises(ConfigError):
        EvolverConfig(dt=0.0)
    with pytest.raises(ConfigError):
        EvolverConfig(dt=0.01, splitting="lie")
    with pytest.raises(ConfigError):
        EvolverConfig(dt=0.01, relaxation_scheme="magic")
    with pytest.raises(ConfigError):
        EvolverConfig(dt=0.01, absorbing_mask_width=0.7)
    with pytest.raises(ConfigError):
        EvolverConfig(dt=0.01, record_every=0)


# --------------------------------------------------------------------------
# Moyal correction monitor


def _gaussian_wigner(grid, sigma_x, sigma_p):
    amp = 1.0 / (2.0 * math.pi * sigma_x * sigma_p)
    p = (grid.dp / 2.0) * (np.arange(grid.n) - grid.n // 2)
    w = amp * np.exp(
        -(grid.x[:, None] ** 2) / (2 * sigma_x**2) - (p[None, :] ** 2) / (2 * sigma_p**2)
    )
    return WignerField(grid, w)


def test_moyal_harmonic_exactly_zero():
    grid = SpatialGrid(n=128, x_min=-16.0, x_max=16.0)
    w = _gaussian_wigner(grid, 1.0, 0.5)
    mc = moyal_correction_magnitude(w, Harmonic(m=1.0, omega=1.0), order_cap=2)
    assert mc.term_norms[0] == 0.0
    assert mc.term_norms[1] == 0.0
    assert mc.ratio == 0.0
    assert mc.poisson_norm > 0


def test_moyal_hbar_scaling():
    pot = QuarticDoubleWell(m=1.0, a=0.02, b=0.5)
    hbars = (0.5, 1.0, 2.0)
    ratios = []
    for hbar in hbars:
        grid = SpatialGrid(n=256, x_min=-16.0, x_max=16.0, hbar=hbar)
        w = _gaussian_wigner(grid, 1.0, 0.5)
        ratios.append(moyal_correction_magnitude(w, pot).ratio)
    fit = linear_fit(np.log(hbars), np.log(ratios))
    assert fit.slope == pytest.approx(2.0, abs=0.1)


def test_moyal_against_analytic_oracle():
    # d^3/dp^3 of the Gaussian factor is (-p^3/s^6 + 3p/s^4) e^{-p^2/2s^2}
    grid = SpatialGrid(n=256, x_min=-16.0, x_max=16.0)
    pot = QuarticDoubleWell(m=1.0, a=0.02, b=0.5)
    sp = 0.5
    w = _gaussian_wigner(grid, 1.0, sp)
    mc = moyal_correction_magnitude(w, pot)
    p = w.p[None, :]
    env = w.values
    d3 = (-(p**3) / sp**6 + 3 * p / sp**4) * env
    term = (-1.0 / 24.0) * pot.d3(grid.x)[:, None] * d3
    oracle = math.sqrt(float(np.sum(term**2)) * grid.dx * w.dp_w)
    assert mc.term_norms[0] == pytest.approx(oracle, rel=1e-9)


def test_moyal_squeeze_response():
    # halving sigma_p multiplies ||V''' d^3W/dp^3|| / ||W|| by exactly 2^3
    grid = SpatialGrid(n=256, x_min=-16.0, x_max=16.0)
    pot = QuarticDoubleWell(m=1.0, a=0.02, b=0.5)
    wb = _gaussian_wigner(grid, 1.0, 0.5)
    ws = _gaussian_wigner(grid, 1.0, 0.25)
    mb = moyal_correction_magnitude(wb, pot)
    ms = moyal_correction_magnitude(ws, pot)
    nb = math.sqrt(float(np.sum(wb.values**2)))
    ns = math.sqrt(float(np.sum(ws.values**2)))
    growth = (ms.term_norms[0] / mb.term_norms[0]) * (nb / ns)
    assert growth == pytest.approx(8.0, rel=0.15)


def test_moyal_column_in_series():
    ham = _ham(QuarticDoubleWell(m=1.0, a=0.02, b=0.5))
    bath = BathParams(gamma=0.1, temperature=2.0, mass=1.0)
    rho0 = build_density_matrix(GRID_SMALL, Gaussian(x0=1.0, p0=0.0, dx_sigma=1.0))
    res = evolve(
        rho0, ham, bath, EvolverConfig(dt=0.02, record_every=10, record_moyal=True), 0.4
    )
    assert res.series.moyal_ratio is not None
    assert np.isfinite(res.series.moyal_ratio).all()
    assert res.series.moyal_ratio[-1] > 0


def test_moyal_rejects_gravity():
    grid = SpatialGrid(n=128, x_min=-16.0, x_max=16.0)
    w = _gaussian_wigner(grid, 1.0, 0.5)
    with pytest.raises(UnsupportedPotential):
        moyal_correction_magnitude(w, GravityRadial(gm=1.0, m=1.0))
