"""Density-matrix propagation for the high-temperature master equation.

The generator splits into three exactly solvable pieces:

  unitary      -i/hbar [H, rho]        split-step Fourier (Strang)
  relaxation   -gamma (x-x') (d_x - d_x') rho
  decoherence  -(D/hbar^2) (x-x')^2 rho

In center/difference coordinates (xbar, u) the relaxation term reads
-2 gamma u d_u rho, whose exact flow is the dilation u -> u e^{-2 gamma dt}.
The default scheme realizes that dilation spectrally: the linear map on
(x, x') factors into shear * zoom * shear (unit-determinant shears as
per-row/column Fourier translations, the zooms as chirp-z spectral
resamplings about the grid center), so the substep is unconditionally
stable and exact up to band-limited interpolation.  The decoherence term
is an elementwise Gaussian multiplier, also exact.  A full step is the
palindrome  E(dt/2) K(dt/2) R(dt) K(dt/2) E(dt/2)  with E the elementwise
potential-phase-plus-decoherence factor and K the kinetic phase, hence
second order overall; time-dependent potentials are frozen at the step
midpoint.

Positivity is monitored at record points, not enforced: the generator has
no position-diffusion term, so transient eigenvalues down to -1e-6 are
tolerated and anything below aborts the run.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

import numpy as np
from scipy.signal import CZT

from .bath import BathParams
from .diagnostics import DiagnosticSeries
from .errors import (
    ConfigError,
    NumericalAbort,
    SchemeInstability,
    StabilityWarning,
    UnsupportedPotential,
)
from .grids import (
    DensityMatrix,
    SpatialGrid,
    WignerField,
    coherence_length,
    momentum_moments,
    position_moments,
    wavefunction_momentum_moments,
    wigner_transform,
)
from .potentials import HamiltonianSpec, PotentialSpec

_SCHEMES = ("spectral_shear", "upwind_fd")


@dataclass(frozen=True)
class EvolverConfig:
    dt: float
    splitting: str = "strang"
    relaxation_scheme: str = "spectral_shear"
    absorbing_mask_width: float = 0.0
    record_every: int = 10
    wigner_every: int = 0
    record_moyal: bool = False
    moyal_order_cap: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive", field="dt")
        if self.splitting != "strang":
            raise ConfigError("unknown splitting %r" % self.splitting, field="splitting")
        if self.relaxation_scheme not in _SCHEMES:
            raise ConfigError(
                "relaxation_scheme must be one of %s" % (_SCHEMES,),
                field="relaxation_scheme",
            )
        if not 0.0 <= self.absorbing_mask_width < 0.5:
            raise ConfigError(
                "absorbing_mask_width must lie in [0, 0.5)", field="absorbing_mask_width"
            )
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1", field="record_every")
        if self.wigner_every < 0:
            raise ConfigError("wigner_every must be >= 0", field="wigner_every")


@dataclass
class EvolveResult:
    series: DiagnosticSeries
    rho_final: Optional[DensityMatrix] = None
    psi_final: Optional[np.ndarray] = None
    wigner_snapshots: Tuple = ()
    survival: float = 1.0


# --------------------------------------------------------------------------
# spectral building blocks


def _bcast(vec: np.ndarray, axis: int, ndim: int = 2) -> np.ndarray:
    if ndim == 1:
        return vec
    return vec[:, None] if axis == 0 else vec[None, :]


class _CenteredZoom:
    """Chirp-z resampling f(j) -> f(alpha (j - n/2) + n/2), band-limited.

    Valid for n divisible by 4 (guaranteed by the grid contract), where the
    residual e^{-i pi n/2} phase is unity.
    """

    def __init__(self, n: int, alpha: float):
        self.n = n
        h = n // 2
        k = np.arange(n)
        self.signs = np.where(k % 2 == 0, 1.0, -1.0)
        w_exp = 2j * math.pi * alpha / n
        self._czt = CZT(n, m=n, w=cmath.exp(w_exp), a=cmath.exp(w_exp * h))
        self.post = np.exp(w_exp * (h * h - h * k)) / n

    def apply(self, vals: np.ndarray, axis: int) -> np.ndarray:
        fk = np.fft.fftshift(np.fft.fft(vals, axis=axis), axes=axis)
        fk *= _bcast(self.signs, axis, vals.ndim)
        out = self._czt(fk, axis=axis)
        out *= _bcast(self.post, axis, vals.ndim)
        return out


class _SpectralShearPlan:
    """Exact off-diagonal dilation rho(x,x') <- rho(ax+bx', bx+ax')."""

    def __init__(self, grid: SpatialGrid, gamma: float, dt: float):
        n = grid.n
        s = math.exp(-2.0 * gamma * dt)
        alpha = 0.5 * (1.0 + s)
        ratio = (1.0 - s) / (1.0 + s)
        k = np.fft.fftfreq(n, 1.0 / n)
        off = np.arange(n) - n // 2
        shear = np.exp(2j * math.pi / n * np.outer(ratio * off, k))
        self.row_phase = shear
        self.col_phase = shear.T
        self.zoom0 = _CenteredZoom(n, alpha)
        self.zoom1 = _CenteredZoom(n, s / alpha)

    def apply(self, vals: np.ndarray) -> np.ndarray:
        vals = np.fft.ifft(np.fft.fft(vals, axis=1) * self.row_phase, axis=1)
        vals = self.zoom0.apply(vals, axis=0)
        vals = self.zoom1.apply(vals, axis=1)
        vals = np.fft.ifft(np.fft.fft(vals, axis=0) * self.col_phase, axis=0)
        return vals


class _UpwindPlan:
    """First-order upwind alternative for the -2 gamma u d_u advection.

    Sub-steps to respect the CFL bound at the domain corners; kept as a
    cross-check scheme, not the default.
    """

    def __init__(self, grid: SpatialGrid, gamma: float, dt: float):
        x = grid.x
        self.u = x[:, None] - x[None, :]
        self.du = 2.0 * grid.dx
        cfl = 2.0 * gamma * float(np.abs(self.u).max()) * dt / self.du
        self.nsub = max(1, math.ceil(cfl / 0.9))
        self.dt_sub = dt / self.nsub
        self.gamma = gamma

    def apply(self, vals: np.ndarray) -> np.ndarray:
        for _ in range(self.nsub):
            fwd = np.roll(np.roll(vals, -1, axis=0), 1, axis=1)
            bwd = np.roll(np.roll(vals, 1, axis=0), -1, axis=1)
            grad_b = (vals - bwd) / self.du
            grad_f = (fwd - vals) / self.du
            grad = np.where(self.u > 0, grad_b, grad_f)
            vals = vals - self.dt_sub * 2.0 * self.gamma * self.u * grad
        return vals


def _relaxation_plan(grid, gamma, dt, scheme):
    if scheme == "spectral_shear":
        return _SpectralShearPlan(grid, gamma, dt)
    return _UpwindPlan(grid, gamma, dt)


def absorbing_mask(grid: SpatialGrid, width_frac: float) -> Optional[np.ndarray]:
    """sin^2 rolloff to zero over width_frac of the domain at each edge."""
    if width_frac == 0.0:
        return None
    span = grid.x_max - grid.x_min
    w = width_frac * span
    ramp_l = np.clip((grid.x - grid.x_min) / w, 0.0, 1.0)
    ramp_r = np.clip((grid.x_max - grid.x) / w, 0.0, 1.0)
    return np.sin(0.5 * math.pi * np.minimum(ramp_l, ramp_r)) ** 2


# --------------------------------------------------------------------------
# single-term steps (spec-level ops; evolve() fuses them)


def _reject_analytic_only(pot: PotentialSpec):
    if pot.analytic_only:
        raise UnsupportedPotential(
            "%s is analytic-only and cannot be placed on a grid" % type(pot).__name__
        )


def _check_bath_grid(bath: BathParams, grid: SpatialGrid):
    if bath.units.hbar != grid.hbar:
        raise ConfigError(
            "bath units hbar=%g disagrees with grid hbar=%g"
            % (bath.units.hbar, grid.hbar),
            field="units",
        )


def _to_momentum(vals):
    return np.fft.ifft(np.fft.fft(vals, axis=0), axis=1)


def _to_position(vals):
    return np.fft.fft(np.fft.ifft(vals, axis=0), axis=1)


def step_unitary(rho: DensityMatrix, ham: HamiltonianSpec, dt: float, t: float = 0.0) -> DensityMatrix:
    """One Strang step of the von Neumann flow, potential frozen at t + dt/2."""
    _reject_analytic_only(ham.potential)
    grid = rho.grid
    hbar = grid.hbar
    x_mean, _ = position_moments(rho)
    curv = float(ham.potential.d2(x_mean, t))
    omega_char = math.sqrt(abs(curv) / ham.mass)
    if dt * omega_char > 0.1:
        warnings.warn(
            StabilityWarning(
                "dt=%g resolves the local rate %g marginally" % (dt, omega_char)
            )
        )
    v = np.asarray(ham.potential.value(grid.x, t + dt / 2.0), dtype=float)
    vp = np.exp(-1j * v * dt / (2.0 * hbar))
    kin = np.exp(-1j * grid.p**2 * dt / (2.0 * ham.mass * hbar))
    vals = vp[:, None] * rho.values * np.conj(vp)[None, :]
    vals = _to_momentum(vals)
    vals *= kin[:, None]
    vals *= np.conj(kin)[None, :]
    vals = _to_position(vals)
    vals = vp[:, None] * vals * np.conj(vp)[None, :]
    return DensityMatrix(grid, vals)


def step_decoherence(rho: DensityMatrix, bath: BathParams, dt: float) -> DensityMatrix:
    """Exact Gaussian suppression of off-diagonal coherence; identity at D=0."""
    _check_bath_grid(bath, rho.grid)
    d = bath.diffusion
    if d == 0.0:
        return rho.copy()
    grid = rho.grid
    u = grid.x[:, None] - grid.x[None, :]
    mult = np.exp(-d * u**2 * dt / grid.hbar**2)
    return DensityMatrix(grid, rho.values * mult)


def step_relaxation(
    rho: DensityMatrix,
    bath: BathParams,
    dt: float,
    scheme: str = "spectral_shear",
) -> DensityMatrix:
    """Exact off-diagonal dilation u -> u e^{-2 gamma dt} (or upwind FD)."""
    _check_bath_grid(bath, rho.grid)
    if scheme not in _SCHEMES:
        raise ConfigError("unknown relaxation scheme %r" % scheme, field="relaxation_scheme")
    if bath.gamma == 0.0:
        return rho.copy()
    plan = _relaxation_plan(rho.grid, bath.gamma, dt, scheme)
    vals = plan.apply(rho.values.copy())
    # both schemes preserve Hermiticity in exact arithmetic; the anti-Hermitian
    # residue is band-edge interpolation noise and is projected out
    vals = 0.5 * (vals + vals.conj().T)
    out = DensityMatrix(rho.grid, vals)
    resid = out.hermiticity_residual()
    if resid > 1e-6:
        raise SchemeInstability(
            "hermiticity residual %.3g after relaxation step (scheme %s)" % (resid, scheme)
        )
    return out


# --------------------------------------------------------------------------
# composed evolution


def _record_row(rows, t, tr, purity, entropy, coh, mx, mp_, vx, vp_, moyal):
    rows["t"].append(t)
    rows["trace"].append(tr)
    rows["purity"].append(purity)
    rows["entropy_nats"].append(entropy)
    rows["coherence_len"].append(coh)
    rows["mean_x"].append(mx)
    rows["mean_p"].append(mp_)
    rows["var_x"].append(vx)
    rows["var_p"].append(vp_)
    rows["moyal_ratio"].append(moyal)


def _new_rows():
    return {
        k: []
        for k in (
            "t",
            "trace",
            "purity",
            "entropy_nats",
            "coherence_len",
            "mean_x",
            "mean_p",
            "var_x",
            "var_p",
            "moyal_ratio",
        )
    }


def _rows_to_series(rows, provenance, any_moyal):
    return DiagnosticSeries(
        t=np.array(rows["t"]),
        trace=np.array(rows["trace"]),
        purity=np.array(rows["purity"]),
        entropy_nats=np.array(rows["entropy_nats"]),
        coherence_len=np.array(rows["coherence_len"]),
        mean_x=np.array(rows["mean_x"]),
        mean_p=np.array(rows["mean_p"]),
        var_x=np.array(rows["var_x"]),
        var_p=np.array(rows["var_p"]),
        moyal_ratio=np.array(rows["moyal_ratio"]) if any_moyal else None,
        provenance=provenance or {},
    )


def _step_count(t_end: float, dt: float) -> int:
    # snap to whole steps; the run covers n_steps * dt, within dt/2 of t_end
    if t_end <= 0:
        raise ConfigError("t_end must be positive", field="t_end")
    return max(1, int(round(t_end / dt)))


def _warn_if_stiff(dt, gamma, pot, mass, x_mean):
    curv = float(pot.d2(x_mean, 0.0))
    omega_char = math.sqrt(abs(curv) / mass)
    rate = max(gamma, omega_char)
    if dt * rate > 0.1:
        warnings.warn(
            StabilityWarning(
                "dt=%g against characteristic rate %g exceeds the 0.1 threshold"
                % (dt, rate)
            )
        )


def evolve(
    rho0: DensityMatrix,
    ham: HamiltonianSpec,
    bath: BathParams,
    cfg: EvolverConfig,
    t_end: float,
    provenance: Optional[Mapping[str, str]] = None,
) -> EvolveResult:
    """Propagate rho0 to t_end, sampling diagnostics every record_every steps.

    Emits entropy via the eigenvalue spectrum at record points, where
    positivity is also policed (abort below -1e-6).  With an absorbing mask
    the state is renormalized each step and the removed weight accumulates
    in EvolveResult.survival.
    """
    grid = rho0.grid
    _reject_analytic_only(ham.potential)
    _check_bath_grid(bath, grid)
    if bath.mass != ham.mass:
        raise ConfigError(
            "bath mass %g disagrees with Hamiltonian mass %g" % (bath.mass, ham.mass),
            field="mass",
        )
    n_steps = _step_count(t_end, cfg.dt)
    hbar = grid.hbar
    dt = cfg.dt
    x_mean0, _ = position_moments(rho0)
    _warn_if_stiff(dt, bath.gamma, ham.potential, ham.mass, x_mean0)

    pot = ham.potential
    static_v = not pot.time_dependent
    kin_half = np.exp(-1j * grid.p**2 * dt / (4.0 * ham.mass * hbar))
    kin_full = kin_half * kin_half
    u = grid.x[:, None] - grid.x[None, :]
    has_dec = bath.diffusion > 0.0
    has_relax = bath.gamma > 0.0
    dec_half = np.exp(-bath.diffusion * u**2 * (dt / 2.0) / hbar**2) if has_dec else None
    relax = _relaxation_plan(grid, bath.gamma, dt, cfg.relaxation_scheme) if has_relax else None
    mask = absorbing_mask(grid, cfg.absorbing_mask_width)
    if static_v:
        vp_half = np.exp(-1j * np.asarray(pot.value(grid.x), dtype=float) * dt / (2.0 * hbar))

    rows = _new_rows()
    snapshots = []
    survival = 1.0
    vals = rho0.values.copy()

    def elementwise_half(vals, t_mid):
        if static_v:
            vp = vp_half
        else:
            v = np.asarray(pot.value(grid.x, t_mid), dtype=float)
            vp = np.exp(-1j * v * dt / (2.0 * hbar))
        vals = vp[:, None] * vals * np.conj(vp)[None, :]
        if has_dec:
            vals = vals * dec_half
        return vals

    def record(t, k_record):
        dm = DensityMatrix(grid, vals)
        resid = dm.hermiticity_residual()
        if resid > 1e-6:
            raise SchemeInstability("hermiticity residual %.3g at t=%g" % (resid, t))
        tr = dm.trace()
        purity = dm.purity()
        eig = np.linalg.eigvalsh(vals) * grid.dx
        low = float(eig.min())
        if low < -1e-6:
            err = NumericalAbort("negative eigenvalue %.3g at t=%g" % (low, t))
            err.partial = (
                _rows_to_series(rows, provenance, cfg.record_moyal) if rows["t"] else None
            )
            raise err
        pos = eig[eig > 1e-14]
        entropy = float(-(pos * np.log(pos)).sum())
        coh = coherence_length(dm)
        mx, vx = position_moments(dm)
        mp_, vp_ = momentum_moments(dm)
        moyal = math.nan
        w = None
        if cfg.record_moyal:
            w = wigner_transform(dm)
            moyal = moyal_correction_magnitude(w, pot, cfg.moyal_order_cap, t).ratio
        if cfg.wigner_every and k_record % cfg.wigner_every == 0:
            snapshots.append((t, w if w is not None else wigner_transform(dm)))
        _record_row(rows, t, tr, purity, entropy, coh, mx, mp_, vx, vp_, moyal)

    record(0.0, 0)
    k_record = 0
    for k in range(1, n_steps + 1):
        t_mid = (k - 1) * dt + dt / 2.0
        vals = elementwise_half(vals, t_mid)
        if has_relax:
            vals = _to_momentum(vals)
            vals *= kin_half[:, None]
            vals *= np.conj(kin_half)[None, :]
            vals = _to_position(vals)
            vals = relax.apply(vals)
            vals = _to_momentum(vals)
            vals *= kin_half[:, None]
            vals *= np.conj(kin_half)[None, :]
            vals = _to_position(vals)
        else:
            vals = _to_momentum(vals)
            vals *= kin_full[:, None]
            vals *= np.conj(kin_full)[None, :]
            vals = _to_position(vals)
        vals = elementwise_half(vals, t_mid)
        if mask is not None:
            vals = mask[:, None] * vals * mask[None, :]
            tr = float(np.real(np.trace(vals)) * grid.dx)
            if tr <= 0:
                err = NumericalAbort("state absorbed entirely at step %d" % k)
                err.partial = (
                    _rows_to_series(rows, provenance, cfg.record_moyal) if rows["t"] else None
                )
                raise err
            vals /= tr
            survival *= tr
        vals = 0.5 * (vals + vals.conj().T)
        if k % cfg.record_every == 0 or k == n_steps:
            k_record += 1
            record(k * dt, k_record)

    series = _rows_to_series(rows, provenance, cfg.record_moyal)
    return EvolveResult(
        series=series,
        rho_final=DensityMatrix(grid, vals),
        wigner_snapshots=tuple(snapshots),
        survival=survival,
    )


def _wavefunction_coherence_length(psi: np.ndarray, dx: float) -> float:
    q = np.abs(psi) ** 2
    n = len(q)
    m = 2 * n
    fq = np.fft.rfft(q, m)
    corr = np.fft.irfft(np.abs(fq) ** 2, m)
    d = np.arange(1, n)
    num = 2.0 * float(np.sum(corr[1:n] * (d * dx) ** 2))
    den = float(corr[0]) + 2.0 * float(np.sum(corr[1:n]))
    return math.sqrt(num / den)


def evolve_wavefunction(
    grid: SpatialGrid,
    psi0: np.ndarray,
    ham: HamiltonianSpec,
    cfg: EvolverConfig,
    t_end: float,
    provenance: Optional[Mapping[str, str]] = None,
) -> EvolveResult:
    """Closed-system specialization: split-step on the wavefunction.

    Identical stepping to evolve() with the bath off, at O(n) memory; the
    entropy column is identically zero (rank-1 state) and purity is the
    squared norm, so mask-off runs report exactly 1.
    """
    _reject_analytic_only(ham.potential)
    psi = np.asarray(psi0, dtype=complex).copy()
    if psi.shape != (grid.n,):
        raise ConfigError("psi0 shape %s does not match grid n=%d" % (psi.shape, grid.n))
    n_steps = _step_count(t_end, cfg.dt)
    hbar = grid.hbar
    dt = cfg.dt
    pot = ham.potential
    q0 = np.abs(psi) ** 2 * grid.dx
    _warn_if_stiff(dt, 0.0, pot, ham.mass, float(np.sum(q0 * grid.x) / np.sum(q0)))
    static_v = not pot.time_dependent
    kin = np.exp(-1j * grid.p**2 * dt / (2.0 * ham.mass * hbar))
    if static_v:
        vp_half = np.exp(-1j * np.asarray(pot.value(grid.x), dtype=float) * dt / (2.0 * hbar))
    mask = absorbing_mask(grid, cfg.absorbing_mask_width)

    rows = _new_rows()
    survival = 1.0

    def record(t):
        norm2 = float(np.sum(np.abs(psi) ** 2) * grid.dx)
        q = np.abs(psi) ** 2 * grid.dx / norm2
        mx = float(np.sum(q * grid.x))
        vx = float(np.sum(q * (grid.x - mx) ** 2))
        mp_, vp_ = wavefunction_momentum_moments(grid, psi)
        coh = _wavefunction_coherence_length(psi, grid.dx)
        _record_row(rows, t, norm2, norm2**2, 0.0, coh, mx, mp_, vx, vp_, math.nan)

    record(0.0)
    for k in range(1, n_steps + 1):
        t_mid = (k - 1) * dt + dt / 2.0
        if static_v:
            vp = vp_half
        else:
            v = np.asarray(pot.value(grid.x, t_mid), dtype=float)
            vp = np.exp(-1j * v * dt / (2.0 * hbar))
        psi = vp * psi
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        psi = vp * psi
        if mask is not None:
            psi = mask * psi
            norm2 = float(np.sum(np.abs(psi) ** 2) * grid.dx)
            if norm2 <= 0:
                err = NumericalAbort("state absorbed entirely at step %d" % k)
                err.partial = (
                    _rows_to_series(rows, provenance, False) if rows["t"] else None
                )
                raise err
            psi /= math.sqrt(norm2)
            survival *= norm2
        if k % cfg.record_every == 0 or k == n_steps:
            record(k * dt)

    series = _rows_to_series(rows, provenance, False)
    return EvolveResult(series=series, psi_final=psi, survival=survival)


# --------------------------------------------------------------------------
# Moyal correction monitor


@dataclass(frozen=True)
class MoyalCorrection:
    """L2 magnitudes of the hbar^2n correction terms against the Poisson flow."""

    term_norms: Tuple[float, ...]
    poisson_norm: float
    ratio: float


def _spectral_derivative(arr, k, axis, order):
    f = np.fft.fft(arr, axis=axis)
    f *= _bcast((1j * k) ** order, axis, arr.ndim)
    return np.real(np.fft.ifft(f, axis=axis))


def moyal_correction_magnitude(
    w: WignerField,
    pot: PotentialSpec,
    order_cap: int = 1,
    t: float = 0.0,
) -> MoyalCorrection:
    """Per-term norms of the odd-derivative quantum corrections.

    term_n = hbar^2n (-1)^n / (2^2n (2n+1)!) d^{2n+1}V/dx * d^{2n+1}W/dp,
    compared to |{H, W}_PB|.  Catalog kinds supply analytic derivatives up
    to fifth order, capping order_cap at 2.
    """
    if pot.analytic_only:
        raise UnsupportedPotential("analytic-only potential has no grid support")
    if not 1 <= order_cap <= 2:
        raise UnsupportedPotential("order_cap must be 1 or 2 (derivatives cataloged to 5th)")
    grid = w.grid
    hbar = grid.hbar
    kx = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.dx)
    kp = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=w.dp_w)
    vol = grid.dx * w.dp_w

    dw_dp = _spectral_derivative(w.values, kp, 1, 1)
    dw_dx = _spectral_derivative(w.values, kx, 0, 1)
    v1 = np.asarray(pot.grad(grid.x, t), dtype=float)[:, None]
    pb = v1 * dw_dp - (w.p[None, :] / pot.m) * dw_dx
    pb_norm = math.sqrt(float(np.sum(pb**2)) * vol)

    norms = []
    d3w = _spectral_derivative(w.values, kp, 1, 3)
    v3 = np.asarray(pot.d3(grid.x, t), dtype=float)[:, None]
    term1 = (-(hbar**2) / 24.0) * v3 * d3w
    norms.append(math.sqrt(float(np.sum(term1**2)) * vol))
    if order_cap >= 2:
        d5w = _spectral_derivative(w.values, kp, 1, 5)
        v5 = np.asarray(pot.d5(grid.x, t), dtype=float)[:, None]
        term2 = (hbar**4 / 1920.0) * v5 * d5w
        norms.append(math.sqrt(float(np.sum(term2**2)) * vol))
    ratio = norms[0] / pb_norm if pb_norm > 0 else math.nan
    return MoyalCorrection(term_norms=tuple(norms), poisson_norm=pb_norm, ratio=ratio)
