"""Classical twin of the quantum evolver: Langevin ensembles and Lyapunov spectra.

The Langevin ensemble samples the Fokker-Planck flow {H, W}_PB + 2 gamma
d_p(p W) + D d_p^2 W, i.e. the classical limit of the three-term master
equation with the same friction convention (pdot = -2 gamma p).  Lyapunov
exponents come from Benettin tangent-space propagation with periodic QR
renormalization along a leapfrog reference trajectory.

Determinism: the noise for step k of an ensemble seeded with s is drawn from
default_rng((s, k)), a pure function of the ensemble's own fields, so a fixed
seed and step order reproduce trajectories bitwise.  Runs are single-process;
per-sample slots within the per-step draw make the streams independent of any
worker partitioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .bath import BathParams
from .diagnostics import DiagnosticSeries
from .errors import ConfigError, NotConverged
from .potentials import PotentialSpec, force, second_derivative

__all__ = [
    "TrajectoryEnsemble",
    "LyapunovSpectrum",
    "gaussian_cloud",
    "single_trajectory",
    "step_langevin",
    "step_hamiltonian",
    "langevin_series",
    "lyapunov_spectrum",
    "ks_entropy_rate",
    "ensemble_moments",
    "EnsembleMoments",
]


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Phase-space sample cloud; x and p are parallel 1-D arrays."""

    x: np.ndarray
    p: np.ndarray
    mass: float
    rng_seed: int
    t: float = 0.0
    step_index: int = 0

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=np.float64))
        p = np.atleast_1d(np.asarray(self.p, dtype=np.float64))
        if x.shape != p.shape or x.ndim != 1 or x.size < 1:
            raise ConfigError("x and p must be matching 1-D arrays with >= 1 sample")
        if self.mass <= 0:
            raise ConfigError("mass must be positive", field="mass")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @property
    def n_samples(self) -> int:
        return self.x.size

    @property
    def divergent_count(self) -> int:
        """Samples that have left the representable range; flagged, never clamped."""
        return int(np.sum(~(np.isfinite(self.x) & np.isfinite(self.p))))


def gaussian_cloud(
    n_samples: int,
    x0: float,
    p0: float,
    sigma_x: float,
    sigma_p: float,
    mass: float,
    seed: int,
) -> TrajectoryEnsemble:
    """Normal cloud matching a minimum-uncertainty packet when sigma_p = hbar/(2 sigma_x)."""
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1", field="n_samples")
    rng = np.random.default_rng((seed, 0xC10D))
    x = x0 + sigma_x * rng.standard_normal(n_samples)
    p = p0 + sigma_p * rng.standard_normal(n_samples)
    return TrajectoryEnsemble(x=x, p=p, mass=mass, rng_seed=seed)


def single_trajectory(x0: float, p0: float, mass: float, seed: int = 0) -> TrajectoryEnsemble:
    return TrajectoryEnsemble(x=np.array([x0]), p=np.array([p0]), mass=mass, rng_seed=seed)


def step_langevin(
    ens: TrajectoryEnsemble,
    pot: PotentialSpec,
    bath: BathParams,
    dt: float,
) -> TrajectoryEnsemble:
    """Euler-Maruyama: dx = (p/m)dt, dp = (F - 2 gamma p)dt + sqrt(2 D dt) xi."""
    if dt <= 0:
        raise ConfigError("dt must be positive", field="dt")
    f = force(pot, ens.x, ens.t)
    new_x = ens.x + (ens.p / ens.mass) * dt
    new_p = ens.p + (f - 2.0 * bath.gamma * ens.p) * dt
    if bath.diffusion > 0.0:
        rng = np.random.default_rng((ens.rng_seed, ens.step_index))
        new_p = new_p + math.sqrt(2.0 * bath.diffusion * dt) * rng.standard_normal(ens.n_samples)
    return replace(ens, x=new_x, p=new_p, t=ens.t + dt, step_index=ens.step_index + 1)


def step_hamiltonian(ens: TrajectoryEnsemble, pot: PotentialSpec, dt: float) -> TrajectoryEnsemble:
    """Leapfrog kick-drift-kick; symplectic, bounded energy error, no secular drift."""
    if dt <= 0:
        raise ConfigError("dt must be positive", field="dt")
    p_half = ens.p + 0.5 * dt * force(pot, ens.x, ens.t)
    new_x = ens.x + (p_half / ens.mass) * dt
    new_p = p_half + 0.5 * dt * force(pot, new_x, ens.t + dt)
    return replace(ens, x=new_x, p=new_p, t=ens.t + dt, step_index=ens.step_index + 1)


@dataclass(frozen=True)
class EnsembleMoments:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov: float


def ensemble_moments(ens: TrajectoryEnsemble) -> EnsembleMoments:
    """Unbiased sample moments; needs >= 2 samples."""
    if ens.n_samples < 2:
        raise ConfigError("moments need >= 2 samples")
    mx = float(np.mean(ens.x))
    mp_ = float(np.mean(ens.p))
    dx = ens.x - mx
    dp = ens.p - mp_
    denom = ens.n_samples - 1
    return EnsembleMoments(
        mean_x=mx,
        mean_p=mp_,
        var_x=float(np.dot(dx, dx) / denom),
        var_p=float(np.dot(dp, dp) / denom),
        cov=float(np.dot(dx, dp) / denom),
    )


def langevin_series(
    ens: TrajectoryEnsemble,
    pot: PotentialSpec,
    bath: BathParams,
    dt: float,
    t_end: float,
    record_every: int = 10,
) -> Tuple[TrajectoryEnsemble, DiagnosticSeries]:
    """Drive the ensemble to t_end, sampling moment rows on the shared schema.

    Classical rows carry trace 1 (probability mass) and leave the
    density-matrix-only columns as NaN.
    """
    if t_end <= 0:
        raise ConfigError("t_end must be positive", field="t_end")
    if record_every < 1:
        raise ConfigError("record_every must be >= 1", field="record_every")
    n_steps = max(1, int(round(t_end / dt)))
    rows = {"t": [], "mean_x": [], "mean_p": [], "var_x": [], "var_p": []}

    def record():
        m = ensemble_moments(ens)
        rows["t"].append(ens.t)
        rows["mean_x"].append(m.mean_x)
        rows["mean_p"].append(m.mean_p)
        rows["var_x"].append(m.var_x)
        rows["var_p"].append(m.var_p)

    record()
    for k in range(n_steps):
        ens = step_langevin(ens, pot, bath, dt)
        if (k + 1) % record_every == 0 or k == n_steps - 1:
            record()
    series = DiagnosticSeries(
        t=np.array(rows["t"]),
        trace=np.ones(len(rows["t"])),
        purity=None,
        entropy_nats=None,
        coherence_len=None,
        mean_x=np.array(rows["mean_x"]),
        mean_p=np.array(rows["mean_p"]),
        var_x=np.array(rows["var_x"]),
        var_p=np.array(rows["var_p"]),
    )
    return ens, series


# --------------------------------------------------------------------------
# Lyapunov spectrum


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Benettin exponents (descending) with their convergence history.

    errors[i] is the last-decade drift |lambda_i(T) - lambda_i(T/10)|, the
    resolution at which the exponent is known.  For Hamiltonian flow the two
    exponents pair to zero; with friction the pair sums to -2 gamma.
    """

    exponents: Tuple[float, ...]
    pairs: int
    averaging_time: float
    renorm_interval: float
    errors: Tuple[float, ...] = ()
    gamma: float = 0.0
    trace_t: Optional[np.ndarray] = field(default=None, repr=False)
    trace_values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        exps = tuple(float(v) for v in self.exponents)
        if list(exps) != sorted(exps, reverse=True):
            raise ConfigError("exponents must be sorted descending")
        if len(exps) != 2 * self.pairs:
            raise ConfigError("exponent count must equal 2*pairs")
        object.__setattr__(self, "exponents", exps)

    def pairing_residual(self) -> float:
        """max_i |lambda_i + lambda_{2D+1-i} + 2 gamma| (zero for exact flow)."""
        lam = self.exponents
        n = len(lam)
        return max(abs(lam[i] + lam[n - 1 - i] + 2.0 * self.gamma) for i in range(n // 2))


def _tangent_kick(q, d2v, dt):
    # d(dp) = -V'' dx * dt applied to both tangent columns
    q[1] -= dt * d2v * q[0]


def _tangent_drift(q, mass, dt):
    q[0] += (dt / mass) * q[1]


def lyapunov_spectrum(
    pot: PotentialSpec,
    x0: Tuple[float, float],
    t_avg: float,
    renorm_interval: Optional[float] = None,
    dt: Optional[float] = None,
    gamma: float = 0.0,
    drift_tol: float = 0.10,
) -> LyapunovSpectrum:
    """Benettin algorithm on the (x, p) tangent space of the leapfrog flow.

    A driven potential's time dependence enters only through the force: the
    drive phase advances with t but is not a perturbed coordinate, so the
    spectrum stays two-dimensional.  The default renormalization interval is
    a tenth of the characteristic period at x0 (or 2*pi when V'' vanishes
    there).  Convergence: the running estimate must drift less than
    drift_tol relative to max(|lambda_max|, 30/t_avg) over the last decade
    of averaging; exponents below the 30/t_avg floor are indistinguishable
    from zero at this averaging time.
    """
    x, p = float(x0[0]), float(x0[1])
    mass = pot.m
    if renorm_interval is None:
        curv = abs(float(second_derivative(pot, x, 0.0)))
        omega = math.sqrt(curv / mass) if curv > 0 else 1.0
        renorm_interval = (2.0 * math.pi / omega) / 10.0
    if dt is None:
        dt = renorm_interval / 20.0
    n_sub = max(1, int(round(renorm_interval / dt)))
    dt = renorm_interval / n_sub
    n_renorms = max(2, int(round(t_avg / renorm_interval)))

    q = np.eye(2)
    cum = np.zeros(2)
    trace_t = np.empty(n_renorms)
    trace_vals = np.empty((n_renorms, 2))
    decay = math.exp(-2.0 * gamma * dt) if gamma > 0 else 1.0
    t = 0.0
    for k_re in range(n_renorms):
        for _ in range(n_sub):
            d2v0 = float(second_derivative(pot, x, t))
            p_half = p + 0.5 * dt * float(force(pot, x, t))
            _tangent_kick(q, d2v0, 0.5 * dt)
            x_new = x + (p_half / mass) * dt
            _tangent_drift(q, mass, dt)
            d2v1 = float(second_derivative(pot, x_new, t + dt))
            p_new = p_half + 0.5 * dt * float(force(pot, x_new, t + dt))
            _tangent_kick(q, d2v1, 0.5 * dt)
            x, p, t = x_new, p_new, t + dt
            if gamma > 0:
                p *= decay
                q[1] *= decay
        q, r = np.linalg.qr(q)
        diag = np.abs(np.diag(r))
        # qr sign convention can flip columns; magnitudes are what matter
        cum += np.log(diag)
        trace_t[k_re] = t
        trace_vals[k_re] = np.sort(cum / t)[::-1]

    lam = trace_vals[-1]
    total_t = trace_t[-1]
    k_decade = int(np.searchsorted(trace_t, total_t / 10.0))
    k_decade = min(k_decade, n_renorms - 2)
    drift = np.abs(lam - trace_vals[k_decade])
    scale = max(float(np.abs(lam).max()), 30.0 / total_t)
    if float(drift.max()) > drift_tol * scale:
        raise NotConverged(
            "Lyapunov drift %.3g over the last decade exceeds %.0f%% of scale %.3g"
            % (float(drift.max()), 100 * drift_tol, scale)
        )
    return LyapunovSpectrum(
        exponents=tuple(lam),
        pairs=1,
        averaging_time=total_t,
        renorm_interval=renorm_interval,
        errors=tuple(float(d) for d in drift),
        gamma=gamma,
        trace_t=trace_t,
        trace_values=trace_vals,
    )


def ks_entropy_rate(spec: LyapunovSpectrum) -> float:
    """Kolmogorov-Sinai rate: sum of exponents resolvably above zero.

    An exponent counts as positive when it exceeds three times its own
    convergence error, so near-zero pairs contribute exactly nothing.
    """
    errs = spec.errors if spec.errors else (0.0,) * len(spec.exponents)
    total = 0.0
    for lam, err in zip(spec.exponents, errs):
        if lam > 3.0 * err:
            total += lam
    return total
