"""Series containers and the analysis ops tying the evolvers together.

A DiagnosticSeries is the common currency of the package: the quantum and
classical runners both emit one, the CSV layer serializes one row per sample
time, and the fits below (entropy slope, breakdown time) consume them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .bath import BathParams
from .errors import ConfigError, MismatchedSeries, WindowTooSparse, ZeroBath

_COLUMNS = (
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


@dataclass
class DiagnosticSeries:
    """Sampled run diagnostics; missing columns are NaN-filled.

    provenance carries scenario_id, seed, and config_hash so downstream
    comparisons can refuse to mix incompatible runs.
    """

    t: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    entropy_nats: np.ndarray
    coherence_len: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    moyal_ratio: Optional[np.ndarray] = None
    provenance: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or len(self.t) == 0:
            raise ConfigError("series needs at least one row")
        if np.any(np.diff(self.t) <= 0):
            raise ConfigError("sample times must be strictly increasing")
        n = len(self.t)
        for name in _COLUMNS[1:]:
            col = getattr(self, name)
            if col is None:
                if name == "moyal_ratio":
                    continue
                col = np.full(n, np.nan)
            col = np.asarray(col, dtype=float)
            if col.shape != (n,):
                raise ConfigError("column %s has %d rows, expected %d" % (name, col.size, n))
            setattr(self, name, col)

    def __len__(self):
        return len(self.t)

    @property
    def columns(self):
        return _COLUMNS

    def column(self, name: str) -> Optional[np.ndarray]:
        if name not in _COLUMNS:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class CriticalScales:
    """Standoff scales between chaotic stretching and decoherent diffusion."""

    l_c: float
    sigma_c: float
    chi: float
    classical_flag: bool


def critical_scales(bath: BathParams, lam: float, chi: float) -> CriticalScales:
    """l_c = hbar sqrt(lam / 2D) and sigma_c = sqrt(2D / lam).

    Their product is hbar identically.  classical_flag marks l_c smaller
    than chi by the documented factor 1e-2.
    """
    if lam <= 0:
        raise ConfigError("lam must be positive", field="lam")
    if chi <= 0:
        raise ConfigError("chi must be positive", field="chi")
    d = bath.diffusion
    if d == 0.0:
        raise ZeroBath("critical scales undefined at D = 0")
    hbar = bath.units.hbar
    l_c = hbar * math.sqrt(lam / (2.0 * d))
    sigma_c = math.sqrt(2.0 * d / lam)
    return CriticalScales(
        l_c=l_c, sigma_c=sigma_c, chi=chi, classical_flag=(l_c < 1e-2 * chi)
    )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    r_squared: float


def linear_fit(x: np.ndarray, y: np.ndarray) -> FitResult:
    """Ordinary least squares with the slope's standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = len(x)
    xm = x - x.mean()
    sxx = float(xm @ xm)
    if sxx == 0.0:
        raise ConfigError("degenerate abscissa for linear fit")
    slope = float(xm @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float((y - y.mean()) @ (y - y.mean()))
    stderr = math.sqrt(ss_res / (k - 2) / sxx) if k > 2 else math.nan
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(slope=slope, intercept=intercept, stderr=stderr, r_squared=r_squared)


def entropy_production_rate(series: DiagnosticSeries, window) -> FitResult:
    """OLS slope of entropy vs t inside the post-transient window."""
    t_a, t_b = window
    mask = (series.t >= t_a) & (series.t <= t_b)
    if int(mask.sum()) < 10:
        raise WindowTooSparse(
            "only %d samples in [%g, %g]; need >= 10" % (int(mask.sum()), t_a, t_b)
        )
    return linear_fit(series.t[mask], series.entropy_nats[mask])


def correspondence_breakdown_time(
    q: DiagnosticSeries,
    c: DiagnosticSeries,
    threshold: float,
    char_length: float,
) -> float:
    """First time |<x>_q - <x>_c| exceeds threshold * char_length.

    Returns +inf when the two series never separate.
    """
    if not 0 < threshold < 1:
        raise ConfigError("threshold must lie in (0, 1)", field="threshold")
    if char_length <= 0:
        raise ConfigError("char_length must be positive", field="char_length")
    if len(q) != len(c) or not np.allclose(q.t, c.t, rtol=0, atol=1e-12):
        raise MismatchedSeries("sample times differ")
    sid_q = q.provenance.get("scenario_id")
    sid_c = c.provenance.get("scenario_id")
    if sid_q is not None and sid_c is not None and sid_q != sid_c:
        raise MismatchedSeries("scenario ids differ: %r vs %r" % (sid_q, sid_c))
    seed_q = q.provenance.get("seed")
    seed_c = c.provenance.get("seed")
    if seed_q is not None and seed_c is not None and seed_q != seed_c:
        warnings.warn("comparing series with different seeds (%s vs %s)" % (seed_q, seed_c))
    gap = np.abs(q.mean_x - c.mean_x)
    hits = np.nonzero(gap > threshold * char_length)[0]
    if hits.size == 0:
        return math.inf
    return float(q.t[hits[0]])


def eigenstate_count_proxy(entropy_nats):
    """exp(entropy): participation-style count of contributing eigenstates."""
    return np.exp(entropy_nats)
