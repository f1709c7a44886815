"""Periodic position grid, density matrices, and the Wigner picture.

Conventions
-----------
The grid holds n points x_j = x_min + j*dx with dx = (x_max - x_min)/n; the
right endpoint is excluded (periodic topology). The conjugate momentum grid has
spacing dp = 2*pi*hbar/(n*dx), so dx*dp*n = 2*pi*hbar exactly.

A density matrix is the complex n x n kernel rho(x, x') with trace weight dx:
Tr rho = sum_j rho[j, j] * dx. Pure states are rho = psi psi^dagger with
sum |psi|^2 dx = 1.

The Wigner transform is evaluated by a DFT along grid anti-diagonals,

    W(x, p) = (1/(pi*hbar)) * sum_y rho(x+y, x-y) e^{-2 i p y / hbar} dy,

with y running over grid offsets. Sampling y in steps of dx makes the natural
momentum axis of W twice as fine as the density-matrix momentum grid and half
as wide: the field carries its own axis `p` with spacing dp/2 spanning
+-pi*hbar/(2*dx). Normalization sum W dx dp_w = Tr rho and the purity identity
2*pi*hbar * sum W^2 dx dp_w = Tr rho^2 hold exactly in this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridTooSmall, NonPositiveSpectrum, NotNormalizable
from .units import UnitsConfig

_MARGIN_SIGMAS = 5.0


def _frozen(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic position grid and its conjugate momentum grid."""

    n: int
    x_min: float
    x_max: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError("n must be a power of two >= 16")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def dp(self) -> float:
        return 2.0 * math.pi * self.hbar / (self.n * self.dx)

    @property
    def x(self) -> np.ndarray:
        return _frozen(self.x_min + self.dx * np.arange(self.n))

    @property
    def p(self) -> np.ndarray:
        """Momentum grid in FFT (wrap-around) order."""
        return _frozen(2.0 * math.pi * self.hbar * np.fft.fftfreq(self.n, d=self.dx))

    @property
    def center(self) -> float:
        return 0.5 * (self.x_min + self.x_max)

    @classmethod
    def from_units(cls, n, x_min, x_max, units: UnitsConfig):
        return cls(n=n, x_min=x_min, x_max=x_max, hbar=units.hbar)


@dataclass
class DensityMatrix:
    """Position-representation density matrix on a SpatialGrid."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError("values must be n x n for the grid")
        self.values = vals

    def trace(self) -> float:
        return float(np.real(np.trace(self.values)) * self.grid.dx)

    def purity(self) -> float:
        # Tr rho^2 = sum |rho_ab|^2 dx^2 for Hermitian rho.
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx**2)

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of the trace-weighted operator (sums to the trace)."""
        return np.linalg.eigvalsh(self.values * self.grid.dx)

    def validate(self, check_spectrum=False, trace_tol=1e-6, herm_tol=1e-12):
        if self.hermiticity_residual() > herm_tol:
            raise DomainError("density matrix is not Hermitian within tolerance")
        if abs(self.trace() - 1.0) > trace_tol:
            raise DomainError(f"trace {self.trace():.9f} differs from 1")
        if check_spectrum:
            lo = float(self.eigenvalues().min())
            if lo < -1e-8:
                raise NonPositiveSpectrum(f"min eigenvalue {lo:.3e}")
        return self

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.grid, self.values.copy())

    @classmethod
    def from_wavefunction(cls, grid: SpatialGrid, psi: np.ndarray):
        psi = np.asarray(psi, dtype=np.complex128)
        return cls(grid, np.outer(psi, psi.conj()))


@dataclass
class WignerField:
    """Real phase-space field W(x, p) produced by `wigner_transform`.

    `p` is the field's own momentum axis (ascending, spacing grid.dp/2); it is
    finer and narrower than the density-matrix momentum grid, see module notes.
    """

    grid: SpatialGrid
    values: np.ndarray
    p: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError("values must be n x n for the grid")
        self.values = vals
        if self.p is None:
            self.p = wigner_momentum_axis(self.grid)
        self.p = _frozen(np.asarray(self.p, dtype=np.float64))

    @property
    def dp_w(self) -> float:
        return 0.5 * self.grid.dp

    def normalization(self) -> float:
        return float(self.values.sum() * self.grid.dx * self.dp_w)

    def bound(self) -> float:
        return 1.0 / (math.pi * self.grid.hbar)


def wigner_momentum_axis(grid: SpatialGrid) -> np.ndarray:
    half = 0.5 * grid.dp
    return _frozen(half * (np.arange(grid.n) - grid.n // 2))


# --------------------------------------------------------------------------
# initial states


@dataclass(frozen=True)
class Gaussian:
    """Minimum-uncertainty packet: position spread dx_sigma, Delta p = hbar/(2 dx_sigma)."""

    x0: float
    p0: float
    dx_sigma: float

    def __post_init__(self):
        if self.dx_sigma <= 0:
            raise ValueError("dx_sigma must be positive")


@dataclass(frozen=True)
class CatPair:
    """Two coherent Gaussian packets separated by delta_x, common momentum p0."""

    x0: float
    p0: float
    dx_sigma: float
    delta_x: float

    def __post_init__(self):
        if self.dx_sigma <= 0:
            raise ValueError("dx_sigma must be positive")
        if self.delta_x <= 0:
            raise ValueError("delta_x must be positive")


@dataclass(frozen=True)
class Custom:
    """Arbitrary amplitude table on the grid; normalized on construction."""

    amplitudes: tuple

    @classmethod
    def from_array(cls, arr):
        return cls(amplitudes=tuple(np.asarray(arr, dtype=np.complex128).tolist()))


InitialState = Gaussian | CatPair | Custom


def _gaussian_amplitudes(grid, x0, p0, sigma):
    x = grid.x
    norm = (2.0 * math.pi * sigma**2) ** -0.25
    return norm * np.exp(
        -((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x / grid.hbar
    )


def _check_margin(grid, centers, sigma):
    margin = _MARGIN_SIGMAS * sigma
    for c in centers:
        if c - margin < grid.x_min or c + margin > grid.x_max:
            raise GridTooSmall(
                f"state support around x={c:g} (+-{margin:g}) exceeds "
                f"[{grid.x_min:g}, {grid.x_max:g}]"
            )


def state_wavefunction(grid: SpatialGrid, state: InitialState) -> np.ndarray:
    """Normalized wavefunction for an initial-state spec on the grid."""
    if isinstance(state, Gaussian):
        _check_margin(grid, [state.x0], state.dx_sigma)
        psi = _gaussian_amplitudes(grid, state.x0, state.p0, state.dx_sigma)
    elif isinstance(state, CatPair):
        half = 0.5 * state.delta_x
        _check_margin(grid, [state.x0 - half, state.x0 + half], state.dx_sigma)
        psi = _gaussian_amplitudes(
            grid, state.x0 - half, state.p0, state.dx_sigma
        ) + _gaussian_amplitudes(grid, state.x0 + half, state.p0, state.dx_sigma)
    elif isinstance(state, Custom):
        psi = np.asarray(state.amplitudes, dtype=np.complex128)
        if psi.shape != (grid.n,):
            raise ValueError("custom amplitude table must have length n")
    else:
        raise TypeError(f"unknown initial-state kind {type(state).__name__}")
    nrm2 = float(np.sum(np.abs(psi) ** 2) * grid.dx)
    if not np.isfinite(nrm2) or nrm2 <= 0.0:
        raise NotNormalizable("state has zero or non-finite norm")
    return psi / math.sqrt(nrm2)


def build_density_matrix(grid: SpatialGrid, state: InitialState) -> DensityMatrix:
    """Pure density matrix for an initial-state spec; trace normalized to 1."""
    psi = state_wavefunction(grid, state)
    rho = DensityMatrix.from_wavefunction(grid, psi)
    return rho


# --------------------------------------------------------------------------
# Wigner transform

def _alt_signs(n):
    """(-1)^j as an exact float array (n is a multiple of 4, so no phase residue)."""
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def _antidiagonals(values, n):
    """A[i, j] = rho[i+j', i-j'] with centered offset j' = j - n/2, zero off-grid."""
    a = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n)
    for j in range(n):
        off = j - n // 2
        i0 = abs(off)
        i1 = n - abs(off)
        if i1 > i0:
            i = idx[i0:i1]
            a[i, j] = values[i + off, i - off]
    return a


def wigner_transform(rho: DensityMatrix) -> WignerField:
    """Wigner function of rho on the half-step momentum axis (see module notes).

    W[i, m] = (dx/(pi hbar)) sum_j rho(x_i + j'dx, x_i - j'dx) e^{-2 pi i m'j'/n}
    with centered indices j' = j - n/2, m' = m - n/2; the sign bookkeeping
    reduces the centered transform to a plain FFT with (-1)^j pre/post factors.
    """
    grid = rho.grid
    n = grid.n
    a = _antidiagonals(rho.values, n)
    s = _alt_signs(n)
    f = np.fft.fft(a * s[np.newaxis, :], axis=1)
    w = np.real(f * s[np.newaxis, :]) * (grid.dx / (math.pi * grid.hbar))
    return WignerField(grid, w)


def inverse_wigner_transform(w: WignerField) -> DensityMatrix:
    """Reconstruct rho from a Wigner field produced by `wigner_transform`.

    The anti-diagonal DFT is inverted exactly for matrix elements of even index
    parity; the remaining checkerboard is filled by spectral completion, exact
    for states band-limited to half the grid Nyquist range (which the grid
    margin preconditions on state construction keep comfortably true).
    """
    grid = w.grid
    n = grid.n
    s = _alt_signs(n)
    f = w.values * s[np.newaxis, :] * (math.pi * grid.hbar / grid.dx)
    a = np.fft.ifft(f, axis=1) * s[np.newaxis, :]
    rho_e = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n)
    for j in range(n):
        off = j - n // 2
        i0 = abs(off)
        i1 = n - abs(off)
        if i1 > i0:
            i = idx[i0:i1]
            rho_e[i + off, i - off] = a[i, j]
    # Zeroing odd-parity sites halves the spectrum and adds an alias shifted by
    # (n/2, n/2); keep the copy nearer the origin and double it.
    spec = np.fft.fft2(rho_e)
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    ksum = k[:, None] + k[None, :]
    spec = np.where(ksum < n / 2.0, 2.0 * spec, np.where(ksum == n / 2.0, spec, 0.0))
    rho = np.fft.ifft2(spec)
    return DensityMatrix(grid, rho)


# --------------------------------------------------------------------------
# scalar diagnostics


def von_neumann_entropy(rho: DensityMatrix, clamp=1e-14) -> float:
    """-Tr rho ln rho in nats; eigenvalues below `clamp` treated as exact zeros."""
    evals = rho.eigenvalues()
    lo = float(evals.min())
    if lo < -1e-6:
        raise NonPositiveSpectrum(f"eigenvalue {lo:.3e} below -1e-6")
    lam = evals[evals > clamp]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log(lam)))


def coherence_length(rho: DensityMatrix) -> float:
    """Intensity-weighted off-diagonal width of rho.

    Second moment of |rho(xbar + u/2, xbar - u/2)|^2 along u = x - x',
    marginalized over the center xbar: a pure Gaussian of position spread
    sigma gives sqrt(2)*sigma; a diagonal (fully decohered) matrix gives 0.
    """
    n = rho.grid.n
    dx = rho.grid.dx
    w2 = np.abs(rho.values) ** 2
    offsets = np.arange(-(n - 1), n)
    g = np.array([np.trace(w2, offset=k) for k in range(-(n - 1), n)])
    u = offsets * dx
    total = g.sum()
    if total <= 0:
        raise DomainError("empty density matrix")
    return float(math.sqrt(np.sum(g * u**2) / total))


def position_moments(rho: DensityMatrix):
    """(mean_x, var_x) from the diagonal; diagonal renormalized internally."""
    diag = np.real(np.diag(rho.values)).clip(min=0.0)
    w = diag / diag.sum()
    x = rho.grid.x
    mean = float(np.sum(w * x))
    var = float(np.sum(w * (x - mean) ** 2))
    return mean, var


def momentum_moments(rho: DensityMatrix):
    """(mean_p, var_p) via spectral derivatives of rho along the ket index."""
    grid = rho.grid
    k = grid.p / grid.hbar  # wavenumbers in fft order
    ft = np.fft.fft(rho.values, axis=0)
    d1 = np.fft.ifft(1j * k[:, None] * ft, axis=0)
    d2 = np.fft.ifft(-(k[:, None] ** 2) * ft, axis=0)
    mean = float(np.real(np.sum(np.diag(-1j * grid.hbar * d1))) * grid.dx)
    p2 = float(np.real(np.sum(np.diag(-(grid.hbar**2) * d2))) * grid.dx)
    tr = rho.trace()
    mean /= tr
    p2 /= tr
    return mean, p2 - mean**2


def wavefunction_momentum_moments(grid: SpatialGrid, psi: np.ndarray):
    k = grid.p / grid.hbar
    ft = np.fft.fft(psi)
    w = np.abs(ft) ** 2
    w /= w.sum()
    mean = float(np.sum(w * grid.hbar * k))
    var = float(np.sum(w * (grid.hbar * k - mean) ** 2))
    return mean, var
