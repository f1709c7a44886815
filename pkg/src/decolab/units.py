"""Unit system: hbar/k_B configuration and a minimal dimensioned-quantity type.

The evolvers work in natural units (plain floats, hbar taken from UnitsConfig).
The timescale estimators work with `Quantity` values carrying base-dimension
exponents (length, mass, time, temperature) so that formula misuse fails loudly
instead of silently producing numbers in the wrong unit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnitMismatch

# Base-dimension exponent tuples (length, mass, time, temperature).
DIMENSIONLESS = (0, 0, 0, 0)
LENGTH = (1, 0, 0, 0)
MASS = (0, 1, 0, 0)
TIME = (0, 0, 1, 0)
TEMPERATURE = (0, 0, 0, 1)
RATE = (0, 0, -1, 0)
VELOCITY = (1, 0, -1, 0)
MOMENTUM = (1, 1, -1, 0)
ENERGY = (2, 1, -2, 0)
ACTION = (2, 1, -1, 0)
# Momentum-diffusion coefficient d<p^2>/dt.
MOMENTUM_DIFFUSION = (2, 2, -3, 0)
# Boltzmann constant: energy per temperature.
ENERGY_PER_TEMPERATURE = (2, 1, -2, -1)

_DIM_NAMES = ("cm", "g", "s", "K")


def _dim_str(dim):
    parts = [f"{n}^{e}" for n, e in zip(_DIM_NAMES, dim) if e != 0]
    return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class Quantity:
    """A float tagged with base-dimension exponents.

    Supports *, /, ** and same-dimension +/-. Comparisons require matching
    dimensions. `in_units_of` divides out a reference quantity and checks the
    result is dimensionless.
    """

    value: float
    dim: tuple = DIMENSIONLESS

    def _require(self, other, op):
        if not isinstance(other, Quantity):
            other = Quantity(float(other))
        if self.dim != other.dim:
            raise UnitMismatch(
                f"cannot {op} {_dim_str(self.dim)} and {_dim_str(other.dim)}"
            )
        return other

    def __add__(self, other):
        other = self._require(other, "add")
        return Quantity(self.value + other.value, self.dim)

    def __sub__(self, other):
        other = self._require(other, "subtract")
        return Quantity(self.value - other.value, self.dim)

    def __mul__(self, other):
        if not isinstance(other, Quantity):
            return Quantity(self.value * float(other), self.dim)
        dim = tuple(a + b for a, b in zip(self.dim, other.dim))
        return Quantity(self.value * other.value, dim)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Quantity):
            return Quantity(self.value / float(other), self.dim)
        dim = tuple(a - b for a, b in zip(self.dim, other.dim))
        return Quantity(self.value / other.value, dim)

    def __rtruediv__(self, other):
        return Quantity(float(other)) / self

    def __pow__(self, expo):
        dim = tuple(a * expo for a in self.dim)
        if any(abs(d - round(d)) > 1e-12 for d in dim):
            raise UnitMismatch(f"power {expo} gives non-integer dimension")
        return Quantity(self.value**expo, tuple(int(round(d)) for d in dim))

    def __neg__(self):
        return Quantity(-self.value, self.dim)

    def __lt__(self, other):
        return self.value < self._require(other, "compare").value

    def __le__(self, other):
        return self.value <= self._require(other, "compare").value

    def sqrt(self):
        dim = tuple(d / 2 for d in self.dim)
        if any(abs(d - round(d)) > 1e-12 for d in dim):
            raise UnitMismatch("sqrt gives non-integer dimension")
        return Quantity(self.value**0.5, tuple(int(round(d)) for d in dim))

    def require_dim(self, dim, what="quantity"):
        if self.dim != dim:
            raise UnitMismatch(
                f"{what} must be {_dim_str(dim)}, got {_dim_str(self.dim)}"
            )
        return self

    def dimensionless_value(self):
        self.require_dim(DIMENSIONLESS)
        return self.value


def quantity(value, dim=DIMENSIONLESS):
    return Quantity(float(value), dim)


@dataclass(frozen=True)
class UnitsConfig:
    """Numeric values of hbar and k_B in the working unit system."""

    hbar: float = 1.0
    k_B: float = 1.0
    label: str = "natural"

    def __post_init__(self):
        if self.hbar <= 0 or self.k_B <= 0:
            raise ValueError("hbar and k_B must be positive")


NATURAL = UnitsConfig()

# CGS values used by the celestial presets.
HBAR_CGS = Quantity(1.055e-27, ACTION)
K_B_CGS = Quantity(1.380649e-16, ENERGY_PER_TEMPERATURE)
CGS = UnitsConfig(hbar=1.055e-27, k_B=1.380649e-16, label="cgs")

SECONDS_PER_YEAR = 3.156e7
