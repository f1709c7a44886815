"""Hamiltonian catalog: potentials, forces, and the nonlinearity scale.

Every kind carries its own mass so a mismatched kinetic term cannot be
assembled silently.  Derivatives are analytic per kind; nothing here does
numerical differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError, UndefinedScale


@dataclass(frozen=True)
class Harmonic:
    """V(x) = m omega^2 x^2 / 2.  omega = 0 degenerates to a free particle."""

    m: float
    omega: float = 1.0

    analytic_only = False
    time_dependent = False

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError("mass must be positive", field="m")
        if self.omega < 0:
            raise ConfigError("omega must be >= 0", field="omega")

    def value(self, x, t=0.0):
        return 0.5 * self.m * self.omega**2 * np.asarray(x) ** 2

    def grad(self, x, t=0.0):
        return self.m * self.omega**2 * np.asarray(x)

    def d2(self, x, t=0.0):
        return np.full_like(np.asarray(x, dtype=float), self.m * self.omega**2)

    def d3(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))

    def d5(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class InvertedHarmonic:
    """V(x) = -m lam^2 x^2 / 2: saddle with divergence rate lam."""

    m: float
    lam: float

    analytic_only = False
    time_dependent = False

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError("mass must be positive", field="m")
        if self.lam <= 0:
            raise ConfigError("lam must be positive", field="lam")

    def value(self, x, t=0.0):
        return -0.5 * self.m * self.lam**2 * np.asarray(x) ** 2

    def grad(self, x, t=0.0):
        return -self.m * self.lam**2 * np.asarray(x)

    def d2(self, x, t=0.0):
        return np.full_like(np.asarray(x, dtype=float), -self.m * self.lam**2)

    def d3(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))

    def d5(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class QuarticDoubleWell:
    """V(x) = a x^4 - b x^2, wells at +-sqrt(b / 2a)."""

    m: float
    a: float
    b: float

    analytic_only = False
    time_dependent = False

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError("mass must be positive", field="m")
        if self.a <= 0:
            raise ConfigError("quartic coefficient a must be positive", field="a")

    def value(self, x, t=0.0):
        xa = np.asarray(x)
        return self.a * xa**4 - self.b * xa**2

    def grad(self, x, t=0.0):
        xa = np.asarray(x)
        return 4 * self.a * xa**3 - 2 * self.b * xa

    def d2(self, x, t=0.0):
        return 12 * self.a * np.asarray(x) ** 2 - 2 * self.b

    def d3(self, x, t=0.0):
        return 24 * self.a * np.asarray(x, dtype=float)

    def d5(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class DrivenDoubleWell:
    """V(x, t) = a x^4 - b x^2 + drive_amp x cos(drive_freq t).

    The defaults are the canonical chaotic set (wells at +-1, barrier 0.25,
    drive near the well frequency sqrt(2)): a large connected chaotic sea
    with lambda+ ~ 0.16, reproducible across initial conditions.
    """

    m: float
    a: float = 0.25
    b: float = 0.5
    drive_amp: float = 0.2
    drive_freq: float = 1.4

    analytic_only = False
    time_dependent = True

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError("mass must be positive", field="m")
        if self.a <= 0:
            raise ConfigError("quartic coefficient a must be positive", field="a")
        if self.drive_freq <= 0:
            raise ConfigError("drive_freq must be positive", field="drive_freq")

    def value(self, x, t=0.0):
        xa = np.asarray(x)
        return (
            self.a * xa**4
            - self.b * xa**2
            + self.drive_amp * xa * math.cos(self.drive_freq * t)
        )

    def grad(self, x, t=0.0):
        xa = np.asarray(x)
        return (
            4 * self.a * xa**3
            - 2 * self.b * xa
            + self.drive_amp * math.cos(self.drive_freq * t)
        )

    def d2(self, x, t=0.0):
        return 12 * self.a * np.asarray(x) ** 2 - 2 * self.b

    def d3(self, x, t=0.0):
        return 24 * self.a * np.asarray(x, dtype=float)

    def d5(self, x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GravityRadial:
    """V(x) = -gm m / x for x > 0.  Analytic-only: never handed to a grid
    evolver (the 1/x singularity has no place on a periodic grid)."""

    gm: float
    m: float

    analytic_only = True
    time_dependent = False

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError("mass must be positive", field="m")
        if self.gm <= 0:
            raise ConfigError("gm must be positive", field="gm")

    def _check_domain(self, x):
        if np.any(np.asarray(x) <= 0):
            raise DomainError("GravityRadial requires x > 0")

    def value(self, x, t=0.0):
        self._check_domain(x)
        return -self.gm * self.m / np.asarray(x)

    def grad(self, x, t=0.0):
        self._check_domain(x)
        return self.gm * self.m / np.asarray(x) ** 2

    def d2(self, x, t=0.0):
        self._check_domain(x)
        return -2 * self.gm * self.m / np.asarray(x) ** 3

    def d3(self, x, t=0.0):
        self._check_domain(x)
        return 6 * self.gm * self.m / np.asarray(x) ** 4

    def d5(self, x, t=0.0):
        self._check_domain(x)
        return 120 * self.gm * self.m / np.asarray(x) ** 6


PotentialSpec = Union[
    Harmonic, InvertedHarmonic, QuarticDoubleWell, DrivenDoubleWell, GravityRadial
]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Kinetic term p^2/2m plus a catalog potential.

    mass defaults to the potential's own; passing a different one is an
    error rather than a silent override.
    """

    potential: PotentialSpec
    mass: float = field(default=0.0)

    def __post_init__(self):
        if self.mass == 0.0:
            object.__setattr__(self, "mass", self.potential.m)
        elif self.mass != self.potential.m:
            raise ConfigError(
                "kinetic mass %r disagrees with potential mass %r"
                % (self.mass, self.potential.m),
                field="mass",
            )

    @property
    def time_dependent(self) -> bool:
        return self.potential.time_dependent


def potential_value(pot: PotentialSpec, x, t: float = 0.0):
    """V(x, t); time-independent kinds ignore t."""
    return pot.value(x, t)


def force(pot: PotentialSpec, x, t: float = 0.0):
    """-dV/dx, analytic."""
    return -pot.grad(x, t)


def second_derivative(pot: PotentialSpec, x, t: float = 0.0):
    return pot.d2(x, t)


def third_derivative(pot: PotentialSpec, x, t: float = 0.0):
    return pot.d3(x, t)


def fifth_derivative(pot: PotentialSpec, x, t: float = 0.0):
    return pot.d5(x, t)


@dataclass(frozen=True)
class NonlinearityScale:
    """chi plus a flag recording that the defining ratio came out negative
    and the absolute value was taken."""

    value: float
    negative_ratio: bool = False


def nonlinearity_scale(pot: PotentialSpec, x: float, t: float = 0.0) -> NonlinearityScale:
    """Length scale chi = sqrt(V' / V''') at which anharmonicity competes
    with the linear force.

    Vanishing third derivative gives an infinite scale (locally harmonic);
    a negative ratio is reported as sqrt|V'/V'''| with a flag.  GravityRadial
    returns the x/sqrt(2) convention used for orbital estimates.
    """
    if isinstance(pot, GravityRadial):
        pot._check_domain(x)
        return NonlinearityScale(value=float(x) / math.sqrt(2.0))
    g1 = float(pot.grad(x, t))
    g3 = float(pot.d3(x, t))
    if g3 == 0.0:
        if g1 == 0.0:
            raise UndefinedScale(
                "both dV/dx and d3V/dx3 vanish at x=%g; chi undefined" % x
            )
        return NonlinearityScale(value=math.inf)
    ratio = g1 / g3
    if ratio < 0:
        return NonlinearityScale(value=math.sqrt(-ratio), negative_ratio=True)
    return NonlinearityScale(value=math.sqrt(ratio))
