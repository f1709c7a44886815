"""High-temperature environment parameters and their derived scales."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .units import NATURAL, UnitsConfig


@dataclass(frozen=True)
class BathParams:
    """Ohmic bath acting on a particle of mass m.

    gamma is the relaxation rate in the momentum drift -2 gamma p; the
    momentum diffusion D = 2 m gamma k_B T = eta k_B T follows from the
    fluctuation-dissipation balance at temperature T.
    """

    gamma: float
    temperature: float
    mass: float
    units: UnitsConfig = field(default=NATURAL)

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0", field="gamma")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0", field="temperature")
        if self.mass <= 0:
            raise ConfigError("mass must be positive", field="mass")

    @property
    def eta(self) -> float:
        """Viscosity 2 m gamma."""
        return 2.0 * self.mass * self.gamma

    @property
    def diffusion(self) -> float:
        """Momentum diffusion D = eta k_B T."""
        return self.eta * self.units.k_B * self.temperature

    @property
    def lambda_dB(self) -> float:
        """Thermal de Broglie length; infinite at T = 0."""
        if self.temperature == 0.0:
            return math.inf
        return self.units.hbar / math.sqrt(
            2.0 * self.mass * self.units.k_B * self.temperature
        )

    @property
    def epsilon(self) -> float:
        """Coupling strength sqrt(4 m eta)."""
        return math.sqrt(4.0 * self.mass * self.eta)

    @property
    def is_off(self) -> bool:
        return self.gamma == 0.0


def bath_off(mass: float, units: UnitsConfig = NATURAL) -> BathParams:
    """Unitary limit: gamma = 0 forces D = 0."""
    return BathParams(gamma=0.0, temperature=0.0, mass=mass, units=units)
