"""Closed-form predictability and decoherence timescales, with celestial presets.

Every estimator takes and returns `Quantity` values so that a momentum passed
where a length belongs fails with UnitMismatch instead of silently producing a
number in the wrong unit.  Preset numerics are cgs throughout.

Provenance policy for preset inputs: values that are standard published
numbers carry a "stated" tag in `sources`; quantities that require a modeling
choice made here (Hyperion's chi and dp0, the interplanetary-gas drag rate)
carry an "assumption" tag and are documented at the definition site.  Derived
headline outputs are regression-locked by the test suite, with loose physical
tolerances (factor 2, order of magnitude) wherever the input pairing is an
assumption.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .bath import BathParams
from .diagnostics import critical_scales
from .errors import ConfigError, SubPlanckAction, SubPlanckPatch, ZeroBath
from .units import (
    ACTION,
    CGS,
    HBAR_CGS,
    K_B_CGS,
    LENGTH,
    MASS,
    MOMENTUM,
    RATE,
    SECONDS_PER_YEAR,
    TEMPERATURE,
    TIME,
    Quantity,
)

# Dimension tuples local to this module (length, mass, time, temperature).
GRAV_PARAMETER = (3, 0, -2, 0)  # G*M, cm^3 s^-2
NUMBER_DENSITY = (-3, 0, 0, 0)

SECONDS_PER_DAY = 86400.0

# cgs constants feeding the presets.
GRAVITATIONAL_CONSTANT = Quantity(6.674e-8, (3, -1, -2, 0))
M_SUN = Quantity(1.989e33, MASS)
M_JUPITER = Quantity(1.898e30, MASS)
R_JUPITER_ORBIT = Quantity(7.78e13, LENGTH)
R_JUPITER_BODY = Quantity(7.149e9, LENGTH)
TAU_JUPITER = Quantity(11.86 * SECONDS_PER_YEAR, TIME)
M_HYPERION = Quantity(5.6e21, MASS)
R_HYPERION_ORBIT = Quantity(1.481e11, LENGTH)  # around Saturn
R_HYPERION_BODY = Quantity(1.35e7, LENGTH)  # mean radius, "assumption" grade
M_HYDROGEN = Quantity(1.673e-24, MASS)


def _positive(q: Quantity, name: str) -> Quantity:
    if not q.value > 0:
        raise ConfigError(f"{name} must be positive", field=name)
    return q


def t_hbar(lam: Quantity, dp0: Quantity, chi: Quantity, hbar: Quantity) -> Quantity:
    """Predictability horizon lam^-1 ln(dp0 chi / hbar).

    The time for an initially well-localized state, stretched by exponential
    instability at rate lam, to develop coherence across the nonlinearity
    scale chi of the potential.
    """
    _positive(lam.require_dim(RATE, "lam"), "lam")
    _positive(dp0.require_dim(MOMENTUM, "dp0"), "dp0")
    _positive(chi.require_dim(LENGTH, "chi"), "chi")
    _positive(hbar.require_dim(ACTION, "hbar"), "hbar")
    patch = (dp0 * chi / hbar).dimensionless_value()
    if patch <= 1.0:
        raise SubPlanckPatch(
            f"dp0*chi = {patch:.3g} hbar: no room for coherence growth"
        )
    return (1.0 / lam) * math.log(patch)


def t_r(lam: Quantity, action_i: Quantity, hbar: Quantity) -> Quantity:
    """Upper bound lam^-1 ln(I / hbar) from the total action budget I."""
    _positive(lam.require_dim(RATE, "lam"), "lam")
    _positive(action_i.require_dim(ACTION, "action_i"), "action_i")
    _positive(hbar.require_dim(ACTION, "hbar"), "hbar")
    ratio = (action_i / hbar).dimensionless_value()
    if ratio <= 1.0:
        raise SubPlanckAction(f"I = {ratio:.3g} hbar: bound undefined")
    return (1.0 / lam) * math.log(ratio)


def tau_d(bath: BathParams, delta_x: Quantity) -> Quantity:
    """Decoherence time gamma^-1 (Lambda_dB / delta_x)^2 for separation delta_x.

    Infinite at temperature zero (Lambda_dB diverges); ZeroBath when the
    coupling itself is off.
    """
    if bath.is_off:
        raise ZeroBath("tau_d undefined at gamma = 0")
    _positive(delta_x.require_dim(LENGTH, "delta_x"), "delta_x")
    lam_db = Quantity(bath.lambda_dB, LENGTH)
    gamma = Quantity(bath.gamma, RATE)
    return (1.0 / gamma) * ((lam_db / delta_x) ** 2).dimensionless_value()


@dataclass(frozen=True)
class CoherenceGrowth:
    """Momentum-space contraction and the matching coherence-length growth."""

    delta_p: Quantity
    ell: Quantity


def coherence_growth(
    dp0: Quantity, lam: Quantity, hbar: Quantity, t: Quantity
) -> CoherenceGrowth:
    """(dp0 e^{-lam t}, (hbar/dp0) e^{lam t}); the product stays hbar.

    ell is a lower bound on the coherence length; it is reported as the
    estimate.  At t = t_hbar(lam, dp0, chi, hbar) it reaches chi exactly.
    """
    _positive(dp0.require_dim(MOMENTUM, "dp0"), "dp0")
    _positive(lam.require_dim(RATE, "lam"), "lam")
    _positive(hbar.require_dim(ACTION, "hbar"), "hbar")
    t.require_dim(TIME, "t")
    if t.value < 0:
        raise ConfigError("t must be >= 0", field="t")
    phase = (lam * t).dimensionless_value()
    return CoherenceGrowth(
        delta_p=dp0 * math.exp(-phase),
        ell=(hbar / dp0) * math.exp(phase),
    )


def solar_action(
    gm_sun: Quantity, m_j: Quantity, r_j: Quantity, tau_j: Quantity
) -> Quantity:
    """Orbital action budget (G M_sun m / R) tau: binding-energy scale times period."""
    _positive(gm_sun.require_dim(GRAV_PARAMETER, "gm_sun"), "gm_sun")
    m_j.require_dim(MASS, "m_j")
    if m_j.value < 0:
        raise ConfigError("m_j must be >= 0", field="m_j")
    _positive(r_j.require_dim(LENGTH, "r_j"), "r_j")
    _positive(tau_j.require_dim(TIME, "tau_j"), "tau_j")
    return (gm_sun * m_j / r_j * tau_j).require_dim(ACTION, "solar_action result")


def standoff_check(bath: BathParams, lam: Quantity, delta_x: Quantity) -> float:
    """tau_d(delta_x) * lam: near 1 at the scale where decoherence and
    chaotic stretching run at comparable rates."""
    if bath.is_off:
        raise ZeroBath("standoff undefined at gamma = 0")
    lam.require_dim(RATE, "lam")
    if lam.value < 0:
        raise ConfigError("lam must be >= 0", field="lam")
    if lam.value == 0.0:
        return 0.0
    return (tau_d(bath, delta_x) * lam).dimensionless_value()


def standoff_scale(bath: BathParams, lam: Quantity) -> Quantity:
    """Root of tau_d(delta_x) lam = 1: delta_x* = Lambda_dB sqrt(lam/gamma).

    Exceeds critical_scales().l_c by exactly sqrt(2); the balance condition
    drops the factor 2 that the diffusive-rate definition of l_c keeps.
    """
    if bath.is_off:
        raise ZeroBath("standoff scale undefined at gamma = 0")
    lam.require_dim(RATE, "lam")
    if lam.value < 0:
        raise ConfigError("lam must be >= 0", field="lam")
    lam_db = Quantity(bath.lambda_dB, LENGTH)
    gamma = Quantity(bath.gamma, RATE)
    return lam_db * (lam / gamma).dimensionless_value() ** 0.5


def gas_drag_gamma(
    body_mass: Quantity,
    body_radius: Quantity,
    number_density: Quantity,
    temperature: Quantity,
    gas_particle_mass: Quantity = M_HYDROGEN,
) -> Quantity:
    """Order-of-magnitude drag rate on a sphere moving through dilute gas.

    Kinetic collision model: mean thermal speed v = sqrt(8 k_B T / pi m_gas),
    geometric cross-section sigma = pi R^2, momentum-transfer force
    F ~ n sigma v m_gas u on a body at speed u.  Matching dp/dt = -2 gamma p
    gives gamma = n sigma v m_gas / (2 M).  Good to a factor of a few at
    best; meant only for coherence-length demos, not quantitative drag.
    """
    _positive(body_mass.require_dim(MASS, "body_mass"), "body_mass")
    _positive(body_radius.require_dim(LENGTH, "body_radius"), "body_radius")
    _positive(number_density.require_dim(NUMBER_DENSITY, "number_density"), "number_density")
    _positive(temperature.require_dim(TEMPERATURE, "temperature"), "temperature")
    _positive(gas_particle_mass.require_dim(MASS, "gas_particle_mass"), "gas_particle_mass")
    v_mean = ((K_B_CGS * temperature / gas_particle_mass) * (8.0 / math.pi)).sqrt()
    sigma = body_radius**2 * math.pi
    rate = number_density * sigma * v_mean * gas_particle_mass / (body_mass * 2.0)
    return rate.require_dim(RATE, "gas_drag_gamma result")


def interplanetary_bath(
    body_mass: Quantity,
    body_radius: Quantity,
    number_density: Quantity,
    temperature: Quantity,
) -> BathParams:
    """cgs BathParams with gamma from the kinetic gas-drag model."""
    gamma = gas_drag_gamma(body_mass, body_radius, number_density, temperature)
    return BathParams(
        gamma=gamma.value,
        temperature=temperature.value,
        mass=body_mass.value,
        units=CGS,
    )


@dataclass(frozen=True)
class CelestialPreset:
    """Read-only input set for one headline system.

    Optional fields are None where the system does not define them (the solar
    system as a whole has an action budget but no single chi; Jupiter and
    Hyperion have the reverse).  `bath`, when present, is the documented
    gas-drag model and must be cgs like every other preset number.
    """

    name: str
    lyapunov_rate: Quantity
    action_I: Optional[Quantity] = None
    dp0: Optional[Quantity] = None
    chi: Optional[Quantity] = None
    bath: Optional[BathParams] = None
    bath_note: str = ""
    sources: tuple = ()

    def __post_init__(self):
        _positive(self.lyapunov_rate.require_dim(RATE, "lyapunov_rate"), "lyapunov_rate")
        for field_name, dim in (
            ("action_I", ACTION),
            ("dp0", MOMENTUM),
            ("chi", LENGTH),
        ):
            q = getattr(self, field_name)
            if q is not None:
                _positive(q.require_dim(dim, field_name), field_name)
        if self.bath is not None and self.bath.units.label != "cgs":
            raise ConfigError("preset bath must be cgs", field="bath")


_GAS_DENSITY = Quantity(0.1, NUMBER_DENSITY)
_GAS_TEMPERATURE = Quantity(100.0, TEMPERATURE)
_GAS_NOTE = (
    "0.1 H atoms/cm^3 at 100 K; geometric-cross-section kinetic drag "
    "(order of magnitude only)"
)

LAMBDA_SOLAR = Quantity(1.0 / (4.0e6 * SECONDS_PER_YEAR), RATE)
LAMBDA_HYPERION = Quantity(1.0 / (42.0 * SECONDS_PER_DAY), RATE)

SOLAR_ACTION_I = solar_action(
    GRAVITATIONAL_CONSTANT * M_SUN, M_JUPITER, R_JUPITER_ORBIT, TAU_JUPITER
)

SOLAR_SYSTEM = CelestialPreset(
    name="solar_system",
    lyapunov_rate=LAMBDA_SOLAR,
    action_I=SOLAR_ACTION_I,
    bath_note="none: action-budget bound only",
    sources=(
        "lyapunov_rate: stated, (4e6 yr)^-1",
        "action_I: derived, G M_sun M_J / R_orbit x tau_J",
    ),
)

JUPITER = CelestialPreset(
    name="jupiter",
    lyapunov_rate=LAMBDA_SOLAR,
    dp0=Quantity(1.0e9, MOMENTUM),
    chi=R_JUPITER_ORBIT * (1.0 / math.sqrt(2.0)),
    bath=interplanetary_bath(
        M_JUPITER, R_JUPITER_BODY, _GAS_DENSITY, _GAS_TEMPERATURE
    ),
    bath_note=_GAS_NOTE,
    sources=(
        "lyapunov_rate: stated, (4e6 yr)^-1",
        "dp0: stated, 1e9 g cm/s",
        "chi: convention, R_orbit/sqrt(2)",
        "bath: assumption, kinetic drag model",
    ),
)

HYPERION = CelestialPreset(
    name="hyperion",
    lyapunov_rate=LAMBDA_HYPERION,
    # dp0 and chi are modeling choices: thermal momentum spread at the gas
    # temperature, and the same R_orbit/sqrt(2) convention as Jupiter.
    dp0=(M_HYPERION * K_B_CGS * _GAS_TEMPERATURE * 2.0).sqrt(),
    chi=R_HYPERION_ORBIT * (1.0 / math.sqrt(2.0)),
    bath=interplanetary_bath(
        M_HYPERION, R_HYPERION_BODY, _GAS_DENSITY, _GAS_TEMPERATURE
    ),
    bath_note=_GAS_NOTE,
    sources=(
        "lyapunov_rate: stated, (42 d)^-1",
        "dp0: assumption, sqrt(2 M k_B T) at 100 K",
        "chi: assumption, R_orbit/sqrt(2)",
        "bath: assumption, kinetic drag model",
    ),
)

PRESETS = {p.name: p for p in (SOLAR_SYSTEM, JUPITER, HYPERION)}


@dataclass(frozen=True)
class PresetReport:
    """One table row of derived scales, floats in cgs; None where undefined."""

    name: str
    t_hbar_s: Optional[float]
    t_r_s: Optional[float]
    tau_d_s: Optional[float]
    l_c_cm: Optional[float]
    sigma_c_gcm_s: Optional[float]
    classical_flag: Optional[bool]

    def as_dict(self) -> dict:
        return asdict(self)


def preset_report(preset: CelestialPreset, hbar: Quantity = HBAR_CGS) -> PresetReport:
    """Evaluate every scale the preset's inputs support.

    tau_d is evaluated at separation chi, the scale whose coherence t_hbar
    is about; l_c/sigma_c come from critical_scales on the preset bath.
    """
    th = tr = td = lc = sc = flag = None
    if preset.dp0 is not None and preset.chi is not None:
        th = t_hbar(preset.lyapunov_rate, preset.dp0, preset.chi, hbar).value
    if preset.action_I is not None:
        tr = t_r(preset.lyapunov_rate, preset.action_I, hbar).value
    if preset.bath is not None and preset.chi is not None:
        td = tau_d(preset.bath, preset.chi).value
        scales = critical_scales(
            preset.bath, preset.lyapunov_rate.value, preset.chi.value
        )
        lc, sc, flag = scales.l_c, scales.sigma_c, scales.classical_flag
    return PresetReport(
        name=preset.name,
        t_hbar_s=th,
        t_r_s=tr,
        tau_d_s=td,
        l_c_cm=lc,
        sigma_c_gcm_s=sc,
        classical_flag=flag,
    )
