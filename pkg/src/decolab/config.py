"""Scenario files: YAML in, validated spec dataclasses and a canonical hash out.

Every scenario is one human-readable YAML document.  Loading rejects unknown
keys with their full field path, fills documented defaults, and exposes the
resolved configuration as a canonical JSON blob whose sha256 is embedded in
every output artifact.  The output directory is excluded from the hash: it
locates artifacts but does not identify the experiment.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Mapping, Optional, Sequence, Tuple

import yaml

from .bath import NATURAL, BathParams, UnitsConfig, bath_off
from .errors import ConfigError
from .grids import CatPair, Gaussian, SpatialGrid
from .potentials import (
    DrivenDoubleWell,
    HamiltonianSpec,
    Harmonic,
    InvertedHarmonic,
    QuarticDoubleWell,
)

_POTENTIALS = {
    "harmonic": (Harmonic, ("omega",)),
    "inverted_harmonic": (InvertedHarmonic, ("lam",)),
    "quartic_double_well": (QuarticDoubleWell, ("a", "b")),
    "driven_double_well": (DrivenDoubleWell, ("a", "b", "drive_amp", "drive_freq")),
}

_STATES = ("gaussian", "cat_pair")


def _require_mapping(data, path):
    if not isinstance(data, Mapping):
        raise ConfigError(f"expected a mapping, got {type(data).__name__}", field=path)
    return data


def _check_keys(data: Mapping, allowed: Sequence[str], path: str):
    for key in data:
        if key not in allowed:
            raise ConfigError("unknown key", field=f"{path}.{key}" if path else str(key))


def _build(cls, data, path, renames=()):
    data = dict(_require_mapping(data, path))
    names = [f.name for f in fields(cls)]
    _check_keys(data, names, path)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(str(exc), field=path)


@dataclass(frozen=True)
class GridSpec:
    n: int
    x_min: float
    x_max: float
    hbar: float = 1.0

    def build(self) -> SpatialGrid:
        return SpatialGrid(n=self.n, x_min=self.x_min, x_max=self.x_max, hbar=self.hbar)


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _POTENTIALS:
            raise ConfigError(
                f"unknown kind {self.kind!r}; expected one of {sorted(_POTENTIALS)}",
                field="potential.kind",
            )
        cls, names = _POTENTIALS[self.kind]
        _check_keys(self.params, names, "potential.params")

    def build(self, mass: float):
        cls, _ = _POTENTIALS[self.kind]
        return cls(m=mass, **dict(self.params))


@dataclass(frozen=True)
class StateSpec:
    kind: str
    x0: float = 0.0
    p0: float = 0.0
    dx_sigma: float = 1.0
    delta_x: float = 0.0

    def __post_init__(self):
        if self.kind not in _STATES:
            raise ConfigError(
                f"unknown kind {self.kind!r}; expected one of {_STATES}", field="state.kind"
            )
        if self.kind == "cat_pair" and self.delta_x <= 0.0:
            raise ConfigError("cat_pair needs delta_x > 0", field="state.delta_x")

    def build(self):
        if self.kind == "gaussian":
            return Gaussian(x0=self.x0, p0=self.p0, dx_sigma=self.dx_sigma)
        return CatPair(x0=self.x0, p0=self.p0, dx_sigma=self.dx_sigma, delta_x=self.delta_x)


@dataclass(frozen=True)
class BathSpec:
    gamma: float = 0.0
    temperature: float = 0.0

    def build(self, mass: float, hbar: float = 1.0) -> BathParams:
        units = NATURAL if hbar == 1.0 else UnitsConfig(hbar=hbar)
        if self.gamma == 0.0 and self.temperature == 0.0:
            return bath_off(mass, units=units)
        return BathParams(
            gamma=self.gamma, temperature=self.temperature, mass=mass, units=units
        )


@dataclass(frozen=True)
class EvolverSpec:
    dt: float = 0.01
    t_end: float = 1.0
    representation: str = "density"
    splitting: str = "strang"
    relaxation_scheme: str = "spectral_shear"
    absorbing_mask_width: float = 0.0
    record_every: int = 10
    wigner_every: int = 0
    record_moyal: bool = False
    moyal_order_cap: int = 1

    def __post_init__(self):
        if self.representation not in ("density", "wavefunction"):
            raise ConfigError(
                "representation must be density or wavefunction",
                field="evolver.representation",
            )
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive", field="evolver.dt")
        if self.t_end <= 0.0:
            raise ConfigError("t_end must be positive", field="evolver.t_end")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1", field="evolver.record_every")
        if self.splitting != "strang":
            raise ConfigError("unknown splitting %r" % self.splitting, field="evolver.splitting")
        if self.relaxation_scheme not in ("spectral_shear", "upwind_fd"):
            raise ConfigError(
                "unknown relaxation_scheme %r" % self.relaxation_scheme,
                field="evolver.relaxation_scheme",
            )


@dataclass(frozen=True)
class LyapunovSpec:
    x0: Tuple[float, float] = (0.1, 0.0)
    t_avg: float = 2000.0
    renorm_interval: Optional[float] = None
    dt: Optional[float] = None
    drift_tol: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if len(self.x0) != 2:
            raise ConfigError("x0 must be (x, p)", field="classical.lyapunov.x0")


@dataclass(frozen=True)
class ClassicalSpec:
    ensemble: int = 256
    sigma_x: float = 1.0
    sigma_p: float = 1.0
    lyapunov: Optional[LyapunovSpec] = None

    def __post_init__(self):
        if self.ensemble < 1:
            raise ConfigError("ensemble must be >= 1", field="classical.ensemble")
        if self.sigma_x <= 0.0 or self.sigma_p <= 0.0:
            raise ConfigError(
                "sigma_x and sigma_p must be positive", field="classical.sigma"
            )


@dataclass(frozen=True)
class DiagnosticsSpec:
    entropy_window: Optional[Tuple[float, float]] = None
    compare_to: Optional[str] = None

    def __post_init__(self):
        if self.entropy_window is not None:
            win = tuple(float(v) for v in self.entropy_window)
            if len(win) != 2 or win[0] >= win[1]:
                raise ConfigError(
                    "entropy_window must be (t0, t1) with t0 < t1",
                    field="diagnostics.entropy_window",
                )
            object.__setattr__(self, "entropy_window", win)


@dataclass(frozen=True)
class ObserverSpec:
    depth: int = 8
    mode: str = "full_tree"
    dynamics: str = "none"
    angle: float = 0.0
    phases: Tuple[float, float] = (0.0, 0.0)
    policy: str = "z"
    depth_cap: int = 12
    dt: float = 1.0
    compressor: str = "builtin"

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(v) for v in self.phases))
        if self.mode not in ("full_tree", "sample"):
            raise ConfigError("mode must be full_tree or sample", field="observer.mode")
        if self.dynamics not in ("none", "rotation_y", "phase"):
            raise ConfigError(
                "dynamics must be none, rotation_y, or phase", field="observer.dynamics"
            )
        if self.policy not in ("z", "x", "alternating_xz"):
            raise ConfigError(
                "policy must be z, x, or alternating_xz", field="observer.policy"
            )
        if self.compressor not in ("builtin", "zlib"):
            raise ConfigError("compressor must be builtin or zlib", field="observer.compressor")
        if len(self.phases) != 2:
            raise ConfigError("phases must be (phi0, phi1)", field="observer.phases")
        if self.depth < 1:
            raise ConfigError("depth must be >= 1", field="observer.depth")
        if self.depth_cap < 1:
            raise ConfigError("depth_cap must be >= 1", field="observer.depth_cap")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[float, ...]
    target: str = "quantum"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ConfigError("values must be non-empty", field="sweep.values")
        if self.target not in ("quantum", "classical"):
            raise ConfigError("target must be quantum or classical", field="sweep.target")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    seed: int = 0
    units: str = "natural"
    mass: float = 1.0
    out: str = "runs"
    grid: Optional[GridSpec] = None
    potential: Optional[PotentialSpec] = None
    state: Optional[StateSpec] = None
    bath: BathSpec = field(default_factory=BathSpec)
    evolver: EvolverSpec = field(default_factory=EvolverSpec)
    classical: ClassicalSpec = field(default_factory=ClassicalSpec)
    diagnostics: DiagnosticsSpec = field(default_factory=DiagnosticsSpec)
    observer: Optional[ObserverSpec] = None
    sweep: Optional[SweepSpec] = None

    def __post_init__(self):
        if not self.scenario_id:
            raise ConfigError("scenario_id must be non-empty", field="scenario_id")
        if self.units != "natural":
            raise ConfigError(
                "dynamical scenarios run in natural units only", field="units"
            )
        if self.mass <= 0.0:
            raise ConfigError("mass must be positive", field="mass")

    def hamiltonian(self) -> HamiltonianSpec:
        if self.potential is None:
            raise ConfigError("scenario needs a potential section", field="potential")
        return HamiltonianSpec(potential=self.potential.build(self.mass), mass=self.mass)

    def bath_params(self) -> BathParams:
        hbar = self.grid.hbar if self.grid is not None else 1.0
        return self.bath.build(self.mass, hbar=hbar)

    def as_dict(self) -> dict:
        data = asdict(self)
        return _tuples_to_lists(data)

    def with_override(self, parameter: str, value) -> "ScenarioConfig":
        """New config with one dotted-path field replaced (sweep point)."""
        data = self.as_dict()
        node = data
        parts = parameter.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError("unknown sweep parameter", field=parameter)
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError("unknown sweep parameter", field=parameter)
        node[parts[-1]] = value
        data.pop("sweep", None)
        return scenario_from_mapping(data)


def _tuples_to_lists(obj):
    if isinstance(obj, dict):
        return {k: _tuples_to_lists(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tuples_to_lists(v) for v in obj]
    return obj


_SECTIONS = {
    "grid": lambda d: _build(GridSpec, d, "grid"),
    "potential": lambda d: _build(PotentialSpec, d, "potential"),
    "state": lambda d: _build(StateSpec, d, "state"),
    "bath": lambda d: _build(BathSpec, d, "bath"),
    "evolver": lambda d: _build(EvolverSpec, d, "evolver"),
    "diagnostics": lambda d: _build(DiagnosticsSpec, d, "diagnostics"),
    "observer": lambda d: _build(ObserverSpec, d, "observer"),
    "sweep": lambda d: _build(SweepSpec, d, "sweep"),
}


def _classical_from_mapping(data):
    data = dict(_require_mapping(data, "classical"))
    lyap = data.pop("lyapunov", None)
    _check_keys(data, ("ensemble", "sigma_x", "sigma_p"), "classical")
    spec = None
    if lyap is not None:
        spec = _build(LyapunovSpec, lyap, "classical.lyapunov")
    try:
        return ClassicalSpec(lyapunov=spec, **data)
    except TypeError as exc:
        raise ConfigError(str(exc), field="classical")


def scenario_from_mapping(data: Mapping) -> ScenarioConfig:
    data = dict(_require_mapping(data, ""))
    scalar_keys = ("scenario_id", "seed", "units", "mass", "out")
    _check_keys(data, scalar_keys + tuple(_SECTIONS) + ("classical",), "")
    kwargs = {k: data[k] for k in scalar_keys if k in data}
    for name, builder in _SECTIONS.items():
        if data.get(name) is not None:
            kwargs[name] = builder(data[name])
    if data.get("classical") is not None:
        kwargs["classical"] = _classical_from_mapping(data["classical"])
    if "scenario_id" not in kwargs:
        raise ConfigError("missing required key", field="scenario_id")
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc))


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path, "r") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}", field="config")
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}", field="config")
    if data is None:
        raise ConfigError("scenario file is empty", field="config")
    return scenario_from_mapping(data)


def canonical_json(cfg: ScenarioConfig) -> str:
    """Resolved config as sorted-key JSON; the identity of the experiment."""
    data = cfg.as_dict()
    data.pop("out", None)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()
