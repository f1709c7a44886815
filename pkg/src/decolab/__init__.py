"""Numerical laboratory for decoherence in classically chaotic quantum systems.

Subpackages by theme: phase-space state handling (`grids`), model potentials
(`potentials`), open-system quantum evolution (`quantum`), classical ensembles
and Lyapunov spectra (`classical`), series diagnostics (`diagnostics`),
celestial timescale estimates (`timescales`), qubit observer records
(`observer`) with compression-based information bounds (`compressors`), and
the scenario runner (`config`, `runner`, `cli`).
"""

try:
    from importlib.metadata import version as _version

    __version__ = _version("decolab")
except Exception:  # pragma: no cover - source tree without install metadata
    __version__ = "0.1.0"

from .bath import NATURAL, BathParams, UnitsConfig, bath_off
from .config import ScenarioConfig, config_hash, load_scenario, scenario_from_mapping
from .diagnostics import DiagnosticSeries, critical_scales, entropy_production_rate
from .grids import (
    CatPair,
    DensityMatrix,
    Gaussian,
    SpatialGrid,
    WignerField,
    build_density_matrix,
    wigner_transform,
)
from .potentials import (
    DrivenDoubleWell,
    HamiltonianSpec,
    Harmonic,
    InvertedHarmonic,
    QuarticDoubleWell,
)
from .quantum import EvolverConfig, EvolveResult, evolve, evolve_wavefunction
from .classical import gaussian_cloud, langevin_series, lyapunov_spectrum
from .runner import RunManifest, run_classical, run_observer, run_quantum, run_timescales

__all__ = [
    "__version__",
    "NATURAL",
    "BathParams",
    "UnitsConfig",
    "bath_off",
    "ScenarioConfig",
    "config_hash",
    "load_scenario",
    "scenario_from_mapping",
    "DiagnosticSeries",
    "critical_scales",
    "entropy_production_rate",
    "CatPair",
    "DensityMatrix",
    "Gaussian",
    "SpatialGrid",
    "WignerField",
    "build_density_matrix",
    "wigner_transform",
    "DrivenDoubleWell",
    "HamiltonianSpec",
    "Harmonic",
    "InvertedHarmonic",
    "QuarticDoubleWell",
    "EvolverConfig",
    "EvolveResult",
    "evolve",
    "evolve_wavefunction",
    "gaussian_cloud",
    "langevin_series",
    "lyapunov_spectrum",
    "RunManifest",
    "run_classical",
    "run_observer",
    "run_quantum",
    "run_timescales",
]
