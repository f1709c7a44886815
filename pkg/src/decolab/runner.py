"""Orchestration and persistence: scenario configs in, deterministic artifacts out.

Every run writes into one output directory: data CSVs with a fixed header row
(one leading `# key=value` metadata comment line), JSON summaries, optional
Wigner snapshot pairs (.npy plus sidecar .json), and a closing manifest.json
listing each emitted file with its sha256.  Data files are byte-identical
across reruns of the same (config, seed, version); wall-clock timestamps
appear only in the manifest.  Numerical aborts still write the manifest,
marked aborted, before the error propagates.
"""

from __future__ import annotations

import concurrent.futures
import datetime
import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Mapping, Optional, Sequence

import numpy as np

from . import observer as ob
from .bath import BathParams
from .classical import gaussian_cloud, ks_entropy_rate, langevin_series, lyapunov_spectrum
from .compressors import Lz78GapGamma, ZlibCompressor
from .config import ScenarioConfig, config_hash
from .diagnostics import DiagnosticSeries, entropy_production_rate
from .errors import ConfigError, NumericalAbort
from .grids import DensityMatrix, build_density_matrix, state_wavefunction
from .quantum import EvolveResult, EvolverConfig, evolve, evolve_wavefunction
from .timescales import (
    NUMBER_DENSITY,
    PRESETS,
    CelestialPreset,
    interplanetary_bath,
    preset_report,
)
from .units import ACTION, LENGTH, MASS, MOMENTUM, RATE, TEMPERATURE, quantity

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("decolab")
except Exception:  # pragma: no cover - metadata missing in odd installs
    VERSION = "0.1.0"

SERIES_HEADER = "t,trace,purity,entropy_nats,coherence_len,mean_x,mean_p,var_x,var_p,moyal_ratio"
BRANCH_HEADER = "record,probability,k_hat_bits,statistical_bits,z_bits"
RECORD_HEADER = "t,symbol"
TIMESCALES_HEADER = "name,t_hbar_s,t_r_s,tau_d_s,l_c_cm,sigma_c_gcm_s,classical_flag"


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    version: str
    started_utc: str
    finished_utc: str
    status: str
    files: tuple
    error: Optional[str] = None

    def as_dict(self) -> dict:
        data = {
            "schema": "run-manifest/1",
            "config_hash": self.config_hash,
            "version": self.version,
            "started_utc": self.started_utc,
            "finished_utc": self.finished_utc,
            "status": self.status,
            "files": [dict(f) for f in self.files],
        }
        if self.error is not None:
            data["error"] = self.error
        return data


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _fmt(value) -> str:
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return ""
    return "%.17g" % v


class _Emitter:
    """Writes artifacts under one directory and records their digests."""

    def __init__(self, out_dir: Path, cfg_hash: str):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.cfg_hash = cfg_hash
        self.records: List[dict] = []

    def _register(self, path: Path):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.records.append(
            {
                "path": str(path.relative_to(self.out_dir)),
                "sha256": digest,
                "bytes": path.stat().st_size,
            }
        )

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text)
        self._register(path)
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, json.dumps(obj, sort_keys=True, indent=2) + "\n")

    def write_npy(self, name: str, array: np.ndarray) -> Path:
        path = self.out_dir / name
        with open(path, "wb") as fh:
            np.save(fh, array)
        self._register(path)
        return path

    def adopt(self, sub: "_Emitter"):
        prefix = sub.out_dir.relative_to(self.out_dir)
        for rec in sub.records:
            self.records.append({**rec, "path": str(prefix / rec["path"])})

    def manifest(self, started: str, status: str = "ok", error: Optional[str] = None):
        man = RunManifest(
            config_hash=self.cfg_hash,
            version=VERSION,
            started_utc=started,
            finished_utc=_utcnow(),
            status=status,
            files=tuple(sorted(self.records, key=lambda r: r["path"])),
            error=error,
        )
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(man.as_dict(), sort_keys=True, indent=2) + "\n")
        return man


def _csv_text(header: str, rows: Sequence[Sequence], cfg_hash: str, scenario_id: str) -> str:
    lines = [f"# config_hash={cfg_hash} version={VERSION} scenario={scenario_id}", header]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _series_rows(series: DiagnosticSeries):
    cols = [series.column(name) for name in SERIES_HEADER.split(",")]
    rows = []
    for i in range(len(series)):
        rows.append([None if c is None else c[i] for c in cols])
    return rows


def _fit_dict(fit, window) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "stderr": fit.stderr,
        "r_squared": fit.r_squared,
        "window": [window[0], window[1]],
    }


def _run_guarded(emit: _Emitter, body: Callable[[], dict]) -> RunManifest:
    started = _utcnow()
    try:
        body()
    except NumericalAbort as exc:
        emit.manifest(started, status="aborted", error=str(exc))
        raise
    return emit.manifest(started)


def run_quantum(cfg: ScenarioConfig, out_dir=None, threads: int = 1) -> RunManifest:
    """Evolve one quantum scenario (or a sweep) and persist its artifacts."""
    if cfg.sweep is not None:
        return _run_sweep(cfg, out_dir, threads)
    if cfg.grid is None or cfg.state is None:
        raise ConfigError("quantum scenario needs grid and state sections", field="grid")
    out = Path(out_dir if out_dir is not None else cfg.out)
    emit = _Emitter(out, config_hash(cfg))

    def body():
        _quantum_body(cfg, emit)

    return _run_guarded(emit, body)


def _quantum_body(cfg: ScenarioConfig, emit: _Emitter):
    grid = cfg.grid.build()
    ham = cfg.hamiltonian()
    bath = cfg.bath_params()
    ev = cfg.evolver
    ecfg = EvolverConfig(
        dt=ev.dt,
        splitting=ev.splitting,
        relaxation_scheme=ev.relaxation_scheme,
        absorbing_mask_width=ev.absorbing_mask_width,
        record_every=ev.record_every,
        wigner_every=ev.wigner_every,
        record_moyal=ev.record_moyal,
        moyal_order_cap=ev.moyal_order_cap,
    )
    provenance = {"scenario_id": cfg.scenario_id, "config_hash": emit.cfg_hash}
    state = cfg.state.build()
    if ev.representation == "wavefunction":
        if not bath.is_off:
            raise ConfigError(
                "wavefunction representation requires the bath off",
                field="evolver.representation",
            )
        psi0 = state_wavefunction(grid, state)
        result = evolve_wavefunction(grid, psi0, ham, ecfg, ev.t_end, provenance=provenance)
    else:
        rho0 = build_density_matrix(grid, state)
        result = evolve(rho0, ham, bath, ecfg, ev.t_end, provenance=provenance)
    series = result.series
    emit.write_text(
        "series.csv", _csv_text(SERIES_HEADER, _series_rows(series), emit.cfg_hash, cfg.scenario_id)
    )
    snapshot_files = _write_snapshots(emit, cfg, result, bath)
    summary = {
        "scenario_id": cfg.scenario_id,
        "config_hash": emit.cfg_hash,
        "version": VERSION,
        "seed": cfg.seed,
        "representation": ev.representation,
        "t_end": ev.t_end,
        "n_records": len(series),
        "survival": result.survival,
        "trace_drift": float(np.max(np.abs(series.trace - 1.0))),
        "final": {
            "mean_x": float(series.mean_x[-1]),
            "mean_p": float(series.mean_p[-1]),
            "var_x": float(series.var_x[-1]),
            "var_p": float(series.var_p[-1]),
            "entropy_nats": float(series.entropy_nats[-1]),
        },
        "files": {"series": "series.csv", "snapshots": snapshot_files},
    }
    if not np.isnan(series.purity).all():
        summary["purity_drift"] = float(np.nanmax(np.abs(series.purity - series.purity[0])))
    window = cfg.diagnostics.entropy_window
    if window is not None:
        fit = entropy_production_rate(series, window)
        summary["fits"] = {"entropy_slope": _fit_dict(fit, window)}
    emit.write_json("summary.json", summary)


def _write_snapshots(emit: _Emitter, cfg: ScenarioConfig, result: EvolveResult, bath: BathParams):
    names = []
    for k, (t, w) in enumerate(result.wigner_snapshots):
        base = f"snapshot_{k:03d}"
        emit.write_npy(base + ".npy", np.asarray(w.values, dtype=float))
        emit.write_json(
            base + ".json",
            {
                "t": float(t),
                "hbar": cfg.grid.hbar,
                "gamma": bath.gamma,
                "D": bath.diffusion,
                "n": cfg.grid.n,
                "x_min": cfg.grid.x_min,
                "x_max": cfg.grid.x_max,
                "p_min": float(w.p[0]),
                "p_max": float(w.p[-1]),
                "scenario_id": cfg.scenario_id,
                "config_hash": emit.cfg_hash,
                "version": VERSION,
                "npy": base + ".npy",
            },
        )
        names.append(base + ".npy")
    return names


def run_classical(cfg: ScenarioConfig, out_dir=None) -> RunManifest:
    """Langevin ensemble series plus optional Lyapunov spectrum artifacts."""
    if cfg.state is None:
        raise ConfigError("classical scenario needs a state section", field="state")
    out = Path(out_dir if out_dir is not None else cfg.out)
    emit = _Emitter(out, config_hash(cfg))

    def body():
        _classical_body(cfg, emit)

    return _run_guarded(emit, body)


def _classical_body(cfg: ScenarioConfig, emit: _Emitter):
    pot = cfg.potential.build(cfg.mass) if cfg.potential is not None else None
    if pot is None:
        raise ConfigError("classical scenario needs a potential section", field="potential")
    bath = cfg.bath_params()
    cl = cfg.classical
    ens = gaussian_cloud(
        n_samples=cl.ensemble,
        x0=cfg.state.x0,
        p0=cfg.state.p0,
        sigma_x=cl.sigma_x,
        sigma_p=cl.sigma_p,
        mass=cfg.mass,
        seed=cfg.seed,
    )
    ev = cfg.evolver
    _, series = langevin_series(
        ens, pot, bath, dt=ev.dt, t_end=ev.t_end, record_every=ev.record_every
    )
    emit.write_text(
        "series.csv", _csv_text(SERIES_HEADER, _series_rows(series), emit.cfg_hash, cfg.scenario_id)
    )
    summary = {
        "scenario_id": cfg.scenario_id,
        "config_hash": emit.cfg_hash,
        "version": VERSION,
        "seed": cfg.seed,
        "ensemble": cl.ensemble,
        "t_end": ev.t_end,
        "final": {
            "mean_x": float(series.mean_x[-1]),
            "mean_p": float(series.mean_p[-1]),
            "var_x": float(series.var_x[-1]),
            "var_p": float(series.var_p[-1]),
        },
        "files": {"series": "series.csv"},
    }
    if cl.lyapunov is not None:
        spec = lyapunov_spectrum(
            pot,
            x0=cl.lyapunov.x0,
            t_avg=cl.lyapunov.t_avg,
            renorm_interval=cl.lyapunov.renorm_interval,
            dt=cl.lyapunov.dt,
            gamma=bath.gamma,
            drift_tol=cl.lyapunov.drift_tol,
        )
        rows = []
        if spec.trace_t is not None:
            for i, t in enumerate(spec.trace_t):
                rows.append([t, *spec.trace_values[i]])
        k = len(spec.exponents)
        header = "t," + ",".join(f"lambda_{j + 1}" for j in range(k))
        emit.write_text(
            "lyapunov.csv", _csv_text(header, rows, emit.cfg_hash, cfg.scenario_id)
        )
        summary["lyapunov"] = {
            "exponents": [float(v) for v in spec.exponents],
            "errors": [float(v) for v in spec.errors],
            "pairing_residual": float(spec.pairing_residual()),
            "ks_rate": float(ks_entropy_rate(spec)),
            "averaging_time": float(spec.averaging_time),
        }
        summary["files"]["lyapunov"] = "lyapunov.csv"
    compare = cfg.diagnostics.compare_to
    if compare is not None:
        summary["compare"] = _compare_seed(compare, cfg.seed)
    emit.write_json("summary.json", summary)


def _compare_seed(path: str, seed: int) -> dict:
    try:
        ref = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"comparison summary not found: {path}", field="diagnostics.compare_to")
    mismatch = ref.get("seed") != seed
    if mismatch:
        warnings.warn(
            f"comparing against quantum run with different seed ({ref.get('seed')} != {seed})",
            stacklevel=3,
        )
    return {
        "scenario_id": ref.get("scenario_id"),
        "seed": ref.get("seed"),
        "seed_mismatch": mismatch,
    }


def _observer_policy(spec):
    if spec.policy == "z":
        return ob.basis_z()
    if spec.policy == "x":
        return ob.basis_x()
    return lambda k: ob.basis_x() if k % 2 == 0 else ob.basis_z()


def _observer_dynamics(spec):
    if spec.dynamics == "none":
        return None
    if spec.dynamics == "rotation_y":
        return ob.rotation_y(spec.angle)
    return np.diag([np.exp(-1j * spec.phases[0]), np.exp(-1j * spec.phases[1])])


def run_observer(cfg: ScenarioConfig, out_dir=None) -> RunManifest:
    """Measurement-chain records: branch CSV plus per-depth entropy summary."""
    if cfg.observer is None:
        raise ConfigError("observer scenario needs an observer section", field="observer")
    out = Path(out_dir if out_dir is not None else cfg.out)
    emit = _Emitter(out, config_hash(cfg))

    def body():
        _observer_body(cfg, emit)

    return _run_guarded(emit, body)


def _observer_body(cfg: ScenarioConfig, emit: _Emitter):
    spec = cfg.observer
    compressor = Lz78GapGamma() if spec.compressor == "builtin" else ZlibCompressor()
    dynamics = _observer_dynamics(spec)
    policy = _observer_policy(spec)
    summary = {
        "scenario_id": cfg.scenario_id,
        "config_hash": emit.cfg_hash,
        "version": VERSION,
        "seed": cfg.seed,
        "mode": spec.mode,
        "depth": spec.depth,
        "policy": spec.policy,
        "dynamics": spec.dynamics,
        "compressor": compressor.name,
    }
    if spec.mode == "sample":
        rec = ob.measurement_chain(
            dynamics,
            policy,
            spec.depth,
            mode="sample",
            seed=cfg.seed,
            depth_cap=spec.depth_cap,
            dt=spec.dt,
        )
        rows = [[t, s] for t, s in zip(rec.timestamps, rec.symbols)]
        emit.write_text(
            "record.csv", _csv_text(RECORD_HEADER, rows, emit.cfg_hash, cfg.scenario_id)
        )
        summary["record"] = {
            "symbols": "".join(str(s) for s in rec.symbols),
            "branch_probability": rec.branch_probability,
            "k_hat_bits": ob.algorithmic_info_estimate(rec, compressor),
        }
        summary["files"] = {"record": "record.csv"}
    else:
        tree = ob.measurement_chain(
            dynamics,
            policy,
            spec.depth,
            mode="full_tree",
            depth_cap=spec.depth_cap,
            dt=spec.dt,
        )
        rows = []
        for leaf in tree.level(tree.depth):
            rec = ob.RecordSequence(
                leaf.prefix,
                min(leaf.probability, 1.0),
                tuple(spec.dt * (i + 1) for i in range(len(leaf.prefix))),
            )
            pe = ob.physical_entropy(rec, leaf.state, compressor)
            rows.append(
                [
                    "".join(str(s) for s in leaf.prefix),
                    leaf.probability,
                    pe.k_hat_bits,
                    pe.statistical_bits,
                    pe.z_bits,
                ]
            )
        emit.write_text(
            "branches.csv", _csv_text(BRANCH_HEADER, rows, emit.cfg_hash, cfg.scenario_id)
        )
        summary["tree"] = ob.tree_summary(tree, compressor)
        summary["files"] = {"branches": "branches.csv"}
    emit.write_json("summary.json", summary)


def _custom_preset(params: Mapping) -> CelestialPreset:
    params = dict(params)
    allowed = {
        "name",
        "lyapunov_rate_per_s",
        "action_I_erg_s",
        "dp0_gcm_s",
        "chi_cm",
        "bath",
    }
    for key in params:
        if key not in allowed:
            raise ConfigError("unknown key", field=f"timescales.params.{key}")
    if "lyapunov_rate_per_s" not in params:
        raise ConfigError("missing required key", field="timescales.params.lyapunov_rate_per_s")
    bath = None
    bath_params = params.get("bath")
    if bath_params is not None:
        needed = ("body_mass_g", "body_radius_cm", "number_density_cm3", "temperature_K")
        for key in bath_params:
            if key not in needed:
                raise ConfigError("unknown key", field=f"timescales.params.bath.{key}")
        try:
            bath = interplanetary_bath(
                quantity(bath_params["body_mass_g"], MASS),
                quantity(bath_params["body_radius_cm"], LENGTH),
                quantity(bath_params["number_density_cm3"], NUMBER_DENSITY),
                quantity(bath_params["temperature_K"], TEMPERATURE),
            )
        except KeyError as exc:
            raise ConfigError("missing required key", field=f"timescales.params.bath.{exc.args[0]}")
    def opt(key, dim):
        return quantity(params[key], dim) if key in params else None

    return CelestialPreset(
        name=str(params.get("name", "custom")),
        lyapunov_rate=quantity(params["lyapunov_rate_per_s"], RATE),
        action_I=opt("action_I_erg_s", ACTION),
        dp0=opt("dp0_gcm_s", MOMENTUM),
        chi=opt("chi_cm", LENGTH),
        bath=bath,
        bath_note="runner-supplied custom parameters",
    )


def run_timescales(spec: Mapping, out_dir) -> RunManifest:
    """Celestial timescale table: named presets or custom cgs parameters."""
    spec = dict(spec or {})
    for key in spec:
        if key not in ("preset", "params"):
            raise ConfigError("unknown key", field=f"timescales.{key}")
    presets: List[CelestialPreset] = []
    if "params" in spec:
        presets.append(_custom_preset(spec["params"]))
    name = spec.get("preset", "all" if "params" not in spec else None)
    if name is not None:
        if name == "all":
            presets.extend(PRESETS.values())
        elif name in PRESETS:
            presets.append(PRESETS[name])
        else:
            raise ConfigError(
                f"unknown preset {name!r}; expected one of {sorted(PRESETS)} or 'all'",
                field="timescales.preset",
            )
    blob = json.dumps({k: _jsonable(v) for k, v in spec.items()}, sort_keys=True)
    cfg_hash = hashlib.sha256(blob.encode("utf-8")).hexdigest()
    emit = _Emitter(Path(out_dir), cfg_hash)
    started = _utcnow()
    reports = [preset_report(p) for p in presets]
    rows = [
        [
            r.name,
            r.t_hbar_s,
            r.t_r_s,
            r.tau_d_s,
            r.l_c_cm,
            r.sigma_c_gcm_s,
            "" if r.classical_flag is None else str(bool(r.classical_flag)).lower(),
        ]
        for r in reports
    ]
    emit.write_text("timescales.csv", _csv_text(TIMESCALES_HEADER, rows, cfg_hash, "timescales"))
    emit.write_json(
        "timescales.json",
        {
            "config_hash": cfg_hash,
            "version": VERSION,
            "inputs": _jsonable(spec),
            "reports": [r.as_dict() for r in reports],
        },
    )
    return emit.manifest(started)


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _run_sweep(cfg: ScenarioConfig, out_dir, threads: int) -> RunManifest:
    sweep = cfg.sweep
    out = Path(out_dir if out_dir is not None else cfg.out)
    emit = _Emitter(out, config_hash(cfg))
    started = _utcnow()

    points = []
    for idx, value in enumerate(sweep.values):
        point_cfg = cfg.with_override(sweep.parameter, value)
        points.append((idx, value, point_cfg))

    def run_point(item):
        idx, value, point_cfg = item
        sub_dir = out / f"point_{idx:03d}"
        sub_emit = _Emitter(sub_dir, config_hash(point_cfg))
        if sweep.target == "classical":
            _classical_body(point_cfg, sub_emit)
        else:
            _quantum_body(point_cfg, sub_emit)
        sub_emit.manifest(_utcnow())
        return idx, value, point_cfg, sub_emit

    results = {}
    aborted = None
    max_workers = max(1, int(threads))
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run_point, item) for item in points]
        for fut in concurrent.futures.as_completed(futures):
            try:
                idx, value, point_cfg, sub_emit = fut.result()
            except NumericalAbort as exc:
                aborted = exc
                continue
            results[idx] = (value, point_cfg, sub_emit)

    combined = []
    for idx in sorted(results):
        value, point_cfg, sub_emit = results[idx]
        emit.adopt(sub_emit)
        entry = {
            "index": idx,
            "value": value,
            "dir": f"point_{idx:03d}",
            "config_hash": config_hash(point_cfg),
        }
        summary_path = sub_emit.out_dir / "summary.json"
        point_summary = json.loads(summary_path.read_text())
        if "fits" in point_summary:
            entry["entropy_slope"] = point_summary["fits"]["entropy_slope"]
        if "lyapunov" in point_summary:
            entry["lyapunov"] = point_summary["lyapunov"]
        combined.append(entry)
    emit.write_json(
        "summary.json",
        {
            "scenario_id": cfg.scenario_id,
            "config_hash": emit.cfg_hash,
            "version": VERSION,
            "seed": cfg.seed,
            "sweep": {
                "parameter": sweep.parameter,
                "values": list(sweep.values),
                "target": sweep.target,
            },
            "points": combined,
        },
    )
    if aborted is not None:
        emit.manifest(started, status="aborted", error=str(aborted))
        raise aborted
    return emit.manifest(started)
