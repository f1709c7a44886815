"""Readers for the decolab artifact formats.

Every CSV starts with one ``# key=value ...`` metadata line followed by a
fixed header row; missing values are empty fields.  Readers validate the
header against the documented schema and fail closed on any deviation:
an unknown or reordered column raises SchemaMismatch rather than being
silently dropped.  A file that validates but has no data rows raises
EmptyInput.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import EmptyInput, SchemaMismatch

SERIES_COLUMNS = (
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
BRANCH_COLUMNS = ("record", "probability", "k_hat_bits", "statistical_bits", "z_bits")
RECORD_COLUMNS = ("t", "symbol")
TIMESCALES_COLUMNS = (
    "name",
    "t_hbar_s",
    "t_r_s",
    "tau_d_s",
    "l_c_cm",
    "sigma_c_gcm_s",
    "classical_flag",
)
SCALING_COLUMNS = ("ln_inv_hbar", "t_breakdown")

SNAPSHOT_KEYS = frozenset(
    {
        "t",
        "hbar",
        "gamma",
        "D",
        "n",
        "x_min",
        "x_max",
        "p_min",
        "p_max",
        "scenario_id",
        "config_hash",
        "version",
        "npy",
    }
)

_META_KEYS = ("config_hash", "version", "scenario")


def _parse_meta(line: str, path: Path) -> dict:
    if not line.startswith("#"):
        raise SchemaMismatch("missing '# key=value' metadata line", path)
    meta = {}
    for token in line.lstrip("#").split():
        if "=" in token:
            key, _, value = token.partition("=")
            meta[key] = value
    missing = [k for k in _META_KEYS if k not in meta]
    if missing:
        raise SchemaMismatch(f"metadata line lacks {', '.join(missing)}", path)
    return meta


def _float(field: str) -> float:
    return math.nan if field == "" else float(field)


def _read_rows(path) -> tuple[dict, str, list[list[str]]]:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise EmptyInput("input file not found", path)
    lines = text.splitlines()
    if len(lines) < 2:
        raise SchemaMismatch("expected metadata line and header row", path)
    meta = _parse_meta(lines[0], path)
    header = lines[1]
    rows = [line.split(",") for line in lines[2:] if line]
    return meta, header, rows


def _check_header(header: str, columns: Sequence[str], path: Path):
    if header != ",".join(columns):
        raise SchemaMismatch(
            f"header {header!r} does not match schema columns {','.join(columns)!r}",
            path,
        )


def _numeric_table(path, columns: Sequence[str]) -> tuple[dict, dict]:
    meta, header, rows = _read_rows(path)
    _check_header(header, columns, path)
    if not rows:
        raise EmptyInput("no data rows", path)
    width = len(columns)
    for row in rows:
        if len(row) != width:
            raise SchemaMismatch(f"row has {len(row)} fields, expected {width}", path)
    data = {
        name: np.array([_float(row[j]) for row in rows])
        for j, name in enumerate(columns)
    }
    return meta, data


@dataclass(frozen=True)
class SeriesTable:
    """One diagnostic time series (quantum or classical run)."""

    path: Path
    meta: Mapping[str, str]
    data: Mapping[str, np.ndarray]

    @property
    def t(self) -> np.ndarray:
        return self.data["t"]

    def column(self, name: str) -> np.ndarray:
        if name not in self.data:
            raise SchemaMismatch(f"unknown series column {name!r}", self.path)
        return self.data[name]


def read_series(path) -> SeriesTable:
    meta, data = _numeric_table(path, SERIES_COLUMNS)
    return SeriesTable(path=Path(path), meta=meta, data=data)


def read_scaling(path) -> SeriesTable:
    """Breakdown-time scaling points: ln(1/hbar) versus breakdown time."""
    meta, data = _numeric_table(path, SCALING_COLUMNS)
    return SeriesTable(path=Path(path), meta=meta, data=data)


@dataclass(frozen=True)
class LyapunovTable:
    """Running Benettin estimates, one column per exponent."""

    path: Path
    meta: Mapping[str, str]
    t: np.ndarray
    exponents: np.ndarray  # shape (n_records, k), descending order


def read_lyapunov(path) -> LyapunovTable:
    meta, header, rows = _read_rows(path)
    names = header.split(",")
    if names[0] != "t" or len(names) < 2:
        raise SchemaMismatch(f"header {header!r} is not 't,lambda_1,...'", path)
    for j, name in enumerate(names[1:], start=1):
        if not re.fullmatch(rf"lambda_{j}", name):
            raise SchemaMismatch(f"column {j} is {name!r}, expected 'lambda_{j}'", path)
    if not rows:
        raise EmptyInput("no data rows", path)
    for row in rows:
        if len(row) != len(names):
            raise SchemaMismatch(
                f"row has {len(row)} fields, expected {len(names)}", path
            )
    values = np.array([[_float(f) for f in row] for row in rows])
    return LyapunovTable(
        path=Path(path), meta=meta, t=values[:, 0], exponents=values[:, 1:]
    )


@dataclass(frozen=True)
class BranchTable:
    """Leaves of a full measurement tree."""

    path: Path
    meta: Mapping[str, str]
    records: tuple[str, ...]
    data: Mapping[str, np.ndarray]


def read_branches(path) -> BranchTable:
    meta, header, rows = _read_rows(path)
    _check_header(header, BRANCH_COLUMNS, path)
    if not rows:
        raise EmptyInput("no data rows", path)
    for row in rows:
        if len(row) != len(BRANCH_COLUMNS):
            raise SchemaMismatch(
                f"row has {len(row)} fields, expected {len(BRANCH_COLUMNS)}", path
            )
    records = tuple(row[0] for row in rows)
    data = {
        name: np.array([_float(row[j]) for row in rows])
        for j, name in enumerate(BRANCH_COLUMNS)
        if name != "record"
    }
    return BranchTable(path=Path(path), meta=meta, records=records, data=data)


def read_record(path) -> tuple[dict, np.ndarray, np.ndarray]:
    """Sampled measurement record: (meta, timestamps, symbols)."""
    meta, header, rows = _read_rows(path)
    _check_header(header, RECORD_COLUMNS, path)
    if not rows:
        raise EmptyInput("no data rows", path)
    for row in rows:
        if len(row) != 2:
            raise SchemaMismatch(f"row has {len(row)} fields, expected 2", path)
    t = np.array([_float(row[0]) for row in rows])
    symbols = np.array([int(float(row[1])) for row in rows])
    return meta, t, symbols


@dataclass(frozen=True)
class TimescaleRow:
    name: str
    t_hbar_s: float
    t_r_s: float
    tau_d_s: float
    l_c_cm: float
    sigma_c_gcm_s: float
    classical_flag: Optional[bool]


def read_timescales(path) -> tuple[dict, list[TimescaleRow]]:
    meta, header, rows = _read_rows(path)
    _check_header(header, TIMESCALES_COLUMNS, path)
    if not rows:
        raise EmptyInput("no data rows", path)
    out = []
    for row in rows:
        if len(row) != len(TIMESCALES_COLUMNS):
            raise SchemaMismatch(
                f"row has {len(row)} fields, expected {len(TIMESCALES_COLUMNS)}", path
            )
        flag_field = row[6]
        if flag_field not in ("", "true", "false"):
            raise SchemaMismatch(
                f"classical_flag is {flag_field!r}, expected '', 'true' or 'false'",
                path,
            )
        out.append(
            TimescaleRow(
                name=row[0],
                t_hbar_s=_float(row[1]),
                t_r_s=_float(row[2]),
                tau_d_s=_float(row[3]),
                l_c_cm=_float(row[4]),
                sigma_c_gcm_s=_float(row[5]),
                classical_flag=None if flag_field == "" else flag_field == "true",
            )
        )
    return meta, out


@dataclass(frozen=True)
class Snapshot:
    """Wigner array W(x, p) with its sidecar header."""

    path: Path
    t: float
    hbar: float
    gamma: float
    diffusion: float
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    scenario_id: str
    values: np.ndarray  # row index x, column index p


def read_snapshot(json_path) -> Snapshot:
    json_path = Path(json_path)
    try:
        header = json.loads(json_path.read_text())
    except FileNotFoundError:
        raise EmptyInput("input file not found", json_path)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not valid JSON: {exc}", json_path)
    if not isinstance(header, dict):
        raise SchemaMismatch("snapshot header is not an object", json_path)
    unknown = set(header) - SNAPSHOT_KEYS
    if unknown:
        raise SchemaMismatch(f"unknown header keys {sorted(unknown)}", json_path)
    missing = SNAPSHOT_KEYS - set(header)
    if missing:
        raise SchemaMismatch(f"missing header keys {sorted(missing)}", json_path)
    npy_path = json_path.parent / str(header["npy"])
    try:
        values = np.load(npy_path)
    except FileNotFoundError:
        raise EmptyInput("sidecar array not found", npy_path)
    if values.ndim != 2:
        raise SchemaMismatch(f"array has {values.ndim} dimensions, expected 2", npy_path)
    if values.shape[0] != int(header["n"]):
        raise SchemaMismatch(
            f"array has {values.shape[0]} rows, header says n={header['n']}", npy_path
        )
    if values.size == 0:
        raise EmptyInput("array is empty", npy_path)
    return Snapshot(
        path=json_path,
        t=float(header["t"]),
        hbar=float(header["hbar"]),
        gamma=float(header["gamma"]),
        diffusion=float(header["D"]),
        x_min=float(header["x_min"]),
        x_max=float(header["x_max"]),
        p_min=float(header["p_min"]),
        p_max=float(header["p_max"]),
        scenario_id=str(header["scenario_id"]),
        values=np.asarray(values, dtype=float),
    )


def read_summary(path) -> dict:
    path = Path(path)
    try:
        summary = json.loads(path.read_text())
    except FileNotFoundError:
        raise EmptyInput("input file not found", path)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not valid JSON: {exc}", path)
    if not isinstance(summary, dict):
        raise SchemaMismatch("summary is not an object", path)
    for key in ("scenario_id", "config_hash", "version"):
        if key not in summary:
            raise SchemaMismatch(f"missing key {key!r}", path)
    return summary


_FIT_KEYS = ("slope", "intercept", "stderr", "r_squared")


def summary_fit(summary: Mapping, name: str, path=None) -> dict:
    """One named fit from a summary's ``fits`` block.

    All figure annotations come through here; the pipeline never refits.
    """
    fits = summary.get("fits")
    if not isinstance(fits, Mapping) or name not in fits:
        raise SchemaMismatch(f"summary has no fit named {name!r}", path)
    fit = fits[name]
    if not isinstance(fit, Mapping):
        raise SchemaMismatch(f"fit {name!r} is not an object", path)
    missing = [k for k in _FIT_KEYS if k not in fit]
    if missing:
        raise SchemaMismatch(f"fit {name!r} lacks {', '.join(missing)}", path)
    return dict(fit)
