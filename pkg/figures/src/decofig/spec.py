"""Figure specs: what to read, which figure kind, where to write it."""

from __future__ import annotations

import glob
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import yaml

from .errors import EmptyInput, SpecError

KINDS = ("series", "heatmap", "scaling", "table", "observer")

# Vector output for line art, raster for pixel maps.
DEFAULT_FORMAT = {
    "series": "pdf",
    "heatmap": "png",
    "scaling": "pdf",
    "table": "pdf",
    "observer": "pdf",
}
FORMATS = ("pdf", "png", "svg")

_FIELDS = (
    "kind",
    "inputs",
    "out",
    "format",
    "title",
    "xlabel",
    "ylabel",
    "xlim",
    "ylim",
    "dpi",
    "options",
)


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input globs, kind, axis dressing, output path."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    format: Optional[str] = None
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None
    dpi: int = 100
    options: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown kind {self.kind!r}, expected one of {KINDS}", "kind")
        if not self.inputs:
            raise SpecError("at least one input glob is required", "inputs")
        if self.format is not None and self.format not in FORMATS:
            raise SpecError(f"unknown format {self.format!r}, expected one of {FORMATS}", "format")
        if self.dpi <= 0:
            raise SpecError("dpi must be positive", "dpi")
        for name in ("xlim", "ylim"):
            lim = getattr(self, name)
            if lim is not None and len(lim) != 2:
                raise SpecError("limits need exactly two values", name)

    @property
    def out_format(self) -> str:
        return self.format if self.format is not None else DEFAULT_FORMAT[self.kind]

    def out_path(self) -> Path:
        out = Path(self.out)
        if out.suffix == "":
            out = out.with_suffix("." + self.out_format)
        return out

    def resolve_inputs(self, base_dir=None) -> list[Path]:
        """Expand the input globs, sorted per glob; relative to base_dir."""
        base = Path(base_dir) if base_dir is not None else Path(".")
        found: list[Path] = []
        for pattern in self.inputs:
            pattern_path = pattern if Path(pattern).is_absolute() else str(base / pattern)
            matches = sorted(glob.glob(pattern_path))
            found.extend(Path(m) for m in matches)
        if not found:
            raise EmptyInput(f"no files match inputs {list(self.inputs)}")
        return found


def from_mapping(mapping: Mapping) -> FigureSpec:
    if not isinstance(mapping, Mapping):
        raise SpecError("figure spec must be a mapping")
    unknown = set(mapping) - set(_FIELDS)
    if unknown:
        raise SpecError(f"unknown fields {sorted(unknown)}")
    for key in ("kind", "inputs", "out"):
        if key not in mapping:
            raise SpecError("required field missing", key)
    inputs = mapping["inputs"]
    if isinstance(inputs, str):
        inputs = (inputs,)
    elif isinstance(inputs, (list, tuple)):
        inputs = tuple(str(i) for i in inputs)
    else:
        raise SpecError("inputs must be a string or list of strings", "inputs")
    kwargs = {}
    for key in ("format", "title", "xlabel", "ylabel"):
        if key in mapping and mapping[key] is not None:
            kwargs[key] = str(mapping[key])
    for key in ("xlim", "ylim"):
        if key in mapping and mapping[key] is not None:
            lim = mapping[key]
            if not isinstance(lim, (list, tuple)) or len(lim) != 2:
                raise SpecError("limits need exactly two values", key)
            kwargs[key] = (float(lim[0]), float(lim[1]))
    if "dpi" in mapping:
        kwargs["dpi"] = int(mapping["dpi"])
    if "options" in mapping:
        options = mapping["options"]
        if not isinstance(options, Mapping):
            raise SpecError("options must be a mapping", "options")
        kwargs["options"] = dict(options)
    return FigureSpec(
        kind=str(mapping["kind"]),
        inputs=inputs,
        out=str(mapping["out"]),
        **kwargs,
    )


def load_spec(path) -> FigureSpec:
    """Read a spec file; JSON for .json, YAML otherwise."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}")
    if path.suffix == ".json":
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: not valid JSON: {exc}")
    else:
        try:
            mapping = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SpecError(f"{path}: not valid YAML: {exc}")
    return from_mapping(mapping)
