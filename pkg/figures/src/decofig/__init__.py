"""Figure pipeline for the simulation package's CSV/JSON artifacts."""

from .errors import EmptyInput, FigureError, SchemaMismatch, SpecError
from .render import RenderResult, render
from .spec import DEFAULT_FORMAT, KINDS, FigureSpec, from_mapping, load_spec

__all__ = [
    "DEFAULT_FORMAT",
    "EmptyInput",
    "FigureError",
    "FigureSpec",
    "KINDS",
    "RenderResult",
    "SchemaMismatch",
    "SpecError",
    "from_mapping",
    "load_spec",
    "render",
]
