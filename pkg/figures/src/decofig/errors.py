"""Error types for the figure pipeline."""


class FigureError(Exception):
    """Base class for figure-pipeline failures."""


class SpecError(FigureError):
    """Figure spec is malformed: unknown kind, unknown field, bad value."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class SchemaMismatch(FigureError):
    """Input file does not conform to the documented artifact schema."""

    def __init__(self, message: str, path=None):
        self.path = None if path is None else str(path)
        super().__init__(message if path is None else f"{path}: {message}")


class EmptyInput(FigureError):
    """No input files matched, or the inputs carry no plottable data."""

    def __init__(self, message: str, path=None):
        self.path = None if path is None else str(path)
        super().__init__(message if path is None else f"{path}: {message}")
