"""Exception and warning types shared across the package."""


class DecolabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DecolabError):
    """Scenario configuration is malformed or inconsistent."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class GridTooSmall(DecolabError):
    """State support does not fit inside the grid with the required margin."""


class NotNormalizable(DecolabError):
    """State has zero (or non-finite) norm."""


class NonPositiveSpectrum(DecolabError):
    """Density-matrix spectrum has an eigenvalue below tolerance."""


class DomainError(DecolabError):
    """Argument outside the mathematical domain of the operation."""


class UndefinedScale(DecolabError):
    """Nonlinearity scale undefined (both derivatives vanish)."""


class SchemeInstability(DecolabError):
    """Numerical scheme produced a non-physical state (NaN/Inf or broken symmetry)."""


class ZeroBath(DecolabError):
    """Operation requires a dissipative bath but D = 0."""


class NotConverged(DecolabError):
    """Running estimate still drifting at the end of the averaging window."""


class WindowTooSparse(DecolabError):
    """Fit window contains fewer than three samples."""


class MismatchedSeries(DecolabError):
    """Diagnostic series disagree on scenario identity or time grid."""


class SubPlanckPatch(DecolabError):
    """Phase-space patch smaller than hbar requested."""


class SubPlanckAction(DecolabError):
    """Action argument at or below hbar where a logarithm would turn negative."""


class ZeroProbabilityBranch(DecolabError):
    """Conditioning on a measurement record of (numerically) zero probability."""


class DepthCapExceeded(DecolabError):
    """Branch-tree expansion would exceed the configured depth/size cap."""


class UnsupportedPotential(DecolabError):
    """Operation needs analytic derivatives or grid support the kind lacks."""


class UnitMismatch(DecolabError):
    """Dimensioned quantities combined incompatibly."""


class NumericalAbort(DecolabError):
    """Evolution aborted on a violated runtime invariant (positivity, norm blowup)."""


class StabilityWarning(UserWarning):
    """Step size large relative to the fastest resolved rate."""
