"""Exception hierarchy shared by all cavityqc modules."""


class CavityQCError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(CavityQCError, ValueError):
    """An argument is outside its documented domain."""


class UnsupportedConfigurationError(CavityQCError, ValueError):
    """A valid parameter set that the requested operation does not handle."""


class ResourceLimitError(CavityQCError, MemoryError):
    """The requested Hilbert space exceeds the configured dimension cap."""


class NumericalFailureError(CavityQCError, ArithmeticError):
    """An integrator or tolerance check did not converge."""


class FitFailureError(NumericalFailureError):
    """Eigenvector identification for the effective coupling was ambiguous."""


class DegenerateBranchError(NumericalFailureError):
    """A forced measurement outcome has (numerically) zero probability."""
