"""Exception types shared across the package."""


class PLRChainError(Exception):
    """Base class for all errors raised by plr_chain."""


class ConfigurationError(PLRChainError, ValueError):
    """A model or experiment configuration is invalid."""


class ArgumentError(PLRChainError, ValueError):
    """An operation received arguments outside its domain (e.g. a site index)."""


class ConvergenceError(PLRChainError, ArithmeticError):
    """The eigensolver failed to converge.

    ``index`` is the offending eigenvalue index reported by LAPACK, or ``None``
    when the backend does not say.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class BoundaryError(PLRChainError):
    """The propagating front reached the right edge of the finite chain; increase n."""


class ResourceError(PLRChainError):
    """A dense many-body computation was requested beyond the hard size cap."""


class EnsembleError(PLRChainError):
    """An observable failed on one disorder realization."""

    def __init__(self, index, cause):
        super().__init__(f"observable failed on realization {index}: {cause!r}")
        self.index = index
        self.cause = cause
