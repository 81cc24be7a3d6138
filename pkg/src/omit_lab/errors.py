"""Exception hierarchy for omit_lab.

Every error raised on purpose by this package derives from
:class:`OmitLabError`, so callers can catch one base class at an API
boundary (the command-line driver does exactly that).
"""

from __future__ import annotations

__all__ = [
    "OmitLabError",
    "InvalidParameterError",
    "ConfigError",
    "NonConvergentError",
    "SingularSystemError",
    "UnsupportedTopologyError",
    "RegimeViolationError",
    "DegeneratePointError",
    "UnstableIntegrationError",
]


class OmitLabError(Exception):
    """Base class for all omit_lab errors."""


class InvalidParameterError(OmitLabError, ValueError):
    """A physical parameter or argument is out of its allowed range."""


class ConfigError(OmitLabError, ValueError):
    """A configuration file is malformed, incomplete, or contradictory."""


class NonConvergentError(OmitLabError, RuntimeError):
    """An iterative solve stopped without meeting its tolerance.

    Attributes
    ----------
    residual : float
        Best relative residual achieved before giving up.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, message: str, *, residual: float = float("nan"),
                 iterations: int = 0) -> None:
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularSystemError(OmitLabError, RuntimeError):
    """A linear response system is singular at the requested frequency."""


class UnsupportedTopologyError(OmitLabError, ValueError):
    """The requested operation is not defined for this mode layout."""


class RegimeViolationError(OmitLabError, ValueError):
    """An approximate treatment was requested outside its domain of validity."""


class DegeneratePointError(OmitLabError, ValueError):
    """A derived quantity is undefined at the requested point."""


class UnstableIntegrationError(OmitLabError, RuntimeError):
    """A time-domain integration diverged (runaway cavity amplitude)."""
