"""
Error types raised by the CFMM services.
"""


class CFMMError(Exception):
    """Base class for all service errors."""

    pass


class DomainError(CFMMError, ValueError):
    """Input outside the domain of a function or a model."""

    pass


class ConvergenceError(CFMMError):
    """Iterative method did not converge within its iteration cap."""

    pass


class NumeraireError(CFMMError):
    """Gradient component of the numeraire is not strictly positive."""

    pass


class RootFindError(CFMMError):
    """Scalar root finding failed to bracket or locate a root."""

    pass


class NoBracket(RootFindError):
    """Level constraint crossing is not bracketed on the search interval."""

    pass


class NotComplementary(CFMMError):
    """Trade receives and tenders the same asset beyond tolerance."""

    pass


class ConfigError(CFMMError):
    """Experiment configuration cannot be loaded or is inconsistent."""

    pass
