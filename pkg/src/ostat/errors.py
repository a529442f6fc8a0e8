"""Exception types shared across the package."""


class OstatError(Exception):
    """Base class for all errors raised by ostat."""


class DomainError(OstatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(OstatError, ValueError):
    """The model does not satisfy the hypotheses a bound requires."""


class ConfigurationError(OstatError, ValueError):
    """An experiment, band or CLI invocation is misconfigured."""
