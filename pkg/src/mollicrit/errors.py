"""Exception and warning types shared by all modules."""


class MollicritError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MollicritError, ValueError):
    """Argument outside the region where an operation is defined."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class ConvergenceError(MollicritError, ArithmeticError):
    """A series or iteration failed to reach its tolerance."""


class ConfigError(MollicritError):
    """Malformed or inconsistent configuration."""


class NumericalWarning(UserWarning):
    """Result computed but its accuracy could not be certified."""
