"""Exception hierarchy shared by the library and the command line."""


class CurError(Exception):
    """Base class for all curkit errors."""

    exit_code = 1


class ConfigurationError(CurError, ValueError):
    """Invalid parameters: counts out of range, bad method names, mu too small."""

    exit_code = 2


class DataError(CurError, ValueError):
    """Input data could not be parsed or is unusable."""

    exit_code = 3


class NumericalError(CurError, ArithmeticError):
    """A numerical procedure failed to deliver its contract."""

    exit_code = 4


class CountUnreachableError(NumericalError):
    """Bisection on the regularization weight never produced the requested count."""
