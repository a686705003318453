"""Exception hierarchy shared by the library and ``steerctl``."""


class SteerkitError(Exception):
    """Base class for every error raised by steerkit."""


class InputError(SteerkitError, ValueError):
    """Malformed operator, measurement, state or file contents."""


class BudgetExceeded(SteerkitError):
    """An exhaustive enumeration would exceed its configured budget."""


class QuadratureError(SteerkitError):
    """A quadrature could not certify the requested accuracy."""


class ConvergenceError(SteerkitError):
    """An iterative solver failed to converge."""
