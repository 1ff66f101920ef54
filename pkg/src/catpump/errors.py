"""Exception taxonomy shared by all modules.

Everything raised on purpose derives from CatpumpError so callers can
distinguish library failures from plain bugs. The CLI maps ConfigError to
exit code 2 and every other CatpumpError to exit code 3.
"""


class CatpumpError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(CatpumpError):
    """A Fock-space dimension is too small or inconsistent."""


class InvalidParameterError(CatpumpError):
    """A physical parameter violates its documented precondition."""


class ShapeMismatchError(CatpumpError):
    """Operands do not share compatible dimensions."""


class TruncationError(CatpumpError):
    """The requested amplitude cannot be represented at this truncation.

    Carries the minimum adequate dimension in ``required_dim`` when known.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class IntegratorError(CatpumpError):
    """Fixed-step integration drifted outside its conservation guards.

    ``diagnostics`` holds a dict with the step index, time, and the
    offending drift values.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IncompleteResetError(CatpumpError):
    """Residual pump population after a reset phase exceeded the threshold.

    ``residual`` is the measured leftover mean photon number.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(CatpumpError):
    """A run configuration failed validation; message names the field."""
