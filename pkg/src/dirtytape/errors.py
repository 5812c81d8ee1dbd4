"""Exception hierarchy shared by every module."""


class DirtyTapeError(Exception):
    """Base class for all library errors."""


class ParameterError(DirtyTapeError, ValueError):
    """An input lies outside the domain of the requested quantity."""


class DegeneracyError(DirtyTapeError, ArithmeticError):
    """A covariance block is singular (deterministic dependence between variables)."""


class NumericalError(DirtyTapeError, RuntimeError):
    """A numerical routine failed to reach its accuracy target."""
