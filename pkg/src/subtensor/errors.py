"""Exception hierarchy shared by every module."""


class SubtensorError(Exception):
    """Base class for all library errors."""


class InvalidParam(SubtensorError, ValueError):
    pass


class CapExceeded(SubtensorError):
    """Dense materialization would exceed the configured entry cap."""


class BudgetExceeded(SubtensorError):
    """An evaluation or enumeration budget would be exceeded."""


class IndexOutOfRange(SubtensorError, IndexError):
    pass


class ShapeMismatch(SubtensorError, ValueError):
    pass


class HypothesisViolated(SubtensorError, ValueError):
    """A theorem's hypothesis does not hold for the supplied inputs."""


class Singular(SubtensorError, ArithmeticError):
    pass
