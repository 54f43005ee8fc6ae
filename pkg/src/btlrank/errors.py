"""Exception hierarchy shared by every btlrank module."""


class BtlError(Exception):
    """Base class for all btlrank errors."""


class ValidationError(BtlError, ValueError):
    """An argument or input file violates a documented precondition."""


class MLENonexistenceError(BtlError):
    """The vanilla MLE does not exist for the given data.

    Raised when the directed win graph is not strongly connected, or a tree
    edge was won (or lost) in every comparison, so the likelihood has no
    finite maximiser.
    """


class NumericalError(BtlError, ArithmeticError):
    """A non-finite value appeared during optimisation."""
