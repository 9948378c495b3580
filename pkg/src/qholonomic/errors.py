"""Exception types shared across the package."""


class QHolonomicError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(QHolonomicError, ValueError):
    pass


class PoleAtExpansionPoint(QHolonomicError, ZeroDivisionError):
    pass


class OutOfRange(QHolonomicError, IndexError):
    """A discrete function was sampled outside its declared range."""


class NotEven(QHolonomicError, ValueError):
    """The element is not fixed by the involution E^a Q^b -> E^-a Q^-b."""


class NotInImage(QHolonomicError, ValueError):
    pass


class AllZeroThroughM(QHolonomicError, ArithmeticError):
    """Every differential operator up to the requested level vanished."""


class SingularAtExpansionPoint(QHolonomicError, ArithmeticError):
    pass


class OracleMismatch(QHolonomicError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class InconsistentSystem(QHolonomicError, ArithmeticError):
    pass


class ResourceLimit(QHolonomicError, RuntimeError):
    pass
