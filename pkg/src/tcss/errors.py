"""Exception hierarchy shared by all modules."""


class TcssError(ValueError):
    """Base class for every validation or computation error raised here."""


class NonPrime(TcssError):
    pass


class ReducibleModulus(TcssError):
    pass


class ZeroCoefficient(TcssError):
    pass


class PrecisionTooLow(TcssError):
    pass


class NotDivisible(TcssError):
    pass


class ContextMismatch(TcssError):
    pass


class WcapTooSmall(TcssError):
    pass


class NotEisenstein(TcssError):
    pass


class BadConstant(TcssError):
    pass


class NonUnitLeading(TcssError):
    pass


class SpecFormatError(TcssError):
    pass


class DomainViolation(TcssError):
    pass


class ConsistencyViolation(RuntimeError):
    """Raised when two differentials claim the same target class."""
