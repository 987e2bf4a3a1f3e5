"""Exception hierarchy shared by all modules."""


class SempleError(Exception):
    pass


class NonzeroConstantTerm(SempleError):
    pass


class SingularLinearPart(SempleError):
    pass


class BasePointMismatch(SempleError):
    pass


class OrderMismatch(SempleError):
    pass


class TruncationExhausted(SempleError):
    """The working order is too small for the requested computation."""


class ConstantCurve(SempleError):
    pass


class ZeroDirection(SempleError):
    pass


class LevelOutOfRange(SempleError):
    pass


class ChartEscape(SempleError):
    pass


class NoVerticalAtLevelZero(SempleError):
    pass


class DegenerateGerm(SempleError):
    pass


class InsufficientJetDegree(SempleError):
    pass


class ConstraintInconsistent(SempleError):
    def __init__(self, msg, level=None):
        super().__init__(msg)
        self.level = level


class LevelMismatch(SempleError):
    pass


class UnrealizableClass(SempleError):
    pass


class ParseError(SempleError):
    def __init__(self, msg, position):
        super().__init__(f"{msg} at position {position}")
        self.position = position


class OrderOverflow(SempleError):
    pass
