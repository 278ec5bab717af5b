"""Exception hierarchy shared by every module."""


class CuError(Exception):
    """Base class for all library errors."""


class MixedSemigroup(CuError):
    pass


class NotIncreasing(CuError):
    pass


class BadDescriptor(CuError):
    pass


class BadParam(CuError):
    pass


class BadConstraint(CuError):
    pass


class InvalidTable(CuError):
    def __init__(self, axiom: str, detail: str = ""):
        self.axiom = axiom
        super().__init__(f"{axiom}: {detail}" if detail else axiom)


class NotAbsorbing(CuError):
    pass


class BadPairing(CuError):
    pass


class InvalidElement(CuError):
    pass


class EmptyFragment(CuError):
    pass


class EmptyFunctionalFamily(CuError):
    pass


class NotIdeal(CuError):
    pass


class NotAuxiliary(CuError):
    pass


class MorphismMismatch(CuError):
    pass


class NotUltrafilter(CuError):
    pass


class NotCancellative(CuError):
    pass


class UnrecognizedClass(CuError):
    pass


class UnsupportedOperation(CuError):
    pass


class UnknownFunctionalSpace(CuError):
    pass


class NotRealizable(CuError):
    pass


class NotMonotone(CuError):
    pass


class NotNormalized(CuError):
    pass


class NotSubequivalent(CuError):
    pass


class UnknownFixture(CuError):
    pass


class ValidationError(CuError):
    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"{name}: {reason}")


class ParseError(CuError):
    def __init__(self, line: int, column: int, reason: str):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")
