"""Exception types. All derive from ValueError so callers can catch broadly."""


class EscapeLabError(ValueError):
    pass


class DimensionMismatch(EscapeLabError):
    pass


class NegativeTime(EscapeLabError):
    pass


class InvalidSpacing(EscapeLabError):
    pass


class OutsideBall(EscapeLabError):
    pass


class LengthMismatch(EscapeLabError):
    pass


class InvalidLambda(EscapeLabError):
    pass


class NotAnExpansion(EscapeLabError):
    pass


class InvalidTau(EscapeLabError):
    pass


class InvalidMotion(EscapeLabError):
    pass


class InvalidDimension(EscapeLabError):
    pass


class OutOfRange(EscapeLabError):
    pass
