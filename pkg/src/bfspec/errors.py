"""Exception hierarchy shared by all bfspec modules."""


class BFSpecError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(BFSpecError, ValueError):
    pass


class DomainError(BFSpecError, ValueError):
    pass


class NonDifferentiable(BFSpecError):
    pass


class ParseError(BFSpecError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownFunction(ParseError):
    pass


class UnknownParameter(BFSpecError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ExtrapolationDiverged(BFSpecError):
    pass


class ResonantDenominator(BFSpecError):
    pass


class NewtonDiverged(BFSpecError):
    pass


class TruncationTooSmall(BFSpecError):
    pass


class DegenerateCoefficient(BFSpecError):
    def __init__(self, quantity, value):
        self.quantity = quantity
        self.value = value
        super().__init__(f"{quantity} vanishes (|{quantity}| = {abs(value):.3e})")


class NotUnstable(BFSpecError):
    pass


class WrongCount(BFSpecError):
    pass


class EigensolverFailure(BFSpecError):
    pass


class ContourHitsSpectrum(BFSpecError):
    pass


class RankNotThree(BFSpecError):
    pass


class BracketInvalid(BFSpecError):
    pass


class InvalidN(BFSpecError, ValueError):
    pass
