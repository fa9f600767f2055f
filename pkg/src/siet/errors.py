"""Exception types raised by the library."""


class SietError(ValueError):
    """Base class for all domain errors."""


class CountMismatch(SietError):
    pass


class NotAPmf(SietError):
    pass


class RadiusTooLarge(SietError):
    pass


class InvalidConstellation(SietError):
    """Raised when a constellation fails validation where a valid one is required."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class DegenerateConstellation(SietError):
    pass


class Infeasible(SietError):
    pass


class UnrealizableType(SietError):
    pass


class TooManyCodewords(SietError):
    pass


class Exhausted(SietError):
    pass


class ZeroTypeEntry(SietError):
    pass


class InvalidEpsilon(SietError):
    pass


class InfeasibleGeometry(SietError):
    pass
