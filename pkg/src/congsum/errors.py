"""Exception types raised across the package."""


class CongsumError(ValueError):
    pass


class NotPrime(CongsumError):
    pass


class TooSmall(CongsumError):
    pass


class ZeroInverse(CongsumError, ZeroDivisionError):
    pass


class IndexOutOfRange(CongsumError):
    pass


class BadInterval(CongsumError):
    pass


class RoundingDrift(CongsumError, ArithmeticError):
    pass


class NotSquareFree(CongsumError):
    pass


class NotCoprime(CongsumError):
    pass


class PrincipalCharacter(CongsumError):
    pass


class TooLarge(CongsumError):
    pass


class BudgetExceeded(CongsumError):
    pass


class BadEll(CongsumError):
    pass


class OddEll(BadEll):
    pass


class DimensionMismatch(CongsumError):
    pass


class WeightedInput(CongsumError):
    pass


class DomainError(CongsumError):
    pass


class ConfigError(CongsumError):
    pass


class DeligneViolation(CongsumError, ArithmeticError):
    pass


class CacheMismatch(CongsumError):
    pass
