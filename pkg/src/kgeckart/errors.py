"""Exception hierarchy."""


class KGError(Exception):
    """Base class for every error raised by kgeckart."""


# configuration
class ConfigError(KGError, ValueError):
    pass


class MissingField(ConfigError):
    pass


class NonFinite(ConfigError):
    pass


class NonPositive(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


# superpotential / ladder
class ComplexDiscriminant(KGError, ValueError):
    """No real superpotential exists at this trial energy."""


class DivisionByZero(KGError, ZeroDivisionError):
    pass


class SingularMap(KGError, ZeroDivisionError):
    pass


class LadderTerminated(KGError, ValueError):
    pass


# spectrum
class ComplexDelta(KGError, ValueError):
    pass


class DegenerateIndex(KGError, ValueError):
    pass


class NoRoot(KGError):
    """Level ``n`` is not bound."""


class NoConvergence(KGError, RuntimeError):
    pass


# wavefunctions
class NotNormalizable(KGError, ValueError):
    pass


class PoleAtOrigin(KGError, ValueError):
    pass


# numerics
class EvenSampleCount(KGError, ValueError):
    pass


class TooFewSamples(KGError, ValueError):
    pass


class RecurrenceBreakdown(KGError, ArithmeticError):
    """Leading recurrence coefficient vanished; callers fall back to the series."""


# oracle
class NoBoundState(KGError):
    pass


class IllConditionedShift(KGError, ValueError):
    pass
