"""Exception types raised across the package."""


class HigherDRError(Exception):
    """Base class for all errors raised by higherdr."""


class PreconditionViolation(HigherDRError, ValueError):
    pass


class ComponentOutOfRange(PreconditionViolation):
    """A multi-index J was not componentwise below I."""


class DivisibilityViolation(HigherDRError, ArithmeticError):
    """An exact division that must hold did not. Indicates a bug."""


class GradeMismatch(PreconditionViolation):
    pass


class IndexOutOfRange(PreconditionViolation, IndexError):
    pass


class NotAComplex(HigherDRError):
    """Consecutive differentials do not compose to zero."""


class NotChainMap(HigherDRError):
    pass


class ParamMismatch(PreconditionViolation):
    pass


class LevelMismatch(PreconditionViolation):
    pass


class NoUnitSplitting(HigherDRError):
    """No splitting A + B = I with a unit coefficient was found."""


class ConfigError(HigherDRError, ValueError):
    pass
