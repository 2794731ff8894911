"""Exception hierarchy shared by all modules."""


class DrinfeldError(Exception):
    """Base class for computational errors raised by the library."""

    code = "error"


class UnsupportedParams(DrinfeldError):
    code = "unsupported-params"


class ZeroInput(DrinfeldError):
    code = "zero-input"


class IndeterminateValuation(DrinfeldError):
    code = "indeterminate-valuation"


class DivisionByZero(DrinfeldError, ZeroDivisionError):
    code = "division-by-zero"


class NotNormalized(DrinfeldError):
    code = "not-normalized"


class MalformedPolygon(DrinfeldError):
    code = "malformed-polygon"


class DependentGenerators(DrinfeldError):
    code = "dependent-generators"


class PrecisionExhausted(DrinfeldError):
    code = "precision-exhausted"


class TruncationNotStabilized(DrinfeldError):
    code = "truncation-not-stabilized"


class IllDefinedExponent(DrinfeldError):
    code = "ill-defined-exponent"


class ZeroCarlitzCoefficient(DrinfeldError):
    code = "zero-carlitz-coefficient"


class NotInFk(DrinfeldError):
    code = "not-in-fk"


class NotInFundamentalDomain(DrinfeldError):
    code = "not-in-fundamental-domain"


class FiberNotConstant(DrinfeldError):
    code = "fiber-not-constant"


class UsageError(DrinfeldError):
    code = "usage"
