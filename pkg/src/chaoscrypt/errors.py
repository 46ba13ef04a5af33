"""Exception types raised across the package."""


class ChaosCryptError(Exception):
    """Base class for all package errors."""


class InvalidParams(ChaosCryptError, ValueError):
    pass


class IntegrationDiverged(ChaosCryptError, ArithmeticError):
    pass


class SingularCurve(ChaosCryptError, ValueError):
    pass


class NotPrime(ChaosCryptError, ValueError):
    pass


class LengthMismatch(ChaosCryptError, ValueError):
    pass


class DimensionMismatch(ChaosCryptError, ValueError):
    pass


class MalformedEnvelope(ChaosCryptError, ValueError):
    pass


class KeyFileError(ChaosCryptError, ValueError):
    pass


class UndefinedCorrelation(ChaosCryptError, ArithmeticError):
    """Correlation requested on a pair set with zero variance or fewer than 3 pairs."""


class OutOfBounds(ChaosCryptError, ValueError):
    pass


class MalformedHeader(ChaosCryptError, ValueError):
    pass


class TruncatedData(ChaosCryptError, ValueError):
    pass


class UnsupportedMaxval(ChaosCryptError, ValueError):
    pass
