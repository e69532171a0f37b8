"""Exception types shared across the package.

Every error raised on bad input data derives from :class:`DataError`, which the
CLI maps to exit code 2.
"""


class AnobenchError(Exception):
    """Base class for all package errors."""


class DataError(AnobenchError, ValueError):
    """Input data violates a documented contract."""


class NonFiniteValue(DataError):
    pass


class LabelDomain(DataError):
    pass


class LengthMismatch(DataError):
    pass


class DimMismatch(DataError):
    pass


class DegenerateData(DataError):
    pass


class KTooLarge(DataError):
    pass


class SingleClassTraining(DataError):
    pass


class SingleClassEval(DataError):
    pass


class NoPositives(DataError):
    pass


class NoAnomalies(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class TooFewSamples(DataError):
    pass


class TooFewPairs(DataError):
    pass


class DegenerateTable(DataError):
    pass


class MissingCell(DataError):
    pass


class FactorOutOfRange(DataError):
    pass


class RatioOutOfRange(DataError):
    pass


class AnomalyRatioTooHigh(DataError):
    pass


class ParseError(DataError):
    pass


class MissingLabelColumn(DataError):
    pass


class ConfigError(AnobenchError, ValueError):
    """Malformed or out-of-domain benchmark configuration."""


class UnknownParameter(ConfigError):
    pass
