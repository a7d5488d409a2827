"""Exception hierarchy shared by all modules."""


class SymdescError(Exception):
    """Base class for every error raised by this package."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class CorpusFormatError(SymdescError):
    code = "format_error"


class ValidationError(SymdescError):
    code = "validation_error"


class ConfigError(SymdescError):
    code = "config_error"


class EncoderOverflowError(SymdescError):
    code = "encoder_overflow"


class DimensionError(SymdescError):
    code = "dimension_error"


class UndefinedRateError(SymdescError):
    code = "undefined_rate"


class DivergenceError(SymdescError):
    code = "divergence"


class UnbalancedMathWarning(UserWarning):
    """An opening math delimiter without a matching close."""
