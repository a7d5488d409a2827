"""Joint extraction of mathematical symbols, their descriptions and the links between them."""

from .errors import (
    ConfigError,
    CorpusFormatError,
    DimensionError,
    DivergenceError,
    EncoderOverflowError,
    SymdescError,
    UndefinedRateError,
    ValidationError,
)
from .labels import DOMAINS, ENTITY_TYPES, RELATION_TYPES

__version__ = "0.1.0"
