"""Edge domination in incidence graphs of designs and related structures."""

from .core import (
    IncidenceFreePair,
    IncidenceStructure,
    Polarity,
    StructureParams,
    classify,
    dual,
    is_incidence_free,
    read_inc,
    write_inc,
)
from .gfield import FiniteField, field_create

__version__ = "0.1.0"

__all__ = [
    "FiniteField",
    "IncidenceFreePair",
    "IncidenceStructure",
    "Polarity",
    "StructureParams",
    "classify",
    "dual",
    "field_create",
    "is_incidence_free",
    "read_inc",
    "write_inc",
]
