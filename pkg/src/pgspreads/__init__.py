"""Maximal partial line spreads in PG(5,q): construction, search, verification."""

from .gf import Field, FieldError, field_arith, field_make
from .projgeom import (
    GeometryContext,
    GeometryError,
    Hyperplane,
    Line,
    context_make,
    counts,
    normalize_point,
)
from .spreadcore import (
    PartialSpread,
    SpreadConflictError,
    deficiency,
    extension_witness,
    hyperplane_saturated,
    is_maximal,
    spread_size,
)

__version__ = "0.1.0"

__all__ = [
    "Field",
    "FieldError",
    "field_arith",
    "field_make",
    "GeometryContext",
    "GeometryError",
    "Hyperplane",
    "Line",
    "context_make",
    "counts",
    "normalize_point",
    "PartialSpread",
    "SpreadConflictError",
    "deficiency",
    "extension_witness",
    "hyperplane_saturated",
    "is_maximal",
    "spread_size",
    "__version__",
]
