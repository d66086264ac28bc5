"""Context-tagged binary multiprecision scalars."""

from src.precision.context import (
    ROUNDING,
    MPComplex,
    MPReal,
    PrecisionContext,
    context_of,
    get_context,
)
from src.precision.scalar import (
    ArithOp,
    arith,
    as_fraction,
    from_decimal,
    machine_epsilon,
    round_trip_digits,
    to_context,
    to_decimal,
)

__all__ = [
    "ROUNDING",
    "MPComplex",
    "MPReal",
    "PrecisionContext",
    "context_of",
    "get_context",
    "ArithOp",
    "arith",
    "as_fraction",
    "from_decimal",
    "machine_epsilon",
    "round_trip_digits",
    "to_context",
    "to_decimal",
]
