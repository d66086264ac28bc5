"""Scalar operations on context-tagged multiprecision values.

Covers the machine epsilon of a width, checked arithmetic between values of
one context, conversion between contexts, and the round-trip decimal format
used by spectrum files.
"""

from __future__ import annotations

import math
from enum import StrEnum
from fractions import Fraction
from typing import Any

from mpmath import libmp

from src.errors import ArithmeticDomainError, ContextMismatchError
from src.precision.context import (
    MPComplex,
    MPReal,
    PrecisionContext,
    context_of,
    get_context,
    parse_decimal_raw,
)


class ArithOp(StrEnum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    SQRT = "sqrt"
    ABS = "abs"


_UNARY = frozenset({ArithOp.SQRT, ArithOp.ABS})


def machine_epsilon(bits: int) -> MPReal:
    """Interval machine precision ``2 * 2**-bits``, exact at precision ``bits``.

    Raises:
        InvalidPrecisionError: If ``bits < 2``.
    """
    return get_context(bits).epsilon


def round_trip_digits(bits: int) -> int:
    """Significant decimal digits that make ``to_decimal`` invertible."""
    return math.ceil(bits * math.log10(2)) + 2


def arith(a: Any, b: Any, op: ArithOp | str) -> Any:
    """Apply ``op`` to values of one precision context.

    ``b`` is ignored (pass ``None``) for the unary ``sqrt`` and ``abs``.
    mpmath keeps exponents unbounded, so complex division and ``abs`` cannot
    overflow.

    Raises:
        ContextMismatchError: Operands were created in different contexts.
        ArithmeticDomainError: Division by an exact zero.
    """
    op = ArithOp(op)
    ctx = context_of(a)
    if op in _UNARY:
        if op is ArithOp.ABS:
            return abs(a)
        return ctx.mp.sqrt(a)

    if context_of(b) is not ctx:
        raise ContextMismatchError(
            f"operands use {ctx.bits} and {context_of(b).bits} bits; convert with to_context first"
        )
    if op is ArithOp.ADD:
        return a + b
    if op is ArithOp.SUB:
        return a - b
    if op is ArithOp.MUL:
        return a * b
    if not b:
        raise ArithmeticDomainError("division by exact zero")
    return a / b


def to_context(value: Any, ctx: PrecisionContext) -> Any:
    """Re-express ``value`` at ``ctx`` precision (exact when widening)."""
    if isinstance(value, MPComplex):
        return ctx.complex(value)
    return ctx.real(value)


def as_fraction(value: MPReal) -> Fraction:
    """The exact rational value of a finite real."""
    p, q = libmp.to_rational(value._mpf_)
    return Fraction(p, q)


def to_decimal(value: MPReal, digits: int | None = None) -> str:
    """Render a real in scientific notation (``5.0e-1``).

    Args:
        value: A finite real.
        digits: Significant digits; defaults to the round-trip count for the
            value's precision.
    """
    if digits is None:
        digits = round_trip_digits(context_of(value).bits)
    return libmp.to_str(
        value._mpf_,
        digits,
        strip_zeros=True,
        min_fixed=0,
        max_fixed=0,
        show_zero_exponent=True,
    )


def from_decimal(text: str, ctx: PrecisionContext | int) -> MPReal:
    """Parse a decimal literal, rounding once to the target precision.

    Raises:
        DecimalParseError: ``text`` is not a finite decimal literal.
    """
    if not isinstance(ctx, PrecisionContext):
        ctx = get_context(ctx)
    return ctx.mp.make_mpf(parse_decimal_raw(text, ctx.bits))
