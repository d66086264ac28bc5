"""Precision contexts: a binary significand width bound to its own mpmath context.

Every scalar created through a :class:`PrecisionContext` carries that context
(``value.context``), so values of different widths can live side by side in
one process. Rounding is always round-to-nearest-even.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, TypeAlias

import mpmath
from mpmath import libmp
from mpmath.ctx_mp_python import _mpc, _mpf

from src.errors import ContextMismatchError, DecimalParseError, InvalidPrecisionError

MPReal: TypeAlias = _mpf
MPComplex: TypeAlias = _mpc

ROUNDING = libmp.round_nearest


class PrecisionContext:
    """Arithmetic with ``bits`` significand bits.

    Obtain instances through :func:`get_context` so that each width maps to one
    shared context object.
    """

    __slots__ = ("_bits", "_mp")

    def __init__(self, bits: int) -> None:
        if int(bits) != bits or bits < 2:
            raise InvalidPrecisionError(f"precision must be an integer >= 2, got {bits!r}")
        mp = mpmath.MPContext()
        mp.prec = int(bits)
        self._bits = int(bits)
        self._mp = mp

    @property
    def bits(self) -> int:
        return self._bits

    @property
    def mp(self) -> Any:
        """The underlying ``mpmath.MPContext`` (precision fixed at ``bits``)."""
        return self._mp

    @property
    def epsilon(self) -> MPReal:
        """Interval machine precision 2 * 2**-P."""
        return self._mp.make_mpf(libmp.from_man_exp(1, 1 - self._bits))

    @property
    def zero(self) -> MPComplex:
        return self._mp.make_mpc((libmp.fzero, libmp.fzero))

    @property
    def one(self) -> MPComplex:
        return self._mp.make_mpc((libmp.fone, libmp.fzero))

    def owns(self, value: Any) -> bool:
        """Whether ``value`` is an mpmath number of this context."""
        return getattr(value, "context", None) is self._mp

    # ── Conversions (each rounds exactly once) ─────────────────────────

    def real(self, value: Any) -> MPReal:
        """Convert ``value`` to a real at this precision, correctly rounded."""
        return self._mp.make_mpf(self._raw_real(value))

    def complex(self, value: Any, imag: Any = 0) -> MPComplex:
        """Convert ``value`` (+ ``imag``·i) to a complex at this precision."""
        if isinstance(value, _mpc):
            raw = libmp.mpc_pos(value._mpc_, self._bits, ROUNDING)
            if imag:
                raw = (raw[0], libmp.mpf_add(raw[1], self._raw_real(imag), self._bits, ROUNDING))
            return self._mp.make_mpc(raw)
        if isinstance(value, complex):
            if imag:
                raise TypeError("imag must be zero when value is a Python complex")
            return self._mp.make_mpc((self._raw_real(value.real), self._raw_real(value.imag)))
        return self._mp.make_mpc((self._raw_real(value), self._raw_real(imag)))

    def rational(self, numerator: int, denominator: int = 1) -> MPReal:
        """The rational ``numerator/denominator`` rounded once to this precision."""
        if denominator == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return self._mp.make_mpf(
            libmp.from_rational(int(numerator), int(denominator), self._bits, ROUNDING)
        )

    def _raw_real(self, value: Any) -> tuple[int, int, int, int]:
        prec = self._bits
        if isinstance(value, _mpf):
            return libmp.mpf_pos(value._mpf_, prec, ROUNDING)
        if isinstance(value, bool | int):
            return libmp.from_int(int(value), prec, ROUNDING)
        if isinstance(value, Fraction):
            return libmp.from_rational(value.numerator, value.denominator, prec, ROUNDING)
        if isinstance(value, float):
            return libmp.from_float(value, prec, ROUNDING)
        if isinstance(value, str):
            return parse_decimal_raw(value, prec)
        raise TypeError(f"cannot convert {type(value).__name__} to a real of precision {prec}")

    # ── Identity ───────────────────────────────────────────────────────

    def __repr__(self) -> str:
        return f"PrecisionContext(bits={self._bits})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrecisionContext) and other._bits == self._bits

    def __hash__(self) -> int:
        return hash(("PrecisionContext", self._bits))

    def __reduce__(self) -> tuple[Any, tuple[int]]:
        return (get_context, (self._bits,))


@lru_cache(maxsize=None)
def get_context(bits: int) -> PrecisionContext:
    """Return the shared context for ``bits`` significand bits."""
    return PrecisionContext(bits)


def context_of(value: Any) -> PrecisionContext:
    """The :class:`PrecisionContext` a number was created in."""
    mp = getattr(value, "context", None)
    if mp is None:
        raise ContextMismatchError(f"{type(value).__name__} carries no precision context")
    ctx = get_context(mp.prec)
    if ctx.mp is not mp:
        raise ContextMismatchError("value belongs to a foreign mpmath context")
    return ctx


def parse_decimal_raw(text: str, prec: int) -> tuple[int, int, int, int]:
    """Parse a finite decimal literal into a raw mpf rounded once to ``prec`` bits."""
    from mpmath.libmp.libmpf import str_to_man_exp

    try:
        man, exp = str_to_man_exp(text.strip(), base=10)
    except (ValueError, TypeError) as exc:
        raise DecimalParseError(f"malformed decimal literal: {text!r}") from exc
    if exp >= 0:
        return libmp.from_int(int(man) * 10**exp, prec, ROUNDING)
    return libmp.from_rational(int(man), 10 ** (-exp), prec, ROUNDING)
