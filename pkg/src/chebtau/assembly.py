"""Chebyshev tau assembly of the Orr–Sommerfeld generalized eigenproblem.

The Orr–Sommerfeld equation for a parallel base flow U(z) on (−1, 1),

    (D² − a²)²φ − i·a·Re·[(U − c)(D² − a²)φ − U''φ] = 0,
    φ = Dφ = 0 at z = ±1,

is discretized in Chebyshev coefficients and written as A x = c B x. Two
formulations are offered:

- **D2**: split into φ and χ = (D² − a²)φ, giving a pencil of order 2(N+3)
  built from the second-derivative operator only.
- **D4**: the fourth-order operator applied directly, giving a pencil of
  order N+5 whose entries grow like N⁷.

All blocks are assembled as exact rationals and rounded once to the target
precision.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Any

import structlog
from pydantic import BaseModel, ConfigDict, field_validator

from src.chebtau.operators import (
    RationalOperator,
    boundary_rows,
    fourth_derivative,
    multiply_by_z,
    multiply_by_z2,
    second_derivative,
)
from src.densela import MPMatrix
from src.errors import ConfigurationError
from src.precision import PrecisionContext

logger = structlog.get_logger(__name__)

MIN_TRUNCATION = 4


class FlowKind(StrEnum):
    POISEUILLE = "poiseuille"
    COUETTE = "couette"


class Method(StrEnum):
    D2 = "d2"
    D4 = "d4"


@dataclass(frozen=True)
class FlowProfile:
    """One of the two supported base flows.

    Poiseuille: U = 1 − z², U'' = −2. Couette: U = z, U'' = 0.
    """

    kind: FlowKind

    @classmethod
    def of(cls, flow: FlowProfile | FlowKind | str) -> FlowProfile:
        if isinstance(flow, FlowProfile):
            return flow
        return cls(FlowKind(flow))

    @property
    def curvature(self) -> Fraction:
        """U''."""
        return Fraction(-2) if self.kind is FlowKind.POISEUILLE else Fraction(0)

    def velocity(self, rows: int, cols: int) -> RationalOperator:
        """Coefficient action of multiplication by U."""
        if self.kind is FlowKind.POISEUILLE:
            return RationalOperator.identity(rows, cols) - multiply_by_z2(rows, cols)
        return multiply_by_z(rows, cols)

    @property
    def region_bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """``(re_min, re_max, im_min, im_max)`` of the eigenvalues worth comparing."""
        re_min = Fraction(0) if self.kind is FlowKind.POISEUILLE else Fraction(-1)
        return (re_min, Fraction(1), Fraction(-1), Fraction(0))


POISEUILLE = FlowProfile(FlowKind.POISEUILLE)
COUETTE = FlowProfile(FlowKind.COUETTE)


def exact_fraction(value: Any) -> Fraction:
    """Parse a positive decimal or rational exactly (``"1e5"``, ``"2/3"``, ``1.5``)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a finite decimal: {value!r}") from exc


class OSParams(BaseModel):
    """Reynolds number and streamwise wavenumber, both held exactly."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    re: Fraction
    a: Fraction

    @field_validator("re", "a", mode="before")
    @classmethod
    def _parse(cls, v: Any) -> Fraction:
        return exact_fraction(v)

    @field_validator("re", "a")
    @classmethod
    def _positive(cls, v: Fraction) -> Fraction:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @property
    def a_re(self) -> Fraction:
        return self.a * self.re


@dataclass
class TauSystem:
    """An assembled pencil (A, B) and where it came from."""

    A: MPMatrix
    B: MPMatrix
    N: int
    method: Method
    flow: FlowProfile
    params: OSParams

    @property
    def order(self) -> int:
        return self.A.rows

    @property
    def context(self) -> PrecisionContext:
        return self.A.context


def _check_truncation(N: int) -> None:
    if N < MIN_TRUNCATION:
        raise ConfigurationError(
            f"N must be at least {MIN_TRUNCATION} for the boundary rows to fit, got {N}"
        )


def _boundary_block(order: int, ncols: int, first_row: int, scaled: bool) -> RationalOperator:
    even, odd = boundary_rows(ncols, derivative_scaled=scaled)
    rows = [even, odd] if not scaled else [odd, even]
    return RationalOperator.from_rows(rows).place(order, order, first_row, 0)


def d2_operators(
    flow: FlowProfile, params: OSParams, N: int
) -> tuple[RationalOperator, RationalOperator, RationalOperator]:
    """Exact ``(A_real, A_imag, B_imag)`` of the D2 formulation.

    Columns are ``[φ_0 .. φ_{N+2} | χ_0 .. χ_{N+2}]``. Rows: N+1 projections
    of (D² − a²)φ − χ, the two φ(±1) rows, N+1 projections of the χ equation,
    the two Dφ(±1) rows.
    """
    m = N + 3
    order = 2 * m
    second = N + 3
    a2 = params.a**2
    are = params.a_re

    ident = RationalOperator.identity(N + 1, m)
    helmholtz = second_derivative(N + 1, m) - a2 * ident

    a_real = (
        helmholtz.place(order, order, 0, 0)
        + (-ident).place(order, order, 0, m)
        + _boundary_block(order, m, N + 1, scaled=False)
        + helmholtz.place(order, order, second, m)
        + _boundary_block(order, m, 2 * N + 4, scaled=True)
    )
    a_imag = (-are * flow.velocity(N + 1, m)).place(order, order, second, m) + (
        are * flow.curvature * ident
    ).place(order, order, second, 0)
    b_imag = (-are * ident).place(order, order, second, m)
    return a_real, a_imag, b_imag


def d4_operators(
    flow: FlowProfile, params: OSParams, N: int
) -> tuple[RationalOperator, RationalOperator, RationalOperator]:
    """Exact ``(A_real, A_imag, B_imag)`` of the D4 formulation (order N+5)."""
    n = N + 5
    a2 = params.a**2
    are = params.a_re

    ident = RationalOperator.identity(N + 1, n)
    d2 = second_derivative(N + 1, n)
    helmholtz_ext = second_derivative(N + 3, n) - a2 * RationalOperator.identity(N + 3, n)

    a_real_block = fourth_derivative(N + 1, n) - (2 * a2) * d2 + (a2 * a2) * ident
    a_imag_block = -are * (flow.velocity(N + 1, N + 3) @ helmholtz_ext) + (
        are * flow.curvature
    ) * ident
    b_imag_block = -are * (d2 - a2 * ident)

    boundary = _boundary_block(n, n, N + 1, scaled=False) + _boundary_block(
        n, n, N + 3, scaled=True
    )
    a_real = a_real_block.place(n, n) + boundary
    return a_real, a_imag_block.place(n, n), b_imag_block.place(n, n)


def _assemble(
    method: Method,
    flow: FlowProfile | FlowKind | str,
    params: OSParams,
    N: int,
    ctx: PrecisionContext,
) -> TauSystem:
    _check_truncation(N)
    profile = FlowProfile.of(flow)
    started = time.perf_counter()
    build = d2_operators if method is Method.D2 else d4_operators
    a_real, a_imag, b_imag = build(profile, params, N)
    zero = RationalOperator(a_real.rows, a_real.cols)
    A = a_real.to_matrix(ctx, imag=a_imag)
    B = zero.to_matrix(ctx, imag=b_imag)
    logger.debug(
        "tau.assembled",
        method=str(method),
        flow=str(profile.kind),
        n=N,
        order=A.rows,
        bits=ctx.bits,
        wall_time_s=time.perf_counter() - started,
    )
    return TauSystem(A=A, B=B, N=N, method=method, flow=profile, params=params)


def assemble_d2(
    flow: FlowProfile | FlowKind | str, params: OSParams, N: int, ctx: PrecisionContext
) -> TauSystem:
    """Assemble the D2 pencil of order 2(N+3).

    Raises:
        ConfigurationError: ``N < 4``.
    """
    return _assemble(Method.D2, flow, params, N, ctx)


def assemble_d4(
    flow: FlowProfile | FlowKind | str, params: OSParams, N: int, ctx: PrecisionContext
) -> TauSystem:
    """Assemble the D4 pencil of order N+5.

    Raises:
        ConfigurationError: ``N < 4``.
    """
    return _assemble(Method.D4, flow, params, N, ctx)


def assemble(
    method: Method | str,
    flow: FlowProfile | FlowKind | str,
    params: OSParams,
    N: int,
    ctx: PrecisionContext,
) -> TauSystem:
    return _assemble(Method(method), flow, params, N, ctx)
