"""Exact Chebyshev coefficient operators.

Every operator is built as a sparse :class:`RationalOperator` with
``Fraction`` entries and only rounded to a precision context at the very end
(``to_matrix``), so each matrix entry carries a single rounding error.

Indices are 0-based Chebyshev symbol indices: row ``i`` holds the
coefficient of ``T_i`` in the result, column ``p`` the coefficient of ``T_p``
in the input.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from fractions import Fraction

from src.densela import MPMatrix
from src.errors import ShapeError
from src.precision import PrecisionContext

Scalar = int | Fraction

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class RationalOperator:
    """Sparse ``rows × cols`` matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(
        self,
        rows: int,
        cols: int,
        entries: dict[tuple[int, int], Fraction] | None = None,
    ) -> None:
        self.rows = rows
        self.cols = cols
        self._entries: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ShapeError(f"entry ({i}, {j}) outside a {rows}x{cols} operator")
            if v:
                self._entries[(i, j)] = Fraction(v)

    @classmethod
    def identity(cls, rows: int, cols: int | None = None) -> RationalOperator:
        """Ones on the main diagonal of a (possibly rectangular) operator."""
        cols = rows if cols is None else cols
        return cls(rows, cols, {(i, i): Fraction(1) for i in range(min(rows, cols))})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]]) -> RationalOperator:
        n_cols = len(rows[0]) if rows else 0
        entries = {(i, j): Fraction(v) for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), n_cols, entries)

    # ── Access ─────────────────────────────────────────────────────────

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self._entries.get(key, Fraction(0))

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        return iter(self._entries.items())

    def row(self, i: int) -> list[Fraction]:
        return [self[i, j] for j in range(self.cols)]

    def to_dense(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self._entries.values()), default=Fraction(0))

    # ── Algebra ────────────────────────────────────────────────────────

    def _check_same_shape(self, other: RationalOperator) -> None:
        if self.shape != other.shape:
            raise ShapeError(f"operator shapes differ: {self.shape} and {other.shape}")

    def __add__(self, other: RationalOperator) -> RationalOperator:
        self._check_same_shape(other)
        merged = dict(self._entries)
        for key, v in other._entries.items():
            merged[key] = merged.get(key, Fraction(0)) + v
        return RationalOperator(self.rows, self.cols, merged)

    def __neg__(self) -> RationalOperator:
        return RationalOperator(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: RationalOperator) -> RationalOperator:
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> RationalOperator:
        s = Fraction(scalar)
        return RationalOperator(self.rows, self.cols, {k: s * v for k, v in self._entries.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: RationalOperator) -> RationalOperator:
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
        for (k, j), v in other._entries.items():
            by_row[k].append((j, v))
        product: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (i, k), u in self._entries.items():
            for j, v in by_row.get(k, ()):
                product[(i, j)] += u * v
        return RationalOperator(self.rows, other.cols, product)

    def apply(self, vector: Sequence[Scalar]) -> list[Fraction]:
        """Multiply by a coefficient vector of length ``cols``."""
        if len(vector) != self.cols:
            raise ShapeError(f"vector of length {len(vector)} for {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (i, j), v in self._entries.items():
            out[i] += v * vector[j]
        return out

    def place(
        self, rows: int, cols: int, row_offset: int = 0, col_offset: int = 0
    ) -> RationalOperator:
        """Embed into a larger zero operator with the top-left corner at the offsets."""
        shifted = {(i + row_offset, j + col_offset): v for (i, j), v in self._entries.items()}
        return RationalOperator(rows, cols, shifted)

    # ── Rounding ───────────────────────────────────────────────────────

    def to_matrix(self, ctx: PrecisionContext, imag: RationalOperator | None = None) -> MPMatrix:
        """Round to a complex matrix; ``imag`` supplies the imaginary part."""
        m = MPMatrix.zeros(self.rows, self.cols, ctx)
        keys: Iterable[tuple[int, int]] = self._entries.keys()
        if imag is not None:
            self._check_same_shape(imag)
            keys = set(keys) | set(imag._entries)
        for i, j in keys:
            im = imag[i, j] if imag is not None else 0
            m.data[i][j] = ctx.complex(self[i, j], im)
        return m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalOperator):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"RationalOperator({self.rows}x{self.cols}, nnz={self.nnz})"


# ── Chebyshev operators ────────────────────────────────────────────────


def _b(i: int) -> int:
    return 2 if i == 0 else 1


def second_derivative(rows: int, cols: int) -> RationalOperator:
    """Coefficients of f'' from those of f: p(p²−i²)/b_i for p ≥ i+2, p+i even."""
    entries: dict[tuple[int, int], Fraction] = {}
    for i in range(rows):
        for p in range(i + 2, cols, 2):
            entries[(i, p)] = Fraction(p * (p * p - i * i), _b(i))
    return RationalOperator(rows, cols, entries)


def fourth_derivative(rows: int, cols: int) -> RationalOperator:
    """Coefficients of f'''' from those of f (p ≥ i+4, p+i even)."""
    entries: dict[tuple[int, int], Fraction] = {}
    for i in range(rows):
        i2 = i * i
        i_part = i2 * (i2 - 4) ** 2
        for p in range(i + 4, cols, 2):
            p2 = p * p
            numer = p * (p2 * (p2 - 4) ** 2 - 3 * p2 * p2 * i2 + 3 * p2 * i2 * i2 - i_part)
            entries[(i, p)] = Fraction(numer, 24 * _b(i))
    return RationalOperator(rows, cols, entries)


def multiply_by_z(rows: int, cols: int) -> RationalOperator:
    """Coefficients of z·f: z·T_0 = T_1, z·T_k = (T_{k−1} + T_{k+1})/2."""
    entries: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for k in range(cols):
        targets = [(1, Fraction(1))] if k == 0 else [(k - 1, HALF), (k + 1, HALF)]
        for i, v in targets:
            if i < rows:
                entries[(i, k)] += v
    return RationalOperator(rows, cols, entries)


def multiply_by_z2(rows: int, cols: int) -> RationalOperator:
    """Coefficients of z²·f via z² = (1 + T_2)/2 and T_2·T_k = (T_{k+2} + T_{|k−2|})/2."""
    entries: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for k in range(cols):
        for i, v in ((k, HALF), (k + 2, QUARTER), (abs(k - 2), QUARTER)):
            if i < rows:
                entries[(i, k)] += v
    return RationalOperator(rows, cols, entries)


def boundary_rows(ncols: int, derivative_scaled: bool) -> tuple[list[int], list[int]]:
    """Exact (even, odd) boundary selectors over ``ncols`` coefficients.

    Plain rows sum the coefficients of one parity, which encodes f(±1) = 0
    through T_i(±1) = (±1)^i. Scaled rows weight them by i², encoding
    f'(±1) = 0 through T_i'(±1) = (±1)^(i+1) i².
    """
    weight = (lambda i: i * i) if derivative_scaled else (lambda i: 1)
    even = [weight(i) if i % 2 == 0 else 0 for i in range(ncols)]
    odd = [weight(i) if i % 2 == 1 else 0 for i in range(ncols)]
    return even, odd


# ── Matrix views at a precision ────────────────────────────────────────


def d2_matrix(N: int, ctx: PrecisionContext) -> MPMatrix:
    """Second-derivative operator, (N+1)×(N+3)."""
    return second_derivative(N + 1, N + 3).to_matrix(ctx)


def d4_matrix(N: int, ctx: PrecisionContext) -> MPMatrix:
    """Fourth-derivative operator, (N+1)×(N+5)."""
    return fourth_derivative(N + 1, N + 5).to_matrix(ctx)


def mult_z(N: int, ctx: PrecisionContext) -> MPMatrix:
    """Multiplication by z, (N+1)×(N+3)."""
    return multiply_by_z(N + 1, N + 3).to_matrix(ctx)


def mult_z2(N: int, ctx: PrecisionContext) -> MPMatrix:
    """Multiplication by z², (N+1)×(N+3)."""
    return multiply_by_z2(N + 1, N + 3).to_matrix(ctx)


def bc_rows(N: int, ncols: int, derivative_scaled: bool) -> tuple[list[int], list[int]]:
    """Boundary rows for a truncation N over ``ncols ∈ {N+3, N+5}`` columns."""
    if ncols not in (N + 3, N + 5):
        raise ShapeError(f"boundary rows span N+3 or N+5 columns, got {ncols} for N={N}")
    return boundary_rows(ncols, derivative_scaled)
