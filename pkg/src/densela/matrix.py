"""Dense complex matrices at a fixed precision.

:class:`MPMatrix` stores its entries as a list of rows of ``mpc`` values that
all belong to one :class:`PrecisionContext`. The QZ solver works on ``data``
in place; everything else goes through the checked accessors.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import Any, TextIO

from src.errors import ContextMismatchError, ShapeError
from src.precision import MPComplex, MPReal, PrecisionContext, to_decimal


class MPMatrix:
    """A ``rows × cols`` complex matrix with entries in one precision context."""

    __slots__ = ("_rows", "_cols", "_ctx", "data")

    def __init__(
        self,
        rows: int,
        cols: int,
        ctx: PrecisionContext,
        data: list[list[MPComplex]] | None = None,
    ) -> None:
        if rows < 0 or cols < 0:
            raise ShapeError(f"negative dimensions {rows}x{cols}")
        self._rows = rows
        self._cols = cols
        self._ctx = ctx
        if data is None:
            zero = ctx.zero
            data = [[zero] * cols for _ in range(rows)]
        elif len(data) != rows or any(len(row) != cols for row in data):
            raise ShapeError(f"data does not match the declared shape {rows}x{cols}")
        self.data = data

    # ── Construction ───────────────────────────────────────────────────

    @classmethod
    def zeros(cls, rows: int, cols: int, ctx: PrecisionContext) -> MPMatrix:
        return cls(rows, cols, ctx)

    @classmethod
    def identity(cls, n: int, ctx: PrecisionContext) -> MPMatrix:
        m = cls(n, n, ctx)
        one = ctx.one
        for i in range(n):
            m.data[i][i] = one
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], ctx: PrecisionContext) -> MPMatrix:
        """Build a matrix from nested sequences, rounding each entry once.

        Entries may be ints, Fractions, floats, complex numbers, decimal
        strings or mpmath numbers of any precision.
        """
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ShapeError("ragged rows")
        data = [[ctx.complex(v) for v in r] for r in rows]
        return cls(n_rows, n_cols, ctx, data)

    # ── Shape and access ───────────────────────────────────────────────

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self._rows, self._cols)

    @property
    def context(self) -> PrecisionContext:
        return self._ctx

    @property
    def is_square(self) -> bool:
        return self._rows == self._cols

    def __getitem__(self, key: tuple[int, int]) -> MPComplex:
        i, j = key
        return self.data[i][j]

    def __setitem__(self, key: tuple[int, int], value: Any) -> None:
        i, j = key
        if hasattr(value, "context") and not self._ctx.owns(value):
            raise ContextMismatchError(
                f"cannot store a value of another precision in a {self._ctx.bits}-bit matrix"
            )
        self.data[i][j] = self._ctx.complex(value) if not isinstance(value, MPComplex) else value

    def entries(self) -> list[MPComplex]:
        """All entries in row-major order."""
        return [v for row in self.data for v in row]

    def __iter__(self) -> Iterator[list[MPComplex]]:
        return iter(self.data)

    def copy(self) -> MPMatrix:
        return MPMatrix(self._rows, self._cols, self._ctx, [list(r) for r in self.data])

    # ── Algebra ────────────────────────────────────────────────────────

    def matmul(self, other: MPMatrix) -> MPMatrix:
        if self._cols != other._rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        self._check_context(other)
        if not other._rows or not other._cols:
            return MPMatrix.zeros(self._rows, other._cols, self._ctx)
        mp = self._ctx.mp
        columns = list(zip(*other.data, strict=True))
        data = [[mp.fdot(row, col) for col in columns] for row in self.data]
        return MPMatrix(self._rows, other._cols, self._ctx, data)

    def __matmul__(self, other: MPMatrix) -> MPMatrix:
        return self.matmul(other)

    def conjugate_transpose(self) -> MPMatrix:
        data = [[self.data[i][j].conjugate() for i in range(self._rows)] for j in range(self._cols)]
        return MPMatrix(self._cols, self._rows, self._ctx, data)

    def frobenius_norm(self) -> MPReal:
        mp = self._ctx.mp
        return mp.sqrt(mp.fsum(v.real * v.real + v.imag * v.imag for row in self.data for v in row))

    def max_abs(self) -> MPReal:
        """Largest entry modulus (zero for an empty matrix)."""
        mp = self._ctx.mp
        return max((abs(v) for row in self.data for v in row), default=mp.mpf(0))

    def to_context(self, ctx: PrecisionContext) -> MPMatrix:
        """Re-express at another precision (exact when widening)."""
        data = [[ctx.complex(v) for v in row] for row in self.data]
        return MPMatrix(self._rows, self._cols, ctx, data)

    # ── Structure checks ───────────────────────────────────────────────

    def is_upper_triangular(self) -> bool:
        rows, cols = self._rows, self._cols
        return all(not self.data[i][j] for i in range(rows) for j in range(min(i, cols)))

    def is_upper_hessenberg(self) -> bool:
        return all(
            not self.data[i][j] for i in range(self._rows) for j in range(min(i - 1, self._cols))
        )

    def _check_context(self, other: MPMatrix) -> None:
        if other._ctx is not self._ctx:
            raise ContextMismatchError(
                f"matrices use {self._ctx.bits} and {other._ctx.bits} bits"
            )

    # ── Debug dump ─────────────────────────────────────────────────────

    def dump_csv(self, target: Path | TextIO) -> None:
        """Write nonzero entries as ``i,j,re,im`` rows of round-trip decimals."""
        if isinstance(target, Path):
            with target.open("w", newline="") as fh:
                self._write_csv(fh)
        else:
            self._write_csv(target)

    def _write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "re", "im"])
        for i, j, v in self.nonzero():
            writer.writerow([i, j, to_decimal(v.real), to_decimal(v.imag)])

    def nonzero(self) -> Iterable[tuple[int, int, MPComplex]]:
        for i, row in enumerate(self.data):
            for j, v in enumerate(row):
                if v:
                    yield i, j, v

    # ── Identity ───────────────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MPMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._ctx == other._ctx
            and all(ra == rb for ra, rb in zip(self.data, other.data, strict=True))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"MPMatrix({self._rows}x{self._cols}, bits={self._ctx.bits})"
