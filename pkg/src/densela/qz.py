"""Complex QZ generalized eigenvalue solver at arbitrary precision.

Two stages, as in Moler and Stewart's algorithm:

1. :func:`hessenberg_triangular` reduces a pencil (A, B) to upper
   Hessenberg H and upper triangular T by unitary equivalence (Householder QR
   of B, then Givens rotations).
2. :func:`qz_iterate` runs single-shift implicit QZ sweeps on (H, T) until the
   pencil is triangular, deflating negligible subdiagonals of H and pushing
   negligible diagonal entries of T out as infinite eigenvalues.

The iteration follows the control flow of LAPACK's ``zhgeqz`` in its
eigenvalues-only mode, with every tolerance expressed through the interval
machine precision of the working context.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import structlog
from pydantic import BaseModel, ConfigDict, Field

from src.densela.matrix import MPMatrix
from src.densela.rotations import Givens, House, Rows
from src.errors import ContextMismatchError, ConvergenceError, ShapeError, SingularPencilError
from src.precision import MPComplex, MPReal, PrecisionContext

logger = structlog.get_logger(__name__)


class QZConfig(BaseModel):
    """Iteration limits and deflation sensitivity for :func:`qz_iterate`."""

    model_config = ConfigDict(frozen=True)

    max_sweeps_per_eigenvalue: int = Field(default=30, ge=1)
    exceptional_shift_period: int = Field(default=10, ge=1)
    deflation_factor: float = Field(default=1.0, gt=0)


@dataclass(frozen=True)
class GeneralizedEigenPair:
    """Diagonal pair (alpha, beta) of the triangularized pencil; c = alpha/beta."""

    alpha: MPComplex
    beta: MPComplex

    def value(self) -> MPComplex:
        return self.alpha / self.beta


@dataclass
class QZResult:
    pairs: list[GeneralizedEigenPair] = field(default_factory=list)
    total_sweeps: int = 0
    converged: bool = False


# ── Hessenberg–triangular reduction ────────────────────────────────────


def _check_pencil(A: MPMatrix, B: MPMatrix) -> None:
    if not A.is_square or not B.is_square:
        raise ShapeError(f"pencil matrices must be square, got {A.shape} and {B.shape}")
    if A.rows != B.rows:
        raise ShapeError(f"pencil orders differ: {A.rows} and {B.rows}")
    if A.context is not B.context:
        raise ContextMismatchError(
            f"pencil matrices use {A.context.bits} and {B.context.bits} bits"
        )


def _reduce(h: Rows, t: Rows, q: Rows | None, z: Rows | None, ctx: PrecisionContext) -> None:
    """In-place reduction; optional ``q``/``z`` accumulate ``q·A·z = H``."""
    mp = ctx.mp
    zero = ctx.zero
    n = len(h)
    everything = range(n)

    for k in range(n - 1):
        house = House([t[i][k] for i in range(k, n)], mp)
        if house.is_identity:
            continue
        house.reflect_rows(t, k, range(k + 1, n))
        t[k][k] = house.alpha
        for i in range(k + 1, n):
            t[i][k] = zero
        house.reflect_rows(h, k, everything)
        if q is not None:
            house.reflect_rows(q, k, everything)

    for j in range(n - 2):
        for i in range(n - 1, j + 1, -1):
            rot = Givens(h[i - 1][j], h[i][j], mp)
            if rot.is_identity:
                continue
            rot.rotate_rows(h, i - 1, i, range(j + 1, n))
            h[i - 1][j] = rot.r
            h[i][j] = zero
            rot.rotate_rows(t, i - 1, i, range(i - 1, n))
            if q is not None:
                rot.rotate_rows(q, i - 1, i, everything)

            fill = Givens(t[i][i], t[i][i - 1], mp)
            if fill.is_identity:
                continue
            fill.rotate_columns(t, i, i - 1, range(i))
            t[i][i] = fill.r
            t[i][i - 1] = zero
            fill.rotate_columns(h, i, i - 1, everything)
            if z is not None:
                fill.rotate_columns(z, i, i - 1, everything)


def hessenberg_triangular(A: MPMatrix, B: MPMatrix) -> tuple[MPMatrix, MPMatrix]:
    """Reduce (A, B) to Hessenberg–triangular form by unitary equivalence.

    Args:
        A: Square matrix.
        B: Square matrix of the same order and context.

    Returns:
        ``(H, T)`` with exact zeros below the subdiagonal of H and below the
        diagonal of T. The inputs are left untouched.

    Raises:
        ShapeError: Non-square or mismatched operands.
    """
    _check_pencil(A, B)
    H, T = A.copy(), B.copy()
    _reduce(H.data, T.data, None, None, A.context)
    return H, T


def hessenberg_triangular_with_transforms(
    A: MPMatrix, B: MPMatrix
) -> tuple[MPMatrix, MPMatrix, MPMatrix, MPMatrix]:
    """Like :func:`hessenberg_triangular`, also returning unitary Q, Z with Q·A·Z = H."""
    _check_pencil(A, B)
    ctx = A.context
    H, T = A.copy(), B.copy()
    Q, Z = MPMatrix.identity(A.rows, ctx), MPMatrix.identity(A.rows, ctx)
    _reduce(H.data, T.data, Q.data, Z.data, ctx)
    return H, T, Q, Z


# ── QZ iteration ───────────────────────────────────────────────────────


class _QZSweeper:
    """State machine of the single-shift QZ iteration on one pencil.

    ``ilast`` is the bottom row of the active block, ``ifrstm``/``ilastm`` the
    row/column window rotations are applied to.
    """

    def __init__(self, h: Rows, t: Rows, ctx: PrecisionContext, cfg: QZConfig) -> None:
        self.h = h
        self.t = t
        self.n = len(h)
        self.mp = ctx.mp
        self.zero = ctx.zero
        self.cfg = cfg
        eps = ctx.epsilon
        self.ulp = eps * ctx.real(cfg.deflation_factor)
        h_norm = MPMatrix(self.n, self.n, ctx, h).frobenius_norm()
        t_norm = MPMatrix(self.n, self.n, ctx, t).frobenius_norm()
        self.atol: MPReal = eps * h_norm
        self.btol: MPReal = eps * t_norm
        self.fallback_tol: MPReal = self.ulp * h_norm

        self.alphas: list[MPComplex] = [self.zero] * self.n
        self.betas: list[MPComplex] = [self.zero] * self.n
        self.ilast = self.n - 1
        self.ifrstm = 0
        self.ilastm = self.n - 1
        self.stalled = 0
        self.eshift: MPComplex = self.zero
        self.steps = 0

    # ── Tests ──────────────────────────────────────────────────────────

    def _negligible_subdiag(self, j: int) -> bool:
        """Whether H[j][j-1] is below the deflation threshold."""
        h = self.h
        scale = abs(h[j][j]) + abs(h[j - 1][j - 1])
        tol = self.ulp * scale if scale else self.fallback_tol
        return abs(h[j][j - 1]) <= tol

    # ── Driver ─────────────────────────────────────────────────────────

    def run(self) -> QZResult:
        budget = self.cfg.max_sweeps_per_eigenvalue * self.n
        iterations = 0
        while self.ilast >= 0:
            if iterations >= budget:
                return QZResult(pairs=[], total_sweeps=self.steps, converged=False)
            iterations += 1
            self._iterate()

        pairs = [GeneralizedEigenPair(a, b) for a, b in zip(self.alphas, self.betas, strict=True)]
        for j, pair in enumerate(pairs):
            if not pair.alpha and not pair.beta:
                raise SingularPencilError(
                    f"alpha = beta = 0 at position {j}: det(A - cB) vanishes identically"
                )
        return QZResult(pairs=pairs, total_sweeps=self.steps, converged=True)

    def _iterate(self) -> None:
        h, t = self.h, self.t
        ilast = self.ilast

        if ilast == 0:
            self._deflate()
            return
        if self._negligible_subdiag(ilast):
            h[ilast][ilast - 1] = self.zero
            self._deflate()
            return
        if abs(t[ilast][ilast]) <= self.btol:
            t[ilast][ilast] = self.zero
            self._clear_bottom()
            return

        for j in range(ilast - 1, -1, -1):
            if j == 0:
                split_above = True
            elif self._negligible_subdiag(j):
                h[j][j - 1] = self.zero
                split_above = True
            else:
                split_above = False

            if abs(t[j][j]) < self.btol:
                t[j][j] = self.zero
                two_small = (
                    not split_above
                    and abs(h[j][j - 1]) * abs(h[j + 1][j]) <= abs(h[j][j]) * self.atol
                )
                if split_above or two_small:
                    self._push_zero_to_top(j, two_small)
                else:
                    self._chase_zero_to_bottom(j)
                return
            if split_above:
                self._step(j)
                return

        raise AssertionError("unreachable: no split point found")  # pragma: no cover

    # ── Actions ────────────────────────────────────────────────────────

    def _deflate(self) -> None:
        ilast = self.ilast
        self.alphas[ilast] = self.h[ilast][ilast]
        self.betas[ilast] = self.t[ilast][ilast]
        self.ilast -= 1
        self.stalled = 0
        self.eshift = self.zero
        self.ilastm = self.ilast
        if self.ifrstm > self.ilast:
            self.ifrstm = 0

    def _clear_bottom(self) -> None:
        """T[ilast][ilast] is zero: rotate H[ilast][ilast-1] away, then deflate."""
        h, t, ilast = self.h, self.t, self.ilast
        rot = Givens(h[ilast][ilast], h[ilast][ilast - 1], self.mp)
        h[ilast][ilast] = rot.r
        h[ilast][ilast - 1] = self.zero
        rot.rotate_columns(h, ilast, ilast - 1, range(self.ifrstm, ilast))
        rot.rotate_columns(t, ilast, ilast - 1, range(self.ifrstm, ilast))
        self._deflate()

    def _push_zero_to_top(self, j: int, two_small: bool) -> None:
        """Split a 1×1 infinite block off at row ``j`` (zero on T's diagonal)."""
        h, t, mp, zero = self.h, self.t, self.mp, self.zero
        for jch in range(j, self.ilast):
            rot = Givens(h[jch][jch], h[jch + 1][jch], mp)
            h[jch][jch] = rot.r
            h[jch + 1][jch] = zero
            cols = range(jch + 1, self.ilastm + 1)
            rot.rotate_rows(h, jch, jch + 1, cols)
            rot.rotate_rows(t, jch, jch + 1, cols)
            if two_small:
                h[jch][jch - 1] = h[jch][jch - 1] * rot.c
                two_small = False
            if abs(t[jch + 1][jch + 1]) >= self.btol:
                if jch + 1 >= self.ilast:
                    self._deflate()
                else:
                    self._step(jch + 1)
                return
            t[jch + 1][jch + 1] = zero
        self._clear_bottom()

    def _chase_zero_to_bottom(self, j: int) -> None:
        """Move a zero on T's diagonal from row ``j`` down to ``ilast``."""
        h, t, mp, zero = self.h, self.t, self.mp, self.zero
        for jch in range(j, self.ilast):
            rot = Givens(t[jch][jch + 1], t[jch + 1][jch + 1], mp)
            t[jch][jch + 1] = rot.r
            t[jch + 1][jch + 1] = zero
            rot.rotate_rows(t, jch, jch + 1, range(jch + 2, self.ilastm + 1))
            rot.rotate_rows(h, jch, jch + 1, range(jch - 1, self.ilastm + 1))

            col = Givens(h[jch + 1][jch], h[jch + 1][jch - 1], mp)
            h[jch + 1][jch] = col.r
            h[jch + 1][jch - 1] = zero
            col.rotate_columns(h, jch, jch - 1, range(self.ifrstm, jch + 1))
            col.rotate_columns(t, jch, jch - 1, range(self.ifrstm, jch))
        self._clear_bottom()

    # ── QZ step ────────────────────────────────────────────────────────

    def _shift(self) -> MPComplex:
        h, t, ilast, mp = self.h, self.t, self.ilast, self.mp
        if self.stalled % self.cfg.exceptional_shift_period:
            # Eigenvalue of the trailing 2×2 of H·T⁻¹ closest to its last diagonal entry.
            u12 = t[ilast - 1][ilast] / t[ilast][ilast]
            ad11 = h[ilast - 1][ilast - 1] / t[ilast - 1][ilast - 1]
            ad21 = h[ilast][ilast - 1] / t[ilast - 1][ilast - 1]
            ad12 = h[ilast - 1][ilast] / t[ilast][ilast]
            ad22 = h[ilast][ilast] / t[ilast][ilast]
            abi22 = ad22 - u12 * ad21
            abi12 = ad12 - u12 * ad11
            shift = abi22
            ctemp = mp.sqrt(abi12) * mp.sqrt(ad21)
            if ctemp:
                x = (ad11 - shift) / 2
                y = mp.sqrt(x * x + ctemp * ctemp)
                if (x.conjugate() * y).real < 0:
                    y = -y
                if x + y:
                    shift -= ctemp * (ctemp / (x + y))
            return shift

        if self.stalled % (2 * self.cfg.exceptional_shift_period) == 0 and t[ilast][ilast]:
            self.eshift += h[ilast][ilast] / t[ilast][ilast]
        else:
            self.eshift += h[ilast][ilast - 1] / t[ilast - 1][ilast - 1]
        logger.debug("qz.exceptional_shift", ilast=ilast, stalled=self.stalled)
        return self.eshift

    def _step(self, ifirst: int) -> None:
        """One implicit single-shift QZ sweep over rows ``ifirst .. ilast``."""
        h, t, mp, zero = self.h, self.t, self.mp, self.zero
        ilast = self.ilast
        self.steps += 1
        self.stalled += 1
        self.ifrstm = ifirst

        shift = self._shift()

        istart = ifirst
        ctemp = h[ifirst][ifirst] - shift * t[ifirst][ifirst]
        for j in range(ilast - 1, ifirst, -1):
            candidate = h[j][j] - shift * t[j][j]
            if abs(h[j][j - 1]) * abs(h[j + 1][j]) <= abs(candidate) * self.atol:
                istart = j
                ctemp = candidate
                break

        rot = Givens(ctemp, h[istart + 1][istart], mp)
        for j in range(istart, ilast):
            if j > istart:
                rot = Givens(h[j][j - 1], h[j + 1][j - 1], mp)
                h[j][j - 1] = rot.r
                h[j + 1][j - 1] = zero
            cols = range(j, self.ilastm + 1)
            rot.rotate_rows(h, j, j + 1, cols)
            rot.rotate_rows(t, j, j + 1, cols)

            col = Givens(t[j + 1][j + 1], t[j + 1][j], mp)
            t[j + 1][j + 1] = col.r
            t[j + 1][j] = zero
            col.rotate_columns(h, j + 1, j, range(self.ifrstm, min(j + 2, ilast) + 1))
            col.rotate_columns(t, j + 1, j, range(self.ifrstm, j + 1))


def qz_iterate(H: MPMatrix, T: MPMatrix, cfg: QZConfig | None = None) -> QZResult:
    """Run shifted QZ sweeps on a Hessenberg–triangular pencil.

    The matrices are worked on in place. A result with ``converged=False``
    and no pairs is returned when the sweep budget
    (``max_sweeps_per_eigenvalue · n``) runs out.

    Raises:
        SingularPencilError: The pencil has a pair with alpha = beta = 0.
    """
    _check_pencil(H, T)
    cfg = cfg or QZConfig()
    ctx = H.context
    started = time.perf_counter()
    result = _QZSweeper(H.data, T.data, ctx, cfg).run()
    elapsed = time.perf_counter() - started
    if result.converged:
        logger.debug(
            "qz.converged", n=H.rows, bits=ctx.bits, sweeps=result.total_sweeps, wall_time_s=elapsed
        )
    else:
        logger.warning(
            "qz.not_converged", n=H.rows, bits=ctx.bits, sweeps=result.total_sweeps
        )
    return result


def eigenvalues(
    A: MPMatrix, B: MPMatrix, cfg: QZConfig | None = None
) -> tuple[list[MPComplex], int]:
    """Generalized eigenvalues of A x = c B x.

    Returns:
        ``(finite, infinite_count)``. A pair counts as finite when
        ``|beta| > eps_P · ||B||_F``; finite values are sorted by
        ``(real, imag)``.

    Raises:
        ShapeError: Non-square or mismatched operands.
        ConvergenceError: The QZ iteration ran out of sweeps.
    """
    H, T = hessenberg_triangular(A, B)
    result = qz_iterate(H, T, cfg)
    if not result.converged:
        raise ConvergenceError(
            f"QZ did not converge within {result.total_sweeps} sweeps "
            f"(order {A.rows}, {A.context.bits} bits)",
            result,
        )
    ctx = A.context
    tol = ctx.epsilon * B.frobenius_norm()
    finite: list[MPComplex] = []
    infinite = 0
    for pair in result.pairs:
        if abs(pair.beta) > tol:
            finite.append(pair.value())
        else:
            infinite += 1
    finite.sort(key=_order_key)
    return finite, infinite


def eigenvalues_standard(A: MPMatrix, cfg: QZConfig | None = None) -> tuple[list[MPComplex], int]:
    """Eigenvalues of A (the pencil (A, Id))."""
    if not A.is_square:
        raise ShapeError(f"matrix must be square, got {A.shape}")
    return eigenvalues(A, MPMatrix.identity(A.rows, A.context), cfg)


def _order_key(z: Any) -> tuple[Any, Any]:
    return (z.real, z.imag)
