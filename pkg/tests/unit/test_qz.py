"""Tests for the Hessenberg-triangular reduction and the QZ iteration."""

import random

import pytest
from pydantic import ValidationError

from src.analysis import hausdorff
from src.densela import (
    MPMatrix,
    QZConfig,
    eigenvalues,
    eigenvalues_standard,
    hessenberg_triangular,
    hessenberg_triangular_with_transforms,
    qz_iterate,
)
from src.errors import ContextMismatchError, ConvergenceError, ShapeError, SingularPencilError
from src.precision import get_context

PENCIL_A = [
    [2, -1, 0, 3],
    [1, 4, 2, -2],
    [0, 5, -3, 1],
    [7, 1, 1, 2],
]
PENCIL_B = [
    [1, 2, 0, 1],
    [0, 3, 1, 0],
    [2, 0, 4, 1],
    [1, 1, 0, 5],
]


@pytest.fixture
def ctx():
    return get_context(53)


def companion(roots):
    """Companion matrix of prod(x - r) for integer roots."""
    coeffs = [1]
    for r in roots:
        coeffs = [a - r * b for a, b in zip([*coeffs, 0], [0, *coeffs], strict=True)]
    n = len(roots)
    rows = [[-c for c in coeffs[1:]]]
    rows += [[1 if j == i else 0 for j in range(n)] for i in range(n - 1)]
    return rows


def max_diff(X, Y):
    return max(abs(complex(a) - complex(b)) for a, b in zip(X.entries(), Y.entries(), strict=True))


# ── Configuration ──────────────────────────────────────────────────────


class TestQZConfig:
    def test_defaults(self):
        cfg = QZConfig()
        assert cfg.max_sweeps_per_eigenvalue == 30
        assert cfg.exceptional_shift_period == 10
        assert cfg.deflation_factor == 1.0

    def test_rejects_zero_budget(self):
        with pytest.raises(ValidationError):
            QZConfig(max_sweeps_per_eigenvalue=0)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            QZConfig().max_sweeps_per_eigenvalue = 5


# ── Reduction ──────────────────────────────────────────────────────────


class TestHessenbergTriangular:
    def test_structure(self, ctx):
        A = MPMatrix.from_rows(PENCIL_A, ctx)
        B = MPMatrix.from_rows(PENCIL_B, ctx)
        H, T = hessenberg_triangular(A, B)
        assert H.is_upper_hessenberg()
        assert T.is_upper_triangular()

    def test_inputs_untouched(self, ctx):
        A = MPMatrix.from_rows(PENCIL_A, ctx)
        B = MPMatrix.from_rows(PENCIL_B, ctx)
        hessenberg_triangular(A, B)
        assert A == MPMatrix.from_rows(PENCIL_A, ctx)
        assert B == MPMatrix.from_rows(PENCIL_B, ctx)

    def test_transforms_reproduce_pencil(self, ctx):
        A = MPMatrix.from_rows(PENCIL_A, ctx)
        B = MPMatrix.from_rows(PENCIL_B, ctx)
        H, T, Q, Z = hessenberg_triangular_with_transforms(A, B)
        assert max_diff(Q @ A @ Z, H) < 1e-12
        assert max_diff(Q @ B @ Z, T) < 1e-12

    def test_transforms_are_unitary(self, ctx):
        A = MPMatrix.from_rows(PENCIL_A, ctx)
        B = MPMatrix.from_rows(PENCIL_B, ctx)
        _, _, Q, Z = hessenberg_triangular_with_transforms(A, B)
        eye = MPMatrix.identity(4, ctx)
        assert max_diff(Q @ Q.conjugate_transpose(), eye) < 1e-14
        assert max_diff(Z.conjugate_transpose() @ Z, eye) < 1e-14

    def test_non_square(self, ctx):
        with pytest.raises(ShapeError):
            hessenberg_triangular(MPMatrix.zeros(2, 3, ctx), MPMatrix.zeros(2, 3, ctx))

    def test_order_mismatch(self, ctx):
        with pytest.raises(ShapeError):
            hessenberg_triangular(MPMatrix.identity(2, ctx), MPMatrix.identity(3, ctx))

    def test_context_mismatch(self, ctx):
        with pytest.raises(ContextMismatchError):
            hessenberg_triangular(MPMatrix.identity(2, ctx), MPMatrix.identity(2, get_context(64)))


# ── Eigenvalues ────────────────────────────────────────────────────────


class TestEigenvalues:
    def test_diagonal_is_exact(self, ctx):
        A = MPMatrix.from_rows([[3, 0, 0], [0, 1, 0], [0, 0, 2]], ctx)
        finite, infinite = eigenvalues_standard(A)
        assert finite == [1, 2, 3]
        assert infinite == 0

    def test_two_by_two(self, ctx):
        finite, _ = eigenvalues_standard(MPMatrix.from_rows([[4, 1], [2, 3]], ctx))
        assert [complex(z) for z in finite] == [pytest.approx(2), pytest.approx(5)]

    def test_companion(self, ctx):
        A = MPMatrix.from_rows(companion([1, 2, 3, 4, 5]), ctx)
        finite, infinite = eigenvalues_standard(A)
        assert infinite == 0
        assert [complex(z) for z in finite] == [pytest.approx(r, abs=1e-9) for r in range(1, 6)]

    def test_complex_pair(self, ctx):
        finite, _ = eigenvalues_standard(MPMatrix.from_rows([[0, -1], [1, 0]], ctx))
        imag = sorted(float(z.imag) for z in finite)
        assert imag == [pytest.approx(-1), pytest.approx(1)]
        assert all(abs(z.real) < 1e-12 for z in finite)

    def test_precision_tightens_error(self):
        errors = []
        for bits in (53, 200):
            c = get_context(bits)
            finite, _ = eigenvalues_standard(MPMatrix.from_rows(companion([1, 2, 3, 4, 5]), c))
            errors.append(max(abs(z - r) for z, r in zip(finite, range(1, 6), strict=True)))
        assert errors[1] < 1e-50
        assert errors[1] < errors[0]

    def test_generalized_with_infinite_eigenvalue(self, ctx):
        A = MPMatrix.from_rows([[1, 0], [0, 2]], ctx)
        B = MPMatrix.from_rows([[1, 0], [0, 0]], ctx)
        finite, infinite = eigenvalues(A, B)
        assert finite == [1]
        assert infinite == 1

    def test_generalized_pencil(self, ctx):
        A = MPMatrix.from_rows([[2, 0], [0, 6]], ctx)
        B = MPMatrix.from_rows([[1, 1], [0, 2]], ctx)
        finite, infinite = eigenvalues(A, B)
        assert infinite == 0
        assert [complex(z) for z in finite] == [pytest.approx(2), pytest.approx(3)]

    def test_sorted_by_real_part(self, ctx):
        finite, _ = eigenvalues_standard(MPMatrix.from_rows(companion([5, -3, 1]), ctx))
        reals = [float(z.real) for z in finite]
        assert reals == sorted(reals)

    def test_singular_pencil(self, ctx):
        A = MPMatrix.from_rows([[1, 0], [0, 0]], ctx)
        B = MPMatrix.from_rows([[1, 0], [0, 0]], ctx)
        with pytest.raises(SingularPencilError):
            eigenvalues(A, B)

    def test_non_square_standard(self, ctx):
        with pytest.raises(ShapeError):
            eigenvalues_standard(MPMatrix.zeros(2, 3, ctx))


class TestQZIterate:
    def test_converged_result(self, ctx):
        A = MPMatrix.from_rows(companion([1, 2, 3]), ctx)
        H, T = hessenberg_triangular(A, MPMatrix.identity(3, ctx))
        result = qz_iterate(H, T)
        assert result.converged
        assert len(result.pairs) == 3
        assert result.total_sweeps > 0
        assert T.is_upper_triangular()

    def test_budget_exhaustion(self, ctx):
        A = MPMatrix.from_rows(companion([1, 2, 3, 4, 5, 6]), ctx)
        H, T = hessenberg_triangular(A, MPMatrix.identity(6, ctx))
        result = qz_iterate(H, T, QZConfig(max_sweeps_per_eigenvalue=1))
        assert not result.converged
        assert result.pairs == []

    def test_convergence_error_carries_result(self, ctx):
        A = MPMatrix.from_rows(companion([1, 2, 3, 4, 5, 6]), ctx)
        with pytest.raises(ConvergenceError) as excinfo:
            eigenvalues_standard(A, QZConfig(max_sweeps_per_eigenvalue=1))
        assert excinfo.value.result.converged is False

    def test_pair_value(self, ctx):
        A = MPMatrix.from_rows([[6, 0], [0, 1]], ctx)
        B = MPMatrix.from_rows([[2, 0], [0, 1]], ctx)
        H, T = hessenberg_triangular(A, B)
        result = qz_iterate(H, T)
        assert sorted(p.value().real for p in result.pairs) == [1, 3]

    def test_identity_against_singular_diagonal(self, ctx):
        H = MPMatrix.identity(2, ctx)
        T = MPMatrix.from_rows([[1, 0], [0, 0]], ctx)
        result = qz_iterate(H, T)
        assert result.converged
        pairs = sorted(result.pairs, key=lambda p: abs(p.beta))
        assert [(abs(p.alpha), abs(p.beta)) for p in pairs] == [(1, 0), (1, 1)]
        assert pairs[1].value() == 1


class TestSpecialMatrices:
    def test_zero_matrix(self, ctx):
        finite, infinite = eigenvalues_standard(MPMatrix.zeros(4, 4, ctx))
        assert finite == [0, 0, 0, 0]
        assert infinite == 0

    @pytest.mark.parametrize("bits, tol", [(53, 1e-6), (200, 1e-25)])
    def test_jordan_block_double_eigenvalue(self, bits, tol):
        J = MPMatrix.from_rows([[5, 1], [0, 5]], get_context(bits))
        finite, infinite = eigenvalues_standard(J)
        assert infinite == 0
        assert len(finite) == 2
        assert all(abs(z - 5) < tol for z in finite)

    def test_repeated_solves_are_identical(self, ctx):
        A = MPMatrix.from_rows(PENCIL_A, ctx)
        B = MPMatrix.from_rows(PENCIL_B, ctx)
        first = eigenvalues(A, B)
        second = eigenvalues(A, B)
        assert first == second
        assert [z._mpc_ for z in first[0]] == [z._mpc_ for z in second[0]]


# ── Oracle corpus ──────────────────────────────────────────────────────

CORPUS = [
    ([[1, -2, 0], [3, 4, -1], [0, 5, 2]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
    ([[2, 1, -3], [-1, 0, 4], [5, -2, 1]], [[2, 1, 0], [0, -1, 3], [0, 0, 1]]),
    ([[0, 1, 0], [0, 0, 1], [-4, 3, -5]], [[1, 2, -1], [0, 3, 1], [0, 0, -2]]),
    ([[-5, 2, 1], [4, 4, -3], [1, -1, 0]], [[1, 0, 0], [0, 0, 0], [0, 0, 1]]),
    (PENCIL_A, PENCIL_B),
]

LEFT = [[1, 0, 0, 0], [2, 1, 0, 0], [-1, 3, 1, 0], [1, 0, -2, 1]]
RIGHT = [[1, -1, 2, 0], [0, 1, 1, -3], [0, 0, 1, 1], [0, 0, 0, 1]]

# (diag of A, diag of B, finite eigenvalues with multiplicity, infinite count)
KNOWN_ROOTS = [
    ((2, 2, -1), (1, 1, 1), [2, 2, -1], 0),
    ((6, -3), (2, 3), [3, -1], 0),
    ((-1, -1, -1), (1, 1, 1), [-1, -1, -1], 0),
    ((3, 1, 4, 1), (1, 1, 2, 0), [3, 1, 2], 1),
    ((0, 0, 5, 1), (1, 1, 1, 0), [0, 0, 5], 1),
    ((1, 2, 3, 4), (0, 1, 0, 1), [2, 4], 2),
]


def int_matmul(X, Y):
    return [[sum(x * y for x, y in zip(row, col, strict=True)) for col in zip(*Y)] for row in X]


def equivalent_pencil(diag_a, diag_b):
    """(L·A·R, L·B·R) with A unit-coupled upper triangular and B diagonal.

    L and R are unimodular integer matrices, so the generalized eigenvalues
    are exactly diag_a[i] / diag_b[i] and repeated values form Jordan blocks.
    """
    n = len(diag_a)
    A = [[diag_a[i] if i == j else (1 if j > i else 0) for j in range(n)] for i in range(n)]
    B = [[diag_b[i] if i == j else 0 for j in range(n)] for i in range(n)]
    L = [row[:n] for row in LEFT[:n]]
    R = [row[:n] for row in RIGHT[:n]]
    return int_matmul(int_matmul(L, A), R), int_matmul(int_matmul(L, B), R)


def assert_matches_with_multiplicity(computed, expected, tol):
    remaining = [complex(z) for z in computed]
    assert len(remaining) == len(expected)
    for root in expected:
        nearest = min(remaining, key=lambda z: abs(z - root))
        assert abs(nearest - root) < tol
        remaining.remove(nearest)


def characteristic_residual(A, B, z, mp):
    shifted = [
        [a - z * b for a, b in zip(ra, rb, strict=True)] for ra, rb in zip(A, B, strict=True)
    ]
    return abs(mp.det(mp.matrix(shifted)))


class TestOracleCorpus:
    @pytest.mark.parametrize("A, B", CORPUS)
    def test_finite_eigenvalues_are_determinant_roots(self, A, B):
        ctx = get_context(113)
        finite, infinite = eigenvalues(MPMatrix.from_rows(A, ctx), MPMatrix.from_rows(B, ctx))
        assert len(finite) + infinite == len(A)
        for z in finite:
            assert characteristic_residual(A, B, z, ctx.mp) < 1e-20

    def test_rank_deficient_b_gives_infinite_eigenvalue(self):
        A, B = CORPUS[3]
        ctx = get_context(113)
        _, infinite = eigenvalues(MPMatrix.from_rows(A, ctx), MPMatrix.from_rows(B, ctx))
        assert infinite == 1

    @pytest.mark.parametrize("diag_a, diag_b, roots, infinite", KNOWN_ROOTS)
    def test_known_roots_with_multiplicity(self, diag_a, diag_b, roots, infinite):
        A, B = equivalent_pencil(diag_a, diag_b)
        ctx = get_context(113)
        finite, n_inf = eigenvalues(MPMatrix.from_rows(A, ctx), MPMatrix.from_rows(B, ctx))
        assert n_inf == infinite
        assert_matches_with_multiplicity(finite, roots, 1e-8)
        assert hausdorff(finite, roots) < 1e-8


def random_unitary(n, ctx, seed):
    """Q factor of a complex Gaussian matrix."""
    rng = random.Random(seed)
    mp = ctx.mp
    G = mp.matrix([[mp.mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n)] for _ in range(n)])
    Q, _ = mp.qr(G)
    return MPMatrix.from_rows([[Q[i, j] for j in range(n)] for i in range(n)], ctx)


class TestUnitaryInvariance:
    A6 = [
        [3, -1, 0, 2, 1, -4],
        [1, 2, -3, 0, 5, 1],
        [-2, 4, 1, -1, 0, 3],
        [0, 1, 2, 4, -2, -1],
        [5, 0, -1, 3, 2, 0],
        [1, -3, 4, 0, 1, 2],
    ]
    B6 = [
        [6, 1, 0, -1, 0, 1],
        [0, 6, 1, 0, 2, 0],
        [1, 0, 6, 1, 0, -1],
        [0, -1, 0, 6, 1, 0],
        [1, 0, 1, 0, 6, 1],
        [0, 2, 0, 1, 0, 6],
    ]

    def test_random_unitary_generator(self):
        wide = get_context(452)
        Q = random_unitary(6, wide, seed=3)
        assert max_diff(Q @ Q.conjugate_transpose(), MPMatrix.identity(6, wide)) < 1e-30

    @pytest.mark.parametrize("seed", [7, 19])
    def test_random_equivalence_preserves_spectrum(self, seed):
        bits = 113
        ctx, wide = get_context(bits), get_context(4 * bits)
        Q = random_unitary(6, wide, seed)
        Z = random_unitary(6, wide, seed + 1)
        A = MPMatrix.from_rows(self.A6, ctx)
        B = MPMatrix.from_rows(self.B6, ctx)
        QAZ = (Q @ MPMatrix.from_rows(self.A6, wide) @ Z).to_context(ctx)
        QBZ = (Q @ MPMatrix.from_rows(self.B6, wide) @ Z).to_context(ctx)

        original, inf_a = eigenvalues(A, B)
        transformed, inf_t = eigenvalues(QAZ, QBZ)
        assert inf_a == inf_t == 0
        assert len(original) == len(transformed) == 6
        assert hausdorff(original, transformed) <= 1000 * ctx.epsilon * A.frobenius_norm()
