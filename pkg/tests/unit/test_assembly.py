"""Tests for the Orr-Sommerfeld tau pencils."""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.chebtau import (
    COUETTE,
    POISEUILLE,
    FlowKind,
    FlowProfile,
    Method,
    OSParams,
    RationalOperator,
    assemble,
    assemble_d2,
    assemble_d4,
    d2_operators,
    d4_operators,
    multiply_by_z2,
    second_derivative,
)
from src.densela import eigenvalues
from src.errors import ConfigurationError
from src.precision import get_context


@pytest.fixture
def params():
    return OSParams(re=1000, a=1)


@pytest.fixture
def ctx():
    return get_context(53)


def zero_rows(matrix):
    return sum(1 for row in matrix.data if all(not v for v in row))


# ── Parameters and profiles ────────────────────────────────────────────


class TestOSParams:
    def test_parses_decimal_strings_exactly(self):
        p = OSParams(re="1e4", a="0.1")
        assert p.re == 10000
        assert p.a == Fraction(1, 10)
        assert p.a_re == 1000

    def test_accepts_fractions(self):
        assert OSParams(re=Fraction(5, 2), a=2).a_re == 5

    @pytest.mark.parametrize("re, a", [(0, 1), (100, -1), ("abc", 1)])
    def test_rejects_invalid(self, re, a):
        with pytest.raises(ValidationError):
            OSParams(re=re, a=a)


class TestFlowProfile:
    def test_of(self):
        assert FlowProfile.of("poiseuille") == POISEUILLE
        assert FlowProfile.of(FlowKind.COUETTE) == COUETTE
        assert FlowProfile.of(COUETTE) is COUETTE

    def test_unknown_flow(self):
        with pytest.raises(ValueError):
            FlowProfile.of("taylor-couette")

    def test_curvature(self):
        assert POISEUILLE.curvature == -2
        assert COUETTE.curvature == 0

    def test_poiseuille_velocity(self):
        # U = 1 - z²: U·T0 = T0/2 - T2/2
        u = POISEUILLE.velocity(5, 7)
        assert u[0, 0] == Fraction(1, 2)
        assert u[2, 0] == Fraction(-1, 2)

    def test_couette_velocity(self):
        u = COUETTE.velocity(5, 7)
        assert u[1, 0] == 1
        assert u[0, 1] == Fraction(1, 2)

    def test_region_bounds(self):
        assert POISEUILLE.region_bounds == (0, 1, -1, 0)
        assert COUETTE.region_bounds == (-1, 1, -1, 0)


# ── D2 formulation ─────────────────────────────────────────────────────


class TestAssembleD2:
    def test_order(self, params, ctx):
        system = assemble_d2("poiseuille", params, 10, ctx)
        assert system.order == 26
        assert system.B.shape == (26, 26)
        assert system.method is Method.D2
        assert system.context is ctx

    def test_order_at_n200(self, params):
        a_real, _, _ = d2_operators(POISEUILLE, params, 200)
        assert a_real.shape == (406, 406)

    def test_b_purely_imaginary(self, params, ctx):
        system = assemble_d2("couette", params, 8, ctx)
        assert all(v.real == 0 for v in system.B.entries())

    def test_b_zero_rows(self, params, ctx):
        N = 8
        system = assemble_d2("poiseuille", params, N, ctx)
        assert zero_rows(system.B) == 2 * (N + 3) - (N + 1)

    def test_b_block(self, params):
        N = 6
        _, _, b_imag = d2_operators(POISEUILLE, params, N)
        m = N + 3
        assert b_imag[m, m] == -1000
        assert b_imag.nnz == N + 1

    def test_couette_phi_block_vanishes(self, params):
        N = 6
        _, a_imag, _ = d2_operators(COUETTE, params, N)
        assert all(j >= N + 3 for (_, j), _ in a_imag.items())

    def test_poiseuille_imaginary_blocks(self, params):
        N = 6
        m = N + 3
        _, a_imag, _ = d2_operators(POISEUILLE, params, N)
        assert a_imag[m, 0] == -2000
        expected = 1000 * (multiply_by_z2(N + 1, m) - RationalOperator.identity(N + 1, m))
        for (i, j), v in expected.items():
            assert a_imag[m + i, m + j] == v

    def test_first_block_row(self, params):
        N = 6
        m = N + 3
        a_real, _, _ = d2_operators(POISEUILLE, params, N)
        helmholtz = second_derivative(N + 1, m) - RationalOperator.identity(N + 1, m)
        for i in range(N + 1):
            assert [a_real[i, j] for j in range(m)] == helmholtz.row(i)
            assert a_real[i, m + i] == -1

    def test_boundary_rows_act_on_phi(self, params):
        N = 6
        m = N + 3
        a_real, _, _ = d2_operators(POISEUILLE, params, N)
        assert [a_real[N + 1, j] for j in range(m)] == [1, 0, 1, 0, 1, 0, 1, 0, 1]
        assert [a_real[2 * N + 5, j] for j in range(m)] == [0, 0, 4, 0, 16, 0, 36, 0, 64]
        for row in (N + 1, N + 2, 2 * N + 4, 2 * N + 5):
            assert all(a_real[row, j] == 0 for j in range(m, 2 * m))

    def test_small_truncation(self, params, ctx):
        with pytest.raises(ConfigurationError):
            assemble_d2("poiseuille", params, 3, ctx)


# ── D4 formulation ─────────────────────────────────────────────────────


class TestAssembleD4:
    def test_order(self, params, ctx):
        system = assemble_d4("couette", params, 10, ctx)
        assert system.order == 15
        assert system.method is Method.D4

    def test_order_at_n200(self, params):
        a_real, _, _ = d4_operators(POISEUILLE, params, 200)
        assert a_real.shape == (205, 205)

    def test_b_structure(self, params, ctx):
        N = 8
        system = assemble_d4("poiseuille", params, N, ctx)
        assert all(v.real == 0 for v in system.B.entries())
        assert zero_rows(system.B) == 4

    def test_couette_has_no_curvature_term(self, params):
        N = 6
        _, a_imag, _ = d4_operators(COUETTE, params, N)
        # -aRe·Π^z(D² - a²): the T0 column only meets -a² through z·T0 = T1
        assert a_imag[0, 0] == 0
        assert a_imag[1, 0] == 1000

    def test_poiseuille_curvature_term(self, params):
        N = 6
        _, a_imag, _ = d4_operators(POISEUILLE, params, N)
        # -aRe(Id - Π^{z²})(-a²)T0 - 2aRe·T0, projected on T0: 1000·(1/2) - 2000
        assert a_imag[0, 0] == -1500

    def test_small_truncation(self, params, ctx):
        with pytest.raises(ConfigurationError):
            assemble_d4("couette", params, 2, ctx)


# ── Rounding ───────────────────────────────────────────────────────────


class TestExactThenRound:
    @pytest.mark.parametrize("method", ["d2", "d4"])
    def test_wide_assembly_narrows_to_same_matrix(self, params, method):
        narrow = assemble(method, "poiseuille", params, 8, get_context(53))
        wide = assemble(method, "poiseuille", params, 8, get_context(212))
        assert wide.A.to_context(get_context(53)) == narrow.A
        assert wide.B.to_context(get_context(53)) == narrow.B

    def test_unknown_method(self, params, ctx):
        with pytest.raises(ValueError):
            assemble("d3", "poiseuille", params, 8, ctx)


class TestSmallPencils:
    @pytest.mark.parametrize("method", ["d2", "d4"])
    def test_every_eigenvalue_is_accounted_for(self, params, ctx, method):
        system = assemble(method, "poiseuille", params, 6, ctx)
        finite, infinite = eigenvalues(system.A, system.B)
        assert len(finite) + infinite == system.order
        assert all(system.context.owns(z) for z in finite)
