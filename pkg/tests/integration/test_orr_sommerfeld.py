"""Orr-Sommerfeld reproductions.

The slow ones are deselected by default; run them with ``pytest -m slow tests/integration``.
"""

import pytest

from src.analysis import Region, filter_region, hausdorff, solve_spectrum, sweep
from src.chebtau import OSParams

# Unstable Poiseuille mode at Re = 1e4, a = 1
LEADING_MODE = complex(0.23752649, 0.00373967)


def leading_eigenvalue(spectrum):
    """Largest imaginary part among eigenvalues with 0 <= Re c <= 1 and |Im c| <= 1."""
    box = Region(re_min=0, re_max=1, im_min=-1, im_max=1)
    return max(filter_region(spectrum, box), key=lambda z: z.imag)


class TestModeratePoiseuilleMode:
    def test_d4_at_double_precision(self):
        spectrum, _ = solve_spectrum("poiseuille", OSParams(re="1e4", a="1"), "d4", 80, 53)
        mode = complex(leading_eigenvalue(spectrum))
        assert mode == pytest.approx(LEADING_MODE, abs=1e-6)
        assert mode.imag > 0


@pytest.mark.slow
class TestPoiseuilleLeadingMode:
    def test_double_precision_matches_high_resolution_run(self):
        params = OSParams(re="1e4", a="1")
        coarse, _ = solve_spectrum("poiseuille", params, "d2", 200, 53)
        fine, _ = solve_spectrum("poiseuille", params, "d2", 400, 200)
        coarse_mode = complex(leading_eigenvalue(coarse))
        fine_mode = complex(leading_eigenvalue(fine))
        assert abs(coarse_mode - fine_mode) < 1e-6
        assert fine_mode == pytest.approx(LEADING_MODE, abs=1e-7)

    def test_d4_finds_the_same_mode(self):
        spectrum, _ = solve_spectrum("poiseuille", OSParams(re="1e4", a="1"), "d4", 100, 113)
        assert complex(leading_eigenvalue(spectrum)) == pytest.approx(LEADING_MODE, abs=1e-6)


@pytest.mark.slow
class TestPlateau:
    def test_double_precision_stalls_while_wider_precision_converges(self):
        params = OSParams(re="1e5", a="1")
        records = sweep("poiseuille", params, "d2", [200, 300, 400, 500, 600], [53], 700, 300)
        distances = [r.d_H for r in records if not r.flagged]
        assert distances
        assert min(distances) > 1e-3

        (record,) = sweep("poiseuille", params, "d2", [500], [146], 700, 300)
        assert not record.flagged
        assert record.d_H <= 2**-52


@pytest.mark.slow
class TestD2AgainstD4:
    N = 400

    def test_d2_is_closer_at_double_precision(self):
        params = OSParams(re="1e5", a="1")
        region = Region.for_flow("poiseuille")
        _, reference = solve_spectrum("poiseuille", params, "d2", 700, 300)
        _, d2 = solve_spectrum("poiseuille", params, "d2", self.N, 53)
        _, d4 = solve_spectrum("poiseuille", params, "d4", self.N, 53)
        ref_q = filter_region(reference, region)
        assert hausdorff(d2, ref_q) < hausdorff(d4, ref_q)
        assert d4.meta.wall_time_s < d2.meta.wall_time_s

    def test_equivalent_at_wide_precision(self):
        params = OSParams(re="1e5", a="1")
        _, d2 = solve_spectrum("poiseuille", params, "d2", self.N, 400)
        _, d4 = solve_spectrum("poiseuille", params, "d4", self.N, 400)
        assert hausdorff(d2, d4) < 1e-10
