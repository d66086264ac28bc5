"""Region filtering and the Hausdorff distance between spectra."""

from __future__ import annotations

from collections.abc import Iterable
from typing import Any

from src.analysis.models import Region, SpectrumSet
from src.errors import EmptySetError
from src.precision import MPComplex, MPReal, PrecisionContext, context_of, get_context


def filter_region(spectrum: SpectrumSet, region: Region) -> SpectrumSet:
    """Keep the eigenvalues inside ``region`` (boundary included)."""
    return spectrum.with_eigenvalues([z for z in spectrum.eigenvalues if region.contains(z)])


def _as_points(points: SpectrumSet | Iterable[Any], ctx: PrecisionContext) -> list[MPComplex]:
    values = points.eigenvalues if isinstance(points, SpectrumSet) else list(points)
    unique: dict[Any, MPComplex] = {}
    for v in values:
        z = ctx.complex(v)
        unique.setdefault(z._mpc_, z)
    return list(unique.values())


def _widest(*groups: list[Any]) -> PrecisionContext:
    bits = [context_of(v).bits for g in groups for v in g if hasattr(v, "context")]
    return get_context(max(bits, default=53))


def hausdorff(
    first: SpectrumSet | Iterable[Any], second: SpectrumSet | Iterable[Any]
) -> MPReal:
    """Hausdorff distance between two finite point sets in the complex plane.

    Both sets are widened to the larger operand precision and treated as
    sets, so repeated points count once. Brute force, O(|A|·|B|).

    Raises:
        EmptySetError: Either set is empty.
    """
    a_raw = first.eigenvalues if isinstance(first, SpectrumSet) else list(first)
    b_raw = second.eigenvalues if isinstance(second, SpectrumSet) else list(second)
    if not a_raw or not b_raw:
        raise EmptySetError(
            f"Hausdorff distance needs two non-empty sets (sizes {len(a_raw)}, {len(b_raw)})"
        )
    ctx = _widest(a_raw, b_raw)
    mp = ctx.mp
    a_pts = _as_points(a_raw, ctx)
    b_pts = _as_points(b_raw, ctx)

    # squared distances; sqrt is monotone so it is taken once at the end
    col_min: list[MPReal | None] = [None] * len(b_pts)
    worst = mp.zero
    for a in a_pts:
        row_min = None
        for k, b in enumerate(b_pts):
            d = a - b
            d2 = d.real * d.real + d.imag * d.imag
            if row_min is None or d2 < row_min:
                row_min = d2
            current = col_min[k]
            if current is None or d2 < current:
                col_min[k] = d2
        if row_min is not None and row_min > worst:
            worst = row_min
    for d2 in col_min:
        if d2 is not None and d2 > worst:
            worst = d2
    return mp.sqrt(worst)
