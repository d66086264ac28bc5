"""Godunov's 7×7 non-normal benchmark matrices.

``A_s = L⁻¹ · Ã_s · L`` where ``Ã_s`` is upper triangular with diagonal
``(1, −2, 4, 0, −4, 2, s)`` and ``L`` is a unit lower triangular integer
matrix. Both factors and the product are exact integers, so the only error
in a computed spectrum comes from the eigenvalue solver. For ``s = 1`` the
eigenvalue 1 is double and the computed spectrum converges like eps_P^(1/2);
for ``s = −1`` all eigenvalues are simple and it converges like eps_P.
"""

from __future__ import annotations

import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
import structlog

from src.analysis import SpectrumMeta, SpectrumSet, hausdorff
from src.analysis.convergence import fit_rate
from src.analysis.storage import spectrum_from_payload, spectrum_to_payload
from src.densela import MPMatrix, QZConfig, QZResult, eigenvalues_standard
from src.errors import ConfigurationError, ConvergenceError, FitError, SingularPencilError
from src.precision import MPReal, get_context, machine_epsilon

logger = structlog.get_logger(__name__)

IntMatrix = list[list[int]]

ORDER = 7

DOUBLE_BITS = 53
BASELINE_NOTE = "numpy.linalg.eigvals"

_UPPER_ROWS: tuple[tuple[int, ...], ...] = (
    (1, 2048, 256, 128, 64, 32, 16),
    (0, -2, 1024, 512, 256, 128, 32),
    (0, 0, 4, 512, 1024, 256, 64),
    (0, 0, 0, 0, 512, 512, 128),
    (0, 0, 0, 0, -4, 1024, 256),
    (0, 0, 0, 0, 0, 2, 2048),
)

L_ROWS: tuple[tuple[int, ...], ...] = (
    (1, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 0),
    (1, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0),
    (0, 0, 1, 0, 1, 0, 0),
    (1, 0, 0, 0, 0, 1, 0),
    (0, 1, 1, 0, 1, 0, 1),
)


def upper_factor(s: int) -> IntMatrix:
    """Ã_s: the upper triangular factor with last diagonal entry ``s``."""
    return [list(r) for r in _UPPER_ROWS] + [[0, 0, 0, 0, 0, 0, s]]


def unit_lower_inverse(L: IntMatrix) -> IntMatrix:
    """Inverse of a unit lower triangular integer matrix by forward substitution."""
    n = len(L)
    if any(L[i][i] != 1 or any(L[i][i + 1 :]) for i in range(n)):
        raise ValueError("L must be unit lower triangular")
    inv = [[0] * n for _ in range(n)]
    for col in range(n):
        for i in range(n):
            acc = 1 if i == col else 0
            for k in range(i):
                acc -= L[i][k] * inv[k][col]
            inv[i][col] = acc
    return inv


def int_matmul(X: IntMatrix, Y: IntMatrix) -> IntMatrix:
    columns = list(zip(*Y, strict=True))
    return [[sum(x * y for x, y in zip(row, col, strict=True)) for col in columns] for row in X]


@dataclass(frozen=True)
class GodunovCase:
    s: int
    A: IntMatrix
    true_spectrum: tuple[int, ...]

    @property
    def trace(self) -> int:
        return sum(self.A[i][i] for i in range(ORDER))

    def matrix(self, bits: int) -> MPMatrix:
        """A at ``bits`` precision (exact for any bits ≥ 13)."""
        return MPMatrix.from_rows(self.A, get_context(bits))


def build(s: int) -> GodunovCase:
    """Construct ``A_s = L⁻¹ Ã_s L`` exactly.

    Raises:
        ConfigurationError: ``s`` is not +1 or −1.
    """
    if s not in (1, -1):
        raise ConfigurationError(f"s must be +1 or -1, got {s}")
    upper = upper_factor(s)
    L = [list(r) for r in L_ROWS]
    A = int_matmul(int_matmul(unit_lower_inverse(L), upper), L)
    spectrum = tuple(sorted(upper[i][i] for i in range(ORDER)))
    return GodunovCase(s=s, A=A, true_spectrum=spectrum)


# ── Precision experiment ───────────────────────────────────────────────


class GodunovRow(NamedTuple):
    P: int
    d_H: MPReal
    spectrum: SpectrumSet


@dataclass
class GodunovExperiment:
    s: int
    rows: list[GodunovRow]
    rate: float | None
    baseline: GodunovRow | None = None

    @property
    def points(self) -> list[tuple[MPReal, MPReal]]:
        return [(machine_epsilon(r.P), r.d_H) for r in self.rows]


def solve_case(case: GodunovCase, bits: int, qz: QZConfig | None = None) -> SpectrumSet:
    """Eigenvalues of A_s (B = Id) at ``bits`` precision."""
    qz = qz or QZConfig()
    started = time.perf_counter()
    finite, infinite = eigenvalues_standard(case.matrix(bits), qz)
    meta = SpectrumMeta(
        flow="godunov",
        N=ORDER,
        P=bits,
        infinite_count=infinite,
        wall_time_s=time.perf_counter() - started,
        notes=[f"s={case.s:+d}"],
        qz=qz.model_dump(),
    )
    return SpectrumSet(finite, meta)


def baseline_spectrum(case: GodunovCase) -> SpectrumSet:
    """Eigenvalues of A_s from LAPACK in IEEE double, for comparison with the QZ runs."""
    ctx = get_context(DOUBLE_BITS)
    started = time.perf_counter()
    values = np.linalg.eigvals(np.array(case.A, dtype=np.float64))
    meta = SpectrumMeta(
        flow="godunov",
        N=ORDER,
        P=DOUBLE_BITS,
        wall_time_s=time.perf_counter() - started,
        notes=[f"s={case.s:+d}", BASELINE_NOTE],
    )
    return SpectrumSet([ctx.complex(complex(z)) for z in values], meta)


def _solve_payload(task: tuple[int, int, dict[str, Any]]) -> dict[str, Any]:
    s, bits, qz = task
    try:
        return spectrum_to_payload(solve_case(build(s), bits, QZConfig(**qz)))
    except (ConvergenceError, SingularPencilError) as exc:
        return {"error": str(exc), "kind": type(exc).__name__}


def run_experiment(
    s: int, Ps: Sequence[int], qz: QZConfig | None = None, jobs: int = 1
) -> GodunovExperiment:
    """Solve A_s at every precision in ``Ps`` and measure d_H to the true spectrum.

    The fitted rate is the log-log slope of d_H against eps_P, or ``None``
    when fewer than three precisions give a positive distance.

    Raises:
        ConfigurationError: Empty ``Ps`` or invalid ``s``.
        ConvergenceError: A solve ran out of QZ sweeps.
    """
    if not Ps:
        raise ConfigurationError("at least one precision is required")
    case = build(s)
    qz = qz or QZConfig()
    tasks = [(s, bits, qz.model_dump()) for bits in Ps]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            payloads = list(pool.map(_solve_payload, tasks))
    else:
        payloads = [_solve_payload(t) for t in tasks]

    rows: list[GodunovRow] = []
    for bits, payload in zip(Ps, payloads, strict=True):
        if "error" in payload:
            if payload["kind"] == SingularPencilError.__name__:
                raise SingularPencilError(payload["error"])
            raise ConvergenceError(payload["error"], QZResult())
        spectrum = spectrum_from_payload(payload)
        d_h = hausdorff(spectrum, case.true_spectrum)
        rows.append(GodunovRow(bits, d_h, spectrum))
        logger.info("godunov.row", s=s, bits=bits, finite=len(spectrum), d_h=f"{float(d_h):.3e}")

    baseline = baseline_spectrum(case)
    baseline_row = GodunovRow(DOUBLE_BITS, hausdorff(baseline, case.true_spectrum), baseline)
    logger.info("godunov.baseline", s=s, d_h=f"{float(baseline_row.d_H):.3e}")

    try:
        rate: float | None = fit_rate([(machine_epsilon(r.P), r.d_H) for r in rows])
    except FitError:
        rate = None
    return GodunovExperiment(s=s, rows=rows, rate=rate, baseline=baseline_row)
