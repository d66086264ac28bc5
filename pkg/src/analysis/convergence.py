"""(N, P) convergence sweeps against a high-resolution reference spectrum.

A sweep solves the reference configuration once, then every grid member,
filters all spectra to the flow's comparison region and records the Hausdorff
distance of each member to the reference. Member solves can run in worker
processes; results come back as decimal payloads and are written to the
spectrum store by the calling process only.
"""

from __future__ import annotations

import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np
import structlog

from src.analysis.distance import filter_region, hausdorff
from src.analysis.models import ConvergenceRecord, Region, SpectrumMeta, SpectrumSet
from src.analysis.storage import (
    SpectrumStore,
    cache_key,
    spectrum_from_payload,
    spectrum_to_payload,
)
from src.chebtau import FlowProfile, Method, OSParams, assemble
from src.densela import QZConfig, eigenvalues
from src.errors import (
    ConfigurationError,
    ConvergenceError,
    EmptySetError,
    FitError,
    SingularPencilError,
)
from src.precision import as_fraction, get_context, machine_epsilon

logger = structlog.get_logger(__name__)

ACCURACY_LEVELS: dict[str, Fraction] = {
    "10%": Fraction(1, 10),
    "single": Fraction(1, 2**23),
    "double": Fraction(1, 2**52),
    "extended": Fraction(1, 2**112),
}
"""Target Hausdorff distances: 10 %, then eps_P for P = 24, 53, 113."""


# ── Single solves ──────────────────────────────────────────────────────


def solve_spectrum(
    flow: FlowProfile | str,
    params: OSParams,
    method: Method | str,
    N: int,
    P: int,
    qz: QZConfig | None = None,
    notes: Sequence[str] = (),
) -> tuple[SpectrumSet, SpectrumSet]:
    """Assemble and solve one tau system.

    Returns:
        ``(finite, finite_in_region)`` spectra sharing one metadata block.

    Raises:
        ConfigurationError: ``N < 4``.
        ConvergenceError: QZ ran out of sweeps.
    """
    profile = FlowProfile.of(flow)
    qz = qz or QZConfig()
    ctx = get_context(P)
    started = time.perf_counter()
    system = assemble(method, profile, params, N, ctx)
    finite, infinite = eigenvalues(system.A, system.B, qz)
    meta = SpectrumMeta(
        flow=str(profile.kind),
        re=str(params.re),
        a=str(params.a),
        method=str(Method(method)),
        N=N,
        P=P,
        infinite_count=infinite,
        wall_time_s=time.perf_counter() - started,
        notes=list(notes),
        qz=qz.model_dump(),
    )
    spectrum = SpectrumSet(finite, meta)
    logger.info(
        "solve.done",
        flow=meta.flow,
        method=meta.method,
        n=N,
        bits=P,
        finite=len(finite),
        infinite=infinite,
        wall_time_s=round(meta.wall_time_s, 3),
    )
    return spectrum, filter_region(spectrum, Region.for_flow(profile))


@dataclass(frozen=True)
class SolveTask:
    """Picklable description of one member solve."""

    flow: str
    re: str
    a: str
    method: str
    N: int
    P: int
    qz: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return cache_key(self.flow, self.re, self.a, self.method, self.N, self.P, self.qz)


def run_task(task: SolveTask) -> dict[str, Any]:
    """Solve a task and return its JSON payload, or an ``error`` entry."""
    params = OSParams(re=task.re, a=task.a)
    try:
        spectrum, _ = solve_spectrum(
            task.flow, params, task.method, task.N, task.P, QZConfig(**task.qz), task.notes
        )
    except (ConvergenceError, SingularPencilError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    return spectrum_to_payload(spectrum)


def _run_tasks(
    tasks: Sequence[SolveTask], store: SpectrumStore | None, jobs: int
) -> dict[tuple[int, int], SpectrumSet | str]:
    """Resolve every task from the store or by solving; failures map to a reason string."""
    outcomes: dict[tuple[int, int], SpectrumSet | str] = {}
    pending: list[SolveTask] = []
    for task in tasks:
        cached = store.load(task.key) if store is not None else None
        if cached is not None:
            outcomes[(task.N, task.P)] = cached
        else:
            pending.append(task)

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            payloads = list(pool.map(run_task, pending))
    else:
        payloads = [run_task(task) for task in pending]

    for task, payload in zip(pending, payloads, strict=True):
        if "error" in payload:
            outcomes[(task.N, task.P)] = payload["error"]
            continue
        spectrum = spectrum_from_payload(payload)
        if store is not None:
            store.save(spectrum, task.key)
        outcomes[(task.N, task.P)] = spectrum
    return outcomes


# ── Sweeps ─────────────────────────────────────────────────────────────


def _validate_grid(Ns: Sequence[int], Ps: Sequence[int], refN: int, refP: int) -> None:
    if not Ns or not Ps:
        raise ConfigurationError("sweep needs at least one N and one P")
    if refN < max(Ns):
        raise ConfigurationError(f"reference N={refN} is below the largest swept N={max(Ns)}")
    if refP < max(Ps):
        raise ConfigurationError(f"reference P={refP} is below the largest swept P={max(Ps)}")


def _grid(Ns: Iterable[int], Ps: Iterable[int]) -> list[tuple[int, int]]:
    return [(n, p) for n in sorted(set(Ns)) for p in sorted(set(Ps))]


def _compare(
    reference: SpectrumSet,
    members: dict[tuple[int, int], SpectrumSet | str],
    region: Region,
) -> list[ConvergenceRecord]:
    ref_q = filter_region(reference, region)
    records: list[ConvergenceRecord] = []
    for (N, P), outcome in sorted(members.items()):
        if isinstance(outcome, str):
            record = ConvergenceRecord(
                N=N, P=P, reference=reference.meta, flagged=True, reason=outcome
            )
            logger.warning("sweep.flagged", n=N, bits=P, reason=outcome)
        else:
            try:
                d_h = hausdorff(filter_region(outcome, region), ref_q)
            except EmptySetError as exc:
                record = ConvergenceRecord(
                    N=N, P=P, reference=reference.meta, flagged=True, reason=str(exc)
                )
                logger.warning("sweep.flagged", n=N, bits=P, reason=str(exc))
            else:
                record = ConvergenceRecord(
                    N=N,
                    P=P,
                    d_H=d_h,
                    reference=reference.meta,
                    wall_time_s=outcome.meta.wall_time_s,
                )
                logger.info("sweep.record", n=N, bits=P, d_h=mpmath.nstr(d_h, 6))
        records.append(record)
    return records


def sweep(
    flow: FlowProfile | str,
    params: OSParams,
    method: Method | str,
    Ns: Sequence[int],
    Ps: Sequence[int],
    refN: int,
    refP: int,
    *,
    qz: QZConfig | None = None,
    jobs: int = 1,
    store: SpectrumStore | None = None,
    notes: Sequence[str] = (),
) -> list[ConvergenceRecord]:
    """Hausdorff distances of every (N, P) spectrum to the (refN, refP) spectrum.

    Member failures (non-convergence, singular pencil, nothing inside the
    region) produce flagged records; the sweep carries on. Records are ordered
    by (N, P) whatever the worker count.

    Raises:
        ConfigurationError: Empty grid or a reference below the grid.
        ConvergenceError: The reference solve itself failed.
    """
    _validate_grid(Ns, Ps, refN, refP)
    profile = FlowProfile.of(flow)
    method = Method(method)
    qz = qz or QZConfig()

    def task(N: int, P: int) -> SolveTask:
        return SolveTask(
            flow=str(profile.kind),
            re=str(params.re),
            a=str(params.a),
            method=str(method),
            N=N,
            P=P,
            qz=qz.model_dump(),
            notes=tuple(notes),
        )

    ref_task = task(refN, refP)
    reference = store.load(ref_task.key) if store is not None else None
    if reference is None:
        spectrum, _ = solve_spectrum(profile, params, method, refN, refP, qz, notes)
        reference = spectrum_from_payload(spectrum_to_payload(spectrum))
        if store is not None:
            store.save(reference, ref_task.key)
    logger.info("sweep.reference", n=refN, bits=refP, finite=len(reference))

    members = [task(N, P) for N, P in _grid(Ns, Ps) if (N, P) != (refN, refP)]
    outcomes = _run_tasks(members, store, jobs)
    if (refN, refP) in _grid(Ns, Ps):
        outcomes[(refN, refP)] = reference
    return _compare(reference, outcomes, Region.for_flow(profile))


def records_from_store(
    store: SpectrumStore,
    flow: FlowProfile | str,
    params: OSParams,
    method: Method | str,
    Ns: Sequence[int],
    Ps: Sequence[int],
    refN: int,
    refP: int,
    qz: QZConfig | None = None,
) -> list[ConvergenceRecord]:
    """Recompute sweep records from persisted spectra without solving.

    Raises:
        ReferenceMissingError: A grid member or the reference is not cached.
    """
    _validate_grid(Ns, Ps, refN, refP)
    profile = FlowProfile.of(flow)
    flow_name, method_name = str(profile.kind), str(Method(method))
    re, a = str(params.re), str(params.a)
    settings = (qz or QZConfig()).model_dump()
    reference = store.require(cache_key(flow_name, re, a, method_name, refN, refP, settings))
    members: dict[tuple[int, int], SpectrumSet | str] = {
        (N, P): store.require(cache_key(flow_name, re, a, method_name, N, P, settings))
        for N, P in _grid(Ns, Ps)
    }
    return _compare(reference, members, Region.for_flow(profile))


# ── Rates and thresholds ───────────────────────────────────────────────


def fit_rate(points: Sequence[tuple[Any, Any]], floor: Any | None = None) -> float:
    """Least-squares slope of log d_H against log eps_P.

    Args:
        points: ``(eps_P, d_H)`` pairs.
        floor: Points with ``d_H <= floor`` are treated as saturated and
            dropped before fitting.

    Raises:
        FitError: Fewer than three usable points with distinct eps_P.
    """
    usable = [
        (eps, d) for eps, d in points if d is not None and d > 0 and (floor is None or d > floor)
    ]
    distinct = {mpmath.mpf(eps) for eps, _ in usable}
    if len(usable) < 3 or len(distinct) < 3:
        raise FitError(
            f"need at least three unsaturated points with distinct eps_P, got {len(usable)}"
        )
    x = np.array([float(mpmath.log(eps)) for eps, _ in usable])
    y = np.array([float(mpmath.log(d)) for _, d in usable])
    slope, _intercept = np.polyfit(x, y, 1)
    return float(slope)


def saturation_floor(ref_bits: int) -> Any:
    """Ten times the reference precision; distances below it are saturated."""
    return 10 * machine_epsilon(ref_bits)


def fit_records(records: Iterable[ConvergenceRecord], ref_bits: int | None = None) -> float:
    """:func:`fit_rate` over unflagged records, cut at the reference floor."""
    points = [(r.eps_P, r.d_H) for r in records if not r.flagged]
    floor = saturation_floor(ref_bits) if ref_bits is not None else None
    return fit_rate(points, floor)


def minimal_resolution(
    records: Iterable[ConvergenceRecord], tolerance: Fraction | float
) -> tuple[int, int] | None:
    """Smallest N, then smallest P at that N, reaching ``d_H <= tolerance``."""
    tol = Fraction(tolerance)
    reached = [
        r.key
        for r in records
        if not r.flagged and r.d_H is not None and as_fraction(r.d_H) <= tol
    ]
    return min(reached) if reached else None


def resolution_thresholds(
    records: Sequence[ConvergenceRecord],
    levels: dict[str, Fraction] | None = None,
) -> dict[str, tuple[int, int] | None]:
    """:func:`minimal_resolution` for every accuracy level, in level order."""
    levels = ACCURACY_LEVELS if levels is None else levels
    return {name: minimal_resolution(records, tol) for name, tol in levels.items()}
