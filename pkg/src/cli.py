"""CLI entry point for hydrospec.

Exit codes: 0 success, 2 invalid arguments or missing reference file,
3 numerical failure (QZ non-convergence or a singular pencil).
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

import structlog
from pydantic import BaseModel, Field, ValidationError, field_validator

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_WAVENUMBER = "1"


# ── Run configurations ─────────────────────────────────────────────────


class GodunovRun(BaseModel):
    s: Literal[1, -1]
    bits: list[int] = Field(..., min_length=1)
    out: Path
    jobs: int = Field(default=1, ge=1)
    emit_plotdata: bool = False

    @field_validator("bits")
    @classmethod
    def _bits(cls, v: list[int]) -> list[int]:
        if any(b < 2 for b in v):
            raise ValueError("precisions must be at least 2 bits")
        return sorted(set(v))


class FlowRun(BaseModel):
    """Fields shared by every Orr-Sommerfeld command."""

    flow: Literal["poiseuille", "couette"] = "poiseuille"
    re: str
    a: str = DEFAULT_WAVENUMBER
    out: Path

    @field_validator("re", "a")
    @classmethod
    def _exact(cls, v: str) -> str:
        try:
            Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a finite decimal: {v!r}") from exc
        return v

    @property
    def notes(self) -> list[str]:
        is_default = Fraction(self.a.strip()) == Fraction(DEFAULT_WAVENUMBER)
        return ["a=1 (default wavenumber)"] if is_default else []


class SolveRun(FlowRun):
    method: Literal["d2", "d4"] = "d2"
    N: int = Field(..., ge=4)
    bits: int = Field(default=53, ge=2)
    raw: bool = False
    emit_plotdata: bool = False


class SweepRun(FlowRun):
    method: Literal["d2", "d4"] = "d2"
    Ns: list[int] = Field(..., min_length=1)
    Ps: list[int] = Field(..., min_length=1)
    ref_n: int = Field(..., ge=4)
    ref_bits: int = Field(..., ge=2)
    jobs: int = Field(default=1, ge=1)
    cache_dir: Path
    emit_plotdata: bool = False

    @field_validator("Ns")
    @classmethod
    def _truncations(cls, v: list[int]) -> list[int]:
        if any(n < 4 for n in v):
            raise ValueError("every N must be at least 4")
        return v

    @field_validator("Ps")
    @classmethod
    def _precisions(cls, v: list[int]) -> list[int]:
        if any(p < 2 for p in v):
            raise ValueError("precisions must be at least 2 bits")
        return v


class CompareRun(FlowRun):
    Ns: list[int] = Field(..., min_length=1)
    bits: int = Field(default=53, ge=2)
    ref: Path

    @field_validator("Ns")
    @classmethod
    def _truncations(cls, v: list[int]) -> list[int]:
        if any(n < 4 for n in v):
            raise ValueError("every N must be at least 4")
        return sorted(set(v))


# ── Commands ───────────────────────────────────────────────────────────


def cmd_godunov(run: GodunovRun, qz: Any) -> int:
    from src.analysis import ConvergenceRecord, SpectrumMeta, write_convergence_csv
    from src.analysis.plotdata import (
        write_eps_vs_distance,
        write_solver_distances,
        write_spectrum_scatter,
    )
    from src.analysis.storage import spectrum_filename, write_spectrum_json
    from src.classics import run_experiment
    from src.classics.godunov import ORDER

    experiment = run_experiment(run.s, run.bits, qz, jobs=run.jobs)
    exact = SpectrumMeta(flow="godunov", N=ORDER, P=max(run.bits), notes=["exact spectrum"])
    records = [
        ConvergenceRecord(
            N=ORDER,
            P=row.P,
            d_H=row.d_H,
            reference=exact,
            wall_time_s=row.spectrum.meta.wall_time_s,
        )
        for row in experiment.rows
    ]
    suffix = f"_s{run.s:+d}"
    stem = f"godunov{suffix}"
    for row in experiment.rows:
        write_spectrum_json(row.spectrum, run.out / spectrum_filename(row.spectrum.meta, suffix))
    baseline = experiment.baseline
    if baseline is not None:
        write_spectrum_json(
            baseline.spectrum,
            run.out / spectrum_filename(baseline.spectrum.meta, f"{suffix}_lapack"),
        )
    csv_path = write_convergence_csv(records, run.out / f"{stem}_convergence.csv")
    if run.emit_plotdata:
        write_eps_vs_distance(records, run.out / f"{stem}_eps_vs_dH.csv")
        for row in experiment.rows:
            write_spectrum_scatter(row.spectrum, run.out / f"{stem}_P{row.P}_scatter.csv")
        solvers = [("qz", row.P, row.d_H) for row in experiment.rows]
        if baseline is not None:
            solvers.append(("lapack", baseline.P, baseline.d_H))
        write_solver_distances(solvers, run.out / f"{stem}_solvers.csv")
    logger.info(
        "godunov.done",
        s=run.s,
        rows=len(records),
        slope=None if experiment.rate is None else round(experiment.rate, 3),
        lapack_d_h=None if baseline is None else f"{float(baseline.d_H):.3e}",
        csv=str(csv_path),
    )
    return EXIT_OK


def cmd_solve(run: SolveRun, qz: Any) -> int:
    from src.analysis.convergence import solve_spectrum
    from src.analysis.plotdata import write_spectrum_scatter
    from src.analysis.storage import spectrum_filename, write_spectrum_json
    from src.chebtau import OSParams

    params = OSParams(re=run.re, a=run.a)
    spectrum, in_region = solve_spectrum(
        run.flow, params, run.method, run.N, run.bits, qz, run.notes
    )
    path = write_spectrum_json(in_region, run.out / spectrum_filename(in_region.meta))
    if run.raw:
        write_spectrum_json(spectrum, run.out / spectrum_filename(spectrum.meta, "_raw"))
    if run.emit_plotdata:
        write_spectrum_scatter(spectrum, run.out / path.with_suffix(".scatter.csv").name)
    logger.info("solve.written", path=str(path), in_region=len(in_region), finite=len(spectrum))
    return EXIT_OK


def cmd_sweep(run: SweepRun, qz: Any) -> int:
    from src.analysis import (
        SpectrumStore,
        fit_records,
        resolution_thresholds,
        sweep,
        write_convergence_csv,
        write_threshold_csv,
    )
    from src.analysis.plotdata import emit_sweep_plotdata
    from src.chebtau import OSParams
    from src.errors import FitError

    params = OSParams(re=run.re, a=run.a)
    records = sweep(
        run.flow,
        params,
        run.method,
        run.Ns,
        run.Ps,
        run.ref_n,
        run.ref_bits,
        qz=qz,
        jobs=run.jobs,
        store=SpectrumStore(run.cache_dir),
        notes=run.notes,
    )
    stem = f"sweep_{run.flow}_{run.method}_Re{run.re}"
    csv_path = write_convergence_csv(records, run.out / f"{stem}_convergence.csv")
    if run.emit_plotdata:
        emit_sweep_plotdata(records, run.out, stem)
    thresholds = resolution_thresholds(records)
    write_threshold_csv(thresholds, run.out / f"{stem}_thresholds.csv")
    for level, found in thresholds.items():
        n, bits = found if found else (None, None)
        logger.info("sweep.threshold", level=level, n=n, bits=bits)
    flagged = sum(r.flagged for r in records)
    if flagged:
        logger.warning("sweep.partial", flagged=flagged, total=len(records))
    try:
        slope: float | None = round(fit_records(records, run.ref_bits), 3)
    except FitError:
        slope = None
    logger.info("sweep.done", rows=len(records), slope=slope, csv=str(csv_path))
    return EXIT_OK


def _same_problem(meta: Any, flow: str, params: Any) -> bool:
    """Whether a spectrum file was computed for this flow, Re and a."""
    if meta.flow != flow or meta.re is None or meta.a is None:
        return False
    return Fraction(meta.re) == params.re and Fraction(meta.a) == params.a


def cmd_compare_d2d4(run: CompareRun, qz: Any) -> int:
    from src.analysis import (
        Region,
        filter_region,
        hausdorff,
        read_spectrum_json,
        write_comparison_csv,
    )
    from src.analysis.convergence import solve_spectrum
    from src.chebtau import Method, OSParams
    from src.errors import ConfigurationError, EmptySetError
    from src.precision import to_decimal

    reference = read_spectrum_json(run.ref)
    params = OSParams(re=run.re, a=run.a)
    ref_meta = reference.meta
    if not _same_problem(ref_meta, run.flow, params):
        raise ConfigurationError(
            f"reference {run.ref} is for flow={ref_meta.flow} re={ref_meta.re} a={ref_meta.a}, "
            f"not flow={run.flow} re={params.re} a={params.a}"
        )
    region = Region.for_flow(run.flow)
    ref_q = filter_region(reference, region)

    rows: list[tuple[int, str, str, float, float]] = []
    for n in run.Ns:
        distances: list[str] = []
        walls: list[float] = []
        for method in (Method.D2, Method.D4):
            _, in_region = solve_spectrum(run.flow, params, method, n, run.bits, qz, run.notes)
            try:
                distances.append(to_decimal(hausdorff(in_region, ref_q)))
            except EmptySetError:
                distances.append("nan")
            walls.append(in_region.meta.wall_time_s)
        rows.append((n, distances[0], distances[1], walls[0], walls[1]))
        logger.info("compare.row", n=n, bits=run.bits, d2=distances[0][:12], d4=distances[1][:12])

    path = write_comparison_csv(rows, run.out / f"compare_d2d4_{run.flow}_P{run.bits}.csv")
    logger.info("compare.done", rows=len(rows), csv=str(path))
    return EXIT_OK


# ── Parser ─────────────────────────────────────────────────────────────


def int_list(text: str) -> list[int]:
    """Parse ``"53,113,256"``."""
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _add_flow_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--flow", choices=["poiseuille", "couette"], default="poiseuille")
    parser.add_argument("--re", required=True, help="Reynolds number, e.g. 1e4")
    parser.add_argument("--a", default=DEFAULT_WAVENUMBER, help="streamwise wavenumber")
    parser.add_argument("--out", type=Path, default=Path("out"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrospec",
        description="Multiprecision eigenvalues for Orr-Sommerfeld tau discretizations",
    )
    parser.add_argument("--log-level", default=None, help="overrides HYDROSPEC_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command")

    godunov = subparsers.add_parser("godunov", help="Godunov 7x7 precision experiment")
    godunov.add_argument("--s", type=int, choices=[1, -1], required=True)
    godunov.add_argument("--bits", type=int_list, default=[53, 113, 256])
    godunov.add_argument("--out", type=Path, default=Path("out"))
    godunov.add_argument("--jobs", type=int, default=None)
    godunov.add_argument("--emit-plotdata", action="store_true")

    solve = subparsers.add_parser("solve", help="Solve one Orr-Sommerfeld configuration")
    _add_flow_args(solve)
    solve.add_argument("--method", choices=["d2", "d4"], default="d2")
    solve.add_argument("--n", type=int, required=True)
    solve.add_argument("--bits", type=int, default=53)
    solve.add_argument("--raw", action="store_true", help="also write the unfiltered spectrum")
    solve.add_argument("--emit-plotdata", action="store_true")

    sweep = subparsers.add_parser("sweep", help="(N, P) convergence sweep")
    _add_flow_args(sweep)
    sweep.add_argument("--method", choices=["d2", "d4"], default="d2")
    sweep.add_argument("--n-list", type=int_list, required=True)
    sweep.add_argument("--bits-list", type=int_list, required=True)
    sweep.add_argument("--ref-n", type=int, required=True)
    sweep.add_argument("--ref-bits", type=int, required=True)
    sweep.add_argument("--jobs", type=int, default=None, help="defaults to HYDROSPEC_JOBS")
    sweep.add_argument("--cache-dir", type=Path, default=None)
    sweep.add_argument("--emit-plotdata", action="store_true")

    compare = subparsers.add_parser("compare-d2d4", help="D2 against D4 at one precision")
    _add_flow_args(compare)
    compare.add_argument("--n-list", type=int_list, required=True)
    compare.add_argument("--bits", type=int, default=53)
    compare.add_argument("--ref", type=Path, required=True, help="reference spectrum JSON")

    return parser


def _flow_fields(args: argparse.Namespace) -> dict[str, Any]:
    return {"flow": args.flow, "re": args.re, "a": args.a, "out": args.out}


def _dispatch(args: argparse.Namespace, settings: Any) -> int:
    qz = settings.qz.to_config()
    jobs = getattr(args, "jobs", None) or settings.sweep.jobs

    if args.command == "godunov":
        run = GodunovRun(
            s=args.s, bits=args.bits, out=args.out, jobs=jobs, emit_plotdata=args.emit_plotdata
        )
        return cmd_godunov(run, qz)
    if args.command == "solve":
        return cmd_solve(
            SolveRun(
                **_flow_fields(args),
                method=args.method,
                N=args.n,
                bits=args.bits,
                raw=args.raw,
                emit_plotdata=args.emit_plotdata,
            ),
            qz,
        )
    if args.command == "sweep":
        return cmd_sweep(
            SweepRun(
                **_flow_fields(args),
                method=args.method,
                Ns=args.n_list,
                Ps=args.bits_list,
                ref_n=args.ref_n,
                ref_bits=args.ref_bits,
                jobs=jobs,
                cache_dir=args.cache_dir or settings.sweep.cache_dir,
                emit_plotdata=args.emit_plotdata,
            ),
            qz,
        )
    return cmd_compare_d2d4(
        CompareRun(**_flow_fields(args), Ns=args.n_list, bits=args.bits, ref=args.ref), qz
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Main CLI entry point (hydrospec command)."""
    from src.config import get_settings
    from src.errors import (
        ConfigurationError,
        ConvergenceError,
        ReferenceMissingError,
        SingularPencilError,
    )
    from src.log_config import configure_logging

    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    configure_logging(args.log_level or settings.logging.level, settings.logging.json_output)

    if args.command is None:
        parser.print_help()
        return EXIT_USAGE

    try:
        return _dispatch(args, settings)
    except (ValidationError, ConfigurationError, ReferenceMissingError) as exc:
        logger.error("cli.invalid", command=args.command, error=str(exc))
        return EXIT_USAGE
    except (ConvergenceError, SingularPencilError) as exc:
        logger.error("cli.numerical_failure", command=args.command, error=str(exc))
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
