"""CSV series behind the convergence and spectrum figures.

Nothing here plots; each writer emits one tidy CSV per figure family so any
plotting tool can pick it up.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

from src.analysis.models import ConvergenceRecord, SpectrumSet
from src.precision import MPReal, machine_epsilon, to_decimal


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _distance(record: ConvergenceRecord) -> str:
    return "nan" if record.d_H is None else to_decimal(record.d_H)


def write_eps_vs_distance(records: Iterable[ConvergenceRecord], path: Path) -> Path:
    """eps_P against d_H (precision convergence at fixed N)."""
    rows = [
        [str(r.P), to_decimal(r.eps_P), _distance(r)]
        for r in sorted(records, key=lambda r: r.P)
    ]
    return _write(path, ["P", "eps_P", "d_H"], rows)


def write_distance_by_n(records: Iterable[ConvergenceRecord], path: Path) -> Path:
    """One d_H-vs-N series per P."""
    rows = [
        [str(r.P), str(r.N), _distance(r)]
        for r in sorted(records, key=lambda r: (r.P, r.N))
    ]
    return _write(path, ["P", "N", "d_H"], rows)


def write_distance_by_p(records: Iterable[ConvergenceRecord], path: Path) -> Path:
    """One d_H-vs-P series per N."""
    rows = [
        [str(r.N), str(r.P), to_decimal(r.eps_P), _distance(r)]
        for r in sorted(records, key=lambda r: (r.N, r.P))
    ]
    return _write(path, ["N", "P", "eps_P", "d_H"], rows)


def write_solver_distances(rows: Iterable[tuple[str, int, MPReal]], path: Path) -> Path:
    """d_H per solver and precision, e.g. the LAPACK double baseline next to the QZ runs."""
    body = [
        [solver, str(P), to_decimal(machine_epsilon(P)), to_decimal(d_H)]
        for solver, P, d_H in rows
    ]
    return _write(path, ["solver", "P", "eps_P", "d_H"], body)


def write_spectrum_scatter(spectrum: SpectrumSet, path: Path) -> Path:
    rows = [[to_decimal(z.real), to_decimal(z.imag)] for z in spectrum.eigenvalues]
    return _write(path, ["re", "im"], rows)


def emit_sweep_plotdata(
    records: Sequence[ConvergenceRecord], out_dir: Path, stem: str
) -> list[Path]:
    """Write the by-N and by-P series of a sweep next to its convergence file."""
    return [
        write_distance_by_n(records, out_dir / f"{stem}_by_N.csv"),
        write_distance_by_p(records, out_dir / f"{stem}_by_P.csv"),
    ]
