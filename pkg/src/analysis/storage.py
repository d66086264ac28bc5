"""Spectrum and convergence files, and the content-addressed spectrum cache.

Spectrum file (JSON)::

    {"meta": {"flow": ..., "re": ..., "a": ..., "method": ..., "N": ..., "P": ...,
              "infinite_count": ..., "wall_time_s": ..., "qz": {...}},
     "eigenvalues": [{"re": "<decimal>", "im": "<decimal>"}, ...]}

Convergence file (CSV): header ``N,P,eps_P,d_H``. All numbers are round-trip
decimal strings; flagged rows carry ``nan`` for ``d_H``.
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import structlog

from src.analysis.models import ConvergenceRecord, SpectrumMeta, SpectrumSet
from src.errors import ReferenceMissingError
from src.precision import from_decimal, get_context, to_decimal

logger = structlog.get_logger(__name__)

CONVERGENCE_HEADER = ["N", "P", "eps_P", "d_H"]


# ── Spectrum payloads ──────────────────────────────────────────────────


def spectrum_to_payload(spectrum: SpectrumSet) -> dict[str, Any]:
    """JSON-ready form of a spectrum (also what worker processes send back)."""
    return {
        "meta": spectrum.meta.model_dump(mode="json"),
        "eigenvalues": [
            {"re": to_decimal(z.real), "im": to_decimal(z.imag)} for z in spectrum.eigenvalues
        ],
    }


def spectrum_from_payload(payload: dict[str, Any]) -> SpectrumSet:
    """Rebuild a spectrum at the precision recorded in its metadata."""
    meta = SpectrumMeta.model_validate(payload["meta"])
    ctx = get_context(meta.P)
    values = [
        ctx.mp.mpc(from_decimal(item["re"], ctx), from_decimal(item["im"], ctx))
        for item in payload["eigenvalues"]
    ]
    return SpectrumSet(values, meta)


def write_spectrum_json(spectrum: SpectrumSet, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(spectrum_to_payload(spectrum), indent=2) + "\n")
    return path


def read_spectrum_json(path: Path) -> SpectrumSet:
    """Load a spectrum file.

    Raises:
        ReferenceMissingError: The file does not exist.
    """
    if not path.is_file():
        raise ReferenceMissingError(f"spectrum file not found: {path}")
    return spectrum_from_payload(json.loads(path.read_text()))


def spectrum_filename(meta: SpectrumMeta, suffix: str = "") -> str:
    parts = [meta.flow]
    if meta.method:
        parts.append(meta.method)
    parts += [f"N{meta.N}", f"P{meta.P}"]
    return "spectrum_" + "_".join(parts) + suffix + ".json"


# ── Convergence rows ───────────────────────────────────────────────────


def convergence_row(record: ConvergenceRecord) -> list[str]:
    d_h = "nan" if record.d_H is None else to_decimal(record.d_H)
    return [str(record.N), str(record.P), to_decimal(record.eps_P), d_h]


def write_convergence_csv(records: Iterable[ConvergenceRecord], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CONVERGENCE_HEADER)
        for record in sorted(records, key=lambda r: r.key):
            writer.writerow(convergence_row(record))
    return path


def read_convergence_csv(path: Path) -> list[dict[str, str]]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


# ── Cache ──────────────────────────────────────────────────────────────


def cache_key(
    flow: str,
    re: str | None,
    a: str | None,
    method: str | None,
    N: int,
    P: int,
    qz: Mapping[str, Any] | None = None,
) -> str:
    """Content hash of the parameters that determine a spectrum, QZ settings included."""
    canonical = json.dumps(
        [flow, re, a, method, N, P, dict(qz) if qz else None],
        separators=(",", ":"),
        sort_keys=True,
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


class SpectrumStore:
    """Directory of spectrum files keyed by :func:`cache_key`.

    Only the process that owns the store writes to it.
    """

    def __init__(self, root: Path) -> None:
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def key_of(self, meta: SpectrumMeta) -> str:
        return cache_key(*meta.identity(), qz=meta.qz)

    def load(self, key: str) -> SpectrumSet | None:
        path = self.path_for(key)
        if not path.is_file():
            return None
        logger.debug("cache.hit", key=key[:12])
        return read_spectrum_json(path)

    def require(self, key: str) -> SpectrumSet:
        spectrum = self.load(key)
        if spectrum is None:
            raise ReferenceMissingError(f"no cached spectrum for key {key[:12]} in {self.root}")
        return spectrum

    def save(self, spectrum: SpectrumSet, key: str | None = None) -> Path:
        key = key or self.key_of(spectrum.meta)
        path = write_spectrum_json(spectrum, self.path_for(key))
        logger.debug("cache.store", key=key[:12], N=spectrum.meta.N, P=spectrum.meta.P)
        return path

    def __contains__(self, key: str) -> bool:
        return self.path_for(key).is_file()


# ── Method comparison ──────────────────────────────────────────────────

COMPARISON_HEADER = ["N", "d_H_d2", "d_H_d4", "wall_d2", "wall_d4"]


def write_comparison_csv(
    rows: Iterable[tuple[int, str, str, float, float]], path: Path
) -> Path:
    """D2 against D4 at one precision, one row per N."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for n, d2, d4, wall_d2, wall_d4 in sorted(rows):
            writer.writerow([str(n), d2, d4, f"{wall_d2:.6f}", f"{wall_d4:.6f}"])
    return path


# ── Resolution thresholds ──────────────────────────────────────────────

THRESHOLD_HEADER = ["level", "N", "P"]


def write_threshold_csv(
    thresholds: Mapping[str, tuple[int, int] | None], path: Path
) -> Path:
    """Smallest (N, P) per accuracy level; ``none`` when the grid never reaches it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(THRESHOLD_HEADER)
        for level, found in thresholds.items():
            writer.writerow([level, *(map(str, found) if found else ("none", "none"))])
    return path
