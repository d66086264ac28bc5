#!/usr/bin/env python3
"""Nightly reproduction of the required-resolution table for Poiseuille flow.

For each Reynolds number, sweeps (N, P) against an (N_max, P_max) reference
and reports the smallest (N, P) reaching each accuracy level next to the
expected values. Hours to days of compute per Reynolds number; spectra are
cached, so an interrupted run picks up where it stopped.

Usage:
    python scripts/resolution_harness.py [--re 1e5] [--jobs 8] [--out out/resolution]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis import (
    SpectrumStore,
    resolution_thresholds,
    sweep,
    write_convergence_csv,
    write_threshold_csv,
)
from src.chebtau import OSParams
from src.config import get_settings
from src.log_config import configure_logging

P_MAX = 832

# Reynolds number -> accuracy level -> (N, P)
EXPECTED: dict[str, dict[str, tuple[int, int]]] = {
    "1e5": {"10%": (400, 90), "single": (400, 127), "double": (500, 146), "extended": (500, 220)},
    "2e5": {"10%": (500, 109), "single": (600, 164), "double": (600, 201), "extended": (700, 257)},
    "5e5": {"10%": (800, 164), "single": (900, 239), "double": (900, 276), "extended": (1000, 331)},
}

N_MAX = {"1e5": 1100, "2e5": 1300, "5e5": 1500}

PRECISIONS = [53, 90, 109, 127, 146, 164, 201, 220, 239, 257, 276, 331, 400]


def run(re: str, jobs: int, out: Path, cache_dir: Path) -> bool:
    """Sweep one Reynolds number; True when every level matches the expected (N, P)."""
    n_top = max(n for n, _ in EXPECTED[re].values()) + 200
    records = sweep(
        "poiseuille",
        OSParams(re=re, a=1),
        "d2",
        list(range(100, n_top + 1, 100)),
        PRECISIONS,
        N_MAX[re],
        P_MAX,
        jobs=jobs,
        store=SpectrumStore(cache_dir),
        notes=["a=1 (default wavenumber)"],
    )
    write_convergence_csv(records, out / f"resolution_Re{re}_convergence.csv")
    thresholds = resolution_thresholds(records)
    write_threshold_csv(thresholds, out / f"resolution_Re{re}_thresholds.csv")

    ok = True
    print(f"Re = {re}")
    for level, found in thresholds.items():
        expected = EXPECTED[re][level]
        match = found == expected
        ok = ok and match
        print(f"  {level:>9}: found {found}  expected {expected}  {'ok' if match else 'MISMATCH'}")
    return ok


def main() -> None:
    parser = argparse.ArgumentParser(description="Required (N, P) table reproduction")
    parser.add_argument("--re", choices=sorted(EXPECTED), action="append")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--out", type=Path, default=Path("out/resolution"))
    args = parser.parse_args()

    settings = get_settings()
    configure_logging(settings.logging.level, settings.logging.json_output)
    jobs = args.jobs or settings.sweep.jobs

    results = [run(re, jobs, args.out, settings.sweep.cache_dir) for re in args.re or EXPECTED]
    sys.exit(0 if all(results) else 1)


if __name__ == "__main__":
    main()
