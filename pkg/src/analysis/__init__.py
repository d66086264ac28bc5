"""Spectrum post-processing: region filtering, Hausdorff distances and sweeps."""

from src.analysis.convergence import (
    ACCURACY_LEVELS,
    fit_rate,
    fit_records,
    minimal_resolution,
    records_from_store,
    resolution_thresholds,
    solve_spectrum,
    sweep,
)
from src.analysis.distance import filter_region, hausdorff
from src.analysis.models import ConvergenceRecord, Region, SpectrumMeta, SpectrumSet
from src.analysis.storage import (
    SpectrumStore,
    cache_key,
    read_spectrum_json,
    write_comparison_csv,
    write_convergence_csv,
    write_spectrum_json,
    write_threshold_csv,
)

__all__ = [
    "filter_region",
    "hausdorff",
    "ConvergenceRecord",
    "Region",
    "SpectrumMeta",
    "SpectrumSet",
    "SpectrumStore",
    "cache_key",
    "read_spectrum_json",
    "write_comparison_csv",
    "write_convergence_csv",
    "write_spectrum_json",
    "write_threshold_csv",
    "ACCURACY_LEVELS",
    "fit_rate",
    "fit_records",
    "minimal_resolution",
    "records_from_store",
    "resolution_thresholds",
    "solve_spectrum",
    "sweep",
]
