"""Tests for the hydrospec command line."""

import argparse
import csv
import json
from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.analysis import SpectrumMeta, SpectrumSet, SpectrumStore, cache_key
from src.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, FlowRun, build_parser, int_list, main
from src.config import get_settings
from src.precision import get_context


class TestParser:
    def test_int_list(self):
        assert int_list("53,113, 256") == [53, 113, 256]
        assert int_list("8,") == [8]

    def test_int_list_rejects_garbage(self):
        with pytest.raises(argparse.ArgumentTypeError, match="comma-separated"):
            int_list("53,abc")

    def test_invalid_s_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["godunov", "--s", "0"])
        assert excinfo.value.code == EXIT_USAGE

    def test_negative_s_parses(self):
        args = build_parser().parse_args(["godunov", "--s", "-1", "--bits", "53,113"])
        assert args.s == -1
        assert args.bits == [53, 113]

    def test_flow_defaults(self):
        args = build_parser().parse_args(["solve", "--re", "1e4", "--n", "10"])
        assert args.flow == "poiseuille"
        assert args.a == "1"
        assert args.method == "d2"
        assert args.bits == 53

    def test_no_command(self, capsys):
        assert main([]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().out

    def test_default_wavenumber_noted(self, tmp_path):
        assert FlowRun(re="1e4", out=tmp_path).notes == ["a=1 (default wavenumber)"]
        assert FlowRun(re="1e4", a="0.5", out=tmp_path).notes == []

    @pytest.mark.parametrize("a", ["1.0", "1e0", "2/2"])
    def test_default_wavenumber_spelled_differently(self, a, tmp_path):
        assert FlowRun(re="1e4", a=a, out=tmp_path).notes == ["a=1 (default wavenumber)"]

    def test_malformed_wavenumber(self, tmp_path):
        with pytest.raises(ValidationError):
            FlowRun(re="1e4", a="one", out=tmp_path)


class TestValidation:
    def test_truncation_too_small(self, tmp_path):
        assert main(["solve", "--re", "1000", "--n", "3", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_missing_reference(self, tmp_path):
        argv = "compare-d2d4 --re 1000 --n-list 6".split()
        argv += ["--ref", str(tmp_path / "missing.json"), "--out", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_reference_below_grid(self, tmp_path):
        argv = "sweep --re 1000 --n-list 8,16 --bits-list 53 --ref-n 8 --ref-bits 53".split()
        argv += ["--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_malformed_reynolds_number(self, tmp_path):
        assert main(["solve", "--re", "lots", "--n", "6", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_reference_for_another_problem(self, tmp_path):
        assert main("solve --re 1000 --n 6 --out".split() + [str(tmp_path)]) == EXIT_OK
        ref = tmp_path / "spectrum_poiseuille_d2_N6_P53.json"
        mismatches = [
            ["--re", "2000"],
            ["--re", "1000", "--a", "0.5"],
            ["--flow", "couette", "--re", "1000"],
        ]
        for mismatch in mismatches:
            argv = ["compare-d2d4", *mismatch, "--n-list", "6", "--ref", str(ref)]
            assert main([*argv, "--out", str(tmp_path)]) == EXIT_USAGE
        assert not list(tmp_path.glob("compare_*.csv"))

    def test_qz_budget_exhaustion(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HYDROSPEC_QZ_MAX_SWEEPS", "1")
        argv = ["godunov", "--s", "-1", "--bits", "53", "--out", str(tmp_path)]
        assert main(argv) == EXIT_NUMERICAL


class TestCommands:
    def test_godunov_writes_outputs(self, tmp_path):
        argv = ["godunov", "--s", "-1", "--bits", "53,113", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        for bits in (53, 113):
            payload = json.loads((tmp_path / f"spectrum_godunov_N7_P{bits}_s-1.json").read_text())
            assert len(payload["eigenvalues"]) == 7
        with (tmp_path / "godunov_s-1_convergence.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["P"] for r in rows] == ["53", "113"]

    def test_solve_writes_filtered_and_raw(self, tmp_path):
        argv = "solve --re 1000 --n 6 --raw --emit-plotdata".split()
        argv += ["--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        filtered = json.loads((tmp_path / "spectrum_poiseuille_d2_N6_P53.json").read_text())
        raw = json.loads((tmp_path / "spectrum_poiseuille_d2_N6_P53_raw.json").read_text())
        assert filtered["meta"]["notes"] == ["a=1 (default wavenumber)"]
        assert len(filtered["eigenvalues"]) <= len(raw["eigenvalues"])
        assert (tmp_path / "spectrum_poiseuille_d2_N6_P53.scatter.csv").is_file()

    def test_sweep_populates_cache(self, tmp_path):
        cache = tmp_path / "cache"
        argv = "sweep --re 1000 --n-list 6 --bits-list 53 --ref-n 8 --ref-bits 64".split()
        argv += ["--cache-dir", str(cache), "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        assert (tmp_path / "sweep_poiseuille_d2_Re1000_convergence.csv").is_file()
        assert len(list(cache.glob("*.json"))) == 2

    def test_godunov_writes_lapack_baseline(self, tmp_path):
        argv = ["godunov", "--s", "1", "--bits", "53,113", "--emit-plotdata"]
        argv += ["--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        baseline = json.loads((tmp_path / "spectrum_godunov_N7_P53_s+1_lapack.json").read_text())
        assert len(baseline["eigenvalues"]) == 7
        assert "numpy.linalg.eigvals" in baseline["meta"]["notes"]
        with (tmp_path / "godunov_s+1_solvers.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        solvers = [(r["solver"], r["P"]) for r in rows]
        assert solvers == [("qz", "53"), ("qz", "113"), ("lapack", "53")]

    def test_warm_cache_rerun_is_byte_identical(self, tmp_path):
        argv = "sweep --re 1000 --n-list 6 --bits-list 24,53 --ref-n 8 --ref-bits 64".split()
        argv += ["--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path)]
        csv_path = tmp_path / "sweep_poiseuille_d2_Re1000_convergence.csv"
        assert main(argv) == EXIT_OK
        cold = csv_path.read_bytes()
        cached = sorted(p.name for p in (tmp_path / "cache").glob("*.json"))
        assert main(argv) == EXIT_OK
        assert csv_path.read_bytes() == cold
        assert sorted(p.name for p in (tmp_path / "cache").glob("*.json")) == cached

    def test_compare_d2d4(self, tmp_path):
        assert main("solve --re 1000 --n 10 --bits 64 --out".split() + [str(tmp_path)]) == EXIT_OK
        argv = "compare-d2d4 --re 1000 --n-list 8,6 --bits 53".split()
        argv += ["--ref", str(tmp_path / "spectrum_poiseuille_d2_N10_P64.json")]
        assert main([*argv, "--out", str(tmp_path)]) == EXIT_OK
        with (tmp_path / "compare_d2d4_poiseuille_P53.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["N"] for r in rows] == ["6", "8"]
        assert all(float(r["wall_d2"]) >= 0 and float(r["wall_d4"]) >= 0 for r in rows)


def seed_store(cache, qz):
    """Cache a reference and a 2×2 grid whose distances are known by construction."""
    store = SpectrumStore(cache)
    offsets = {
        (10, 64): Fraction(0),
        (6, 24): Fraction(1, 5),
        (6, 53): Fraction(1, 20),
        (8, 24): Fraction(1, 1000),
        (8, 53): Fraction(1, 10**10),
    }
    for (N, P), offset in offsets.items():
        ctx = get_context(P)
        meta = SpectrumMeta(flow="poiseuille", re="1000", a="1", method="d2", N=N, P=P, qz=qz)
        spectrum = SpectrumSet([ctx.complex(Fraction(1, 2) + offset, Fraction(-1, 2))], meta)
        store.save(spectrum, cache_key("poiseuille", "1000", "1", "d2", N, P, qz))


class TestThresholds:
    def test_sweep_reports_smallest_resolution_per_level(self, tmp_path):
        cache = tmp_path / "cache"
        seed_store(cache, get_settings().qz.to_config().model_dump())
        argv = "sweep --re 1000 --n-list 6,8 --bits-list 24,53 --ref-n 10 --ref-bits 64".split()
        argv += ["--cache-dir", str(cache), "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        lines = (tmp_path / "sweep_poiseuille_d2_Re1000_thresholds.csv").read_text().splitlines()
        assert lines == [
            "level,N,P",
            "10%,6,53",
            "single,8,53",
            "double,none,none",
            "extended,none,none",
        ]
