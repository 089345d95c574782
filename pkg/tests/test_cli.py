import hashlib
import json

import pytest

from zetalab.cli.commands import dispatch
from zetalab.services import bound_lab


def run_json(capsys, argv):
    code = dispatch(argv)
    return code, json.loads(capsys.readouterr().out)


class TestExitCodes:
    def test_unknown_command(self, capsys):
        """Should exit 1 with usage on an unknown subcommand"""
        assert dispatch(["nosuch"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag(self):
        """Should exit 1 when a required flag is absent"""
        assert dispatch(["kernel"]) == 1

    def test_domain_error(self):
        """Should exit 1 for sigma <= 1 in the 3-4-1 scan"""
        assert dispatch(["scan", "341", "--sigma-min", "0.9"]) == 1

    def test_zeta_left_half_plane_needs_reflection(self):
        """Should exit 1 for sigma <= 0 without --reflect"""
        assert dispatch(["zeta", "--sigma", "-1"]) == 1

    def test_invalid_threads(self):
        """Should exit 1 for a non-positive thread count"""
        assert dispatch(["zeta", "--sigma", "2", "--threads", "0"]) == 1

    def test_check_failure_still_reports(self, capsys, monkeypatch):
        """Should exit 2 on a failed inequality and still emit the report"""
        monkeypatch.setattr(bound_lab, "NONVANISH_FLOOR", 10.0)
        code, payload = run_json(capsys, ["scan", "nonvanish", "--t-max", "20", "--n", "50"])
        assert code == 2
        assert payload["samples"] == 50

    def test_help(self):
        """Should exit 0 for --help"""
        assert dispatch(["--help"]) == 0


class TestZetaCommand:
    def test_basel(self, capsys):
        """Should print zeta(2) as JSON"""
        code, payload = run_json(capsys, ["zeta", "--sigma", "2"])
        assert code == 0
        assert payload["value"]["re"] == pytest.approx(1.6449340668482264, abs=1e-12)
        assert payload["value"]["im"] == 0.0
        assert payload["n_cutoff"] == 30

    def test_reflection(self, capsys):
        """Should give -1/12 at s = -1"""
        code, payload = run_json(capsys, ["zeta", "--sigma", "-1", "--reflect"])
        assert code == 0
        assert payload["value"]["re"] == pytest.approx(-1.0 / 12.0, abs=1e-12)

    def test_functional_check(self, capsys):
        """Should report a small functional-equation residual"""
        code, payload = run_json(capsys, ["zeta", "--sigma", "0.5", "--t", "5", "--check", "functional"])
        assert code == 0
        assert payload["residual"] <= 1e-9
        assert payload["s"] == {"sigma": 0.5, "t": 5.0}

    def test_csv_format(self, capsys):
        """Should flatten a result into one CSV row"""
        assert dispatch(["zeta", "--sigma", "2", "--format", "csv"]) == 0
        header = capsys.readouterr().out.splitlines()[0]
        assert {"value.re", "value.im", "err_bound", "n_cutoff"} <= set(header.split(","))


class TestReportCommands:
    def test_table_at_x(self, capsys):
        """Should print Chebyshev values at x"""
        code, payload = run_json(capsys, ["table", "--limit", "100", "--x", "10"])
        assert code == 0
        assert payload["pi"] == 4
        assert list(payload) == ["x", "psi", "theta", "psi1", "pi"]

    def test_table_emit_csv(self, capsys):
        """Should accept --emit as the format flag and dump one row per n"""
        assert dispatch(["table", "--limit", "10", "--emit", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,mangoldt,mobius,liouville,is_prime"
        assert len(lines) == 11
        assert lines[1].startswith("1,")

    def test_dirichlet_identity(self, capsys):
        """Should confirm Lambda = log * mu"""
        code, payload = run_json(capsys, ["dirichlet", "lambda-identity", "--limit", "1000"])
        assert code == 0
        assert payload["max_deviation"] <= 1e-9

    def test_kernel_keys(self, capsys):
        """Should report the quadrature error budget"""
        code, payload = run_json(capsys, ["kernel", "--u", "0.5", "--k", "2", "--T", "1000"])
        assert code == 0
        assert list(payload)[:4] == ["estimate", "truncation_tail_bound", "discretization_estimate", "evaluations"]
        assert payload["deviation"] <= 1e-4

    def test_direct_reconstruction(self, capsys):
        """Should reconstruct psi1(10)/100 on Re s = 2"""
        code, payload = run_json(capsys, ["reconstruct", "--x", "10", "--c", "2", "--T", "500", "--direct"])
        assert code == 0
        assert payload["reference"] == pytest.approx(0.3376, abs=1e-3)

    def test_scan_keys(self, capsys):
        """Should report grid, extremum and its location"""
        code, payload = run_json(capsys, ["scan", "341", "--n-sigma", "4", "--n-t", "4"])
        assert code == 0
        assert list(payload) == ["grid", "extremum", "arg_extremum", "empirical_constant", "samples"]
        assert payload["extremum"] >= 1.0

    def test_pole_scan_is_csv(self, capsys):
        """Should default tabular reports to CSV"""
        assert dispatch(["scan", "pole", "--k-max", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "sigma,residue_product"
        assert len(lines) == 7


class TestOutputFiles:
    def test_pnt_table_file_and_manifest(self, tmp_path):
        """Should write the CSV and a manifest holding its checksum"""
        target = tmp_path / "pnt.csv"
        assert dispatch(["pnt-table", "--limits", "1e3,1e4", "--output", str(target)]) == 0
        lines = target.read_text().splitlines()
        assert lines[0] == "x,psi_over_x,psi1_ratio,theta_ratio"
        assert len(lines) == 3

        manifest = json.loads((tmp_path / "pnt.csv.manifest.json").read_text())
        assert manifest["checksums"]["pnt.csv"] == hashlib.sha256(target.read_bytes()).hexdigest()
        assert manifest["command_line"].startswith("zetalab pnt-table")
        assert "numpy" in manifest["versions"]

    def test_reruns_are_identical(self, tmp_path):
        """Should produce byte-identical reports for the same command"""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for target in (first, second):
            assert dispatch(["scan", "341", "--n-sigma", "5", "--n-t", "5", "--output", str(target)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_config_file(self, tmp_path, capsys):
        """Should read settings from a key=value file"""
        config = tmp_path / "run.env"
        config.write_text("ZETALAB_OUTPUT_FORMAT=csv\n")
        assert dispatch(["zeta", "--sigma", "2", "--config", str(config)]) == 0
        assert "value.re" in capsys.readouterr().out.splitlines()[0].split(",")

    def test_invalid_config_file(self, tmp_path):
        """Should exit 1 for an invalid value in the config file"""
        config = tmp_path / "run.env"
        config.write_text("SIEVE_LIMIT=abc\n")
        assert dispatch(["zeta", "--sigma", "2", "--config", str(config)]) == 1
