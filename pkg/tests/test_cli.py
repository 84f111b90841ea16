"""Command-line surface: record shapes, exit codes, determinism, and the
CSV/JSON output contracts."""

import csv
import io
import json
import math

import pytest

from gkp_repeater import cli
from gkp_repeater.hrm import HrmPolicy
from gkp_repeater.noise_core import SqueezingSpec
from gkp_repeater.protocols import ProtocolSpec, Variant, secure_key_rate

SQRT_PI = math.sqrt(math.pi)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def parse_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


class TestDeltaParsing:
    def test_plain_number(self):
        assert cli.parse_delta("0.25") == 0.25

    def test_fraction_of_sqrt_pi(self):
        assert cli.parse_delta("sqrt_pi/10") == pytest.approx(SQRT_PI / 10, rel=1e-15)
        assert cli.parse_delta("3*sqrt_pi/14") == pytest.approx(
            3 * SQRT_PI / 14, rel=1e-15
        )
        assert cli.parse_delta("sqrt_pi") == pytest.approx(SQRT_PI, rel=1e-15)

    def test_rejects_garbage(self):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_delta("two*sqrt_pi")


class TestRate:
    def test_record_fields(self, capsys):
        code, out = run_cli(
            capsys,
            "rate", "--protocol", "two-way-cc", "--nqr", "10", "--l0", "50",
            "--squeezing-db", "15", "--delta", "0", "--format", "json",
        )
        assert code == 0
        record = json.loads(out)
        assert list(record) == [
            "protocol", "L_AB", "eta_segment", "E_segment", "E_AB",
            "P_suc", "R", "PLOB",
        ]
        assert record["protocol"] == "two-way-cc"
        assert record["L_AB"] == 550.0
        assert record["R"] >= 0.0
        assert record["PLOB"] > 0.0

    def test_single_hop_has_no_chain_error(self, capsys):
        code, out = run_cli(
            capsys,
            "rate", "--protocol", "one-way-pre", "--nqr", "0", "--l0", "22",
            "--squeezing-db", "15", "--delta", "0", "--format", "json",
        )
        assert code == 0
        record = json.loads(out)
        assert record["E_AB"] == 0.0
        assert record["P_suc"] == 1.0

    def test_missing_protocol_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["rate", "--nqr", "1", "--l0", "10"])
        assert excinfo.value.code == 2
        assert "--protocol" in capsys.readouterr().err

    def test_domain_error_exits_1(self, capsys):
        code = cli.main(
            ["rate", "--protocol", "two-way-cc", "--nqr", "1", "--l0", "10",
             "--delta", "sqrt_pi"]
        )
        assert code == 1
        assert "delta" in capsys.readouterr().err

    def test_inconsistent_geometry_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(
                ["rate", "--protocol", "two-way-cc", "--nqr", "9", "--l0", "50",
                 "--distance", "400"]
            )
        assert excinfo.value.code == 2

    def test_consistent_geometry_accepted(self, capsys):
        code, out = run_cli(
            capsys,
            "rate", "--protocol", "two-way-cc", "--nqr", "9", "--l0", "50",
            "--distance", "500", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["L_AB"] == 500.0

    def test_distance_derives_segment_length(self, capsys):
        code, out = run_cli(
            capsys,
            "rate", "--protocol", "two-way-cc", "--nqr", "9", "--distance", "500",
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["eta_segment"] == pytest.approx(
            math.exp(-50 / 22), rel=1e-12
        )


class TestSweep:
    def test_csv_contract_and_round_trip(self, capsys):
        code, out = run_cli(
            capsys,
            "sweep", "--protocols", "two-way-cc,one-way-post",
            "--nqr-list", "1,10", "--delta-list", "0,sqrt_pi/10",
            "--distance-list", "100,50", "--squeezing-db", "15",
        )
        assert code == 0
        header = out.splitlines()[0]
        assert header == (
            "protocol,n_qr,l0_km,L_AB_km,delta,squeezing_db,eta,"
            "E_segment,E_AB,P_suc,R,PLOB,error"
        )
        rows = parse_csv(out)
        assert len(rows) == 2 * 2 * 2 * 2
        keys = [
            (r["protocol"], int(r["n_qr"]), float(r["delta"]), float(r["L_AB_km"]))
            for r in rows
        ]
        assert keys == sorted(keys)
        for row in rows:
            spec = ProtocolSpec(
                variant=Variant.from_label(row["protocol"]),
                n_qr=int(row["n_qr"]),
                l0_km=float(row["l0_km"]),
                squeezing=SqueezingSpec.from_db(float(row["squeezing_db"])),
                hrm=HrmPolicy(float(row["delta"])),
            )
            point = secure_key_rate(spec)
            assert float(row["R"]) == pytest.approx(point.rate, abs=1e-12)
            assert float(row["PLOB"]) == pytest.approx(point.plob, abs=1e-12)

    def test_json_matches_csv(self, capsys):
        argv = [
            "sweep", "--protocols", "two-way-cc", "--nqr-list", "2",
            "--delta-list", "0", "--l0-list", "10,20",
        ]
        code, csv_out = run_cli(capsys, *argv)
        assert code == 0
        code, json_out = run_cli(capsys, *argv, "--format", "json")
        assert code == 0
        csv_rows = parse_csv(csv_out)
        json_rows = json.loads(json_out)
        assert len(csv_rows) == len(json_rows)
        for c, j in zip(csv_rows, json_rows):
            for key in ("E_segment", "E_AB", "P_suc", "R", "PLOB", "eta"):
                assert float(c[key]) == j[key]

    def test_empty_distance_grid_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(
                ["sweep", "--protocols", "two-way-cc", "--nqr-list", "1",
                 "--delta-list", "0", "--distance-list", ""]
            )
        assert excinfo.value.code == 2

    def test_unknown_protocol_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(
                ["sweep", "--protocols", "carrier-pigeon", "--nqr-list", "1",
                 "--delta-list", "0", "--l0-list", "10"]
            )
        assert excinfo.value.code == 2

    def test_amp_variance_columns(self, capsys):
        code, out = run_cli(
            capsys, "sweep", "--quantity", "amp-variance", "--eta-points", "1000"
        )
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1000
        for row in rows:
            eta = float(row["eta"])
            assert float(row["post_variance"]) == pytest.approx(
                (1 - eta) / eta, abs=1e-12
            )
            assert float(row["pre_variance"]) == pytest.approx(1 - eta, abs=1e-12)
            assert float(row["cc_pair_variance"]) == pytest.approx(
                (1 - eta) / (2 * eta), abs=1e-12
            )

    def test_tree_protocol_rows(self, capsys):
        code, out = run_cli(
            capsys,
            "sweep", "--protocols", "tree-path-selection", "--nqr-list", "99",
            "--delta-list", "0", "--distance-list", "300",
            "--trials", "20000", "--seed", "3",
        )
        assert code == 0
        (row,) = parse_csv(out)
        assert row["error"] == ""
        assert float(row["P_suc"]) == 1.0
        assert 0.0 <= float(row["E_AB"]) <= 0.5

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "sweep.cfg"
        config.write_text(
            "# minimal sweep\n"
            "protocols = two-way-cc\n"
            "nqr = 1\n"
            "delta = 0, sqrt_pi/10\n"
            "l0_km = 10\n"
            "squeezing_db = 15\n"
        )
        code, out = run_cli(capsys, "sweep", "--config", str(config))
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 2

    def test_missing_config_file_exits_2(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["sweep", "--config", str(tmp_path / "absent.cfg")])
        assert excinfo.value.code == 2

    def test_partial_failure_rows(self, capsys):
        # delta beyond the cutoff is a per-row domain error, recorded in the
        # error column; healthy rows keep the run's exit code at 0.
        code, out = run_cli(
            capsys,
            "sweep", "--protocols", "two-way-cc", "--nqr-list", "1",
            "--delta-list", "0,0.95", "--l0-list", "10",
        )
        assert code == 0
        rows = parse_csv(out)
        bad = [r for r in rows if r["error"]]
        assert len(bad) == 1
        assert bad[0]["R"] == ""


class TestMcValidate:
    def test_zero_trials_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["mc-validate", "--trials", "0", "--seed", "1"])
        assert excinfo.value.code == 2

    def test_hrm_scope_passes(self, capsys):
        code, out = run_cli(
            capsys, "mc-validate", "--trials", "100000", "--seed", "7",
            "--scope", "hrm",
        )
        assert code == 0
        assert "RESULT: PASS" in out

    def test_fixed_seed_is_byte_identical(self, capsys):
        argv = ["mc-validate", "--trials", "50000", "--seed", "11", "--scope", "hrm"]
        _, first = run_cli(capsys, *argv)
        _, second = run_cli(capsys, *argv)
        assert first == second


class TestResources:
    def test_path_selection_totals(self, capsys):
        code, out = run_cli(
            capsys,
            "resources", "--mode", "path-selection", "--nqr", "999", "--l0", "3",
            "--trials", "20000", "--format", "json",
        )
        assert code == 0
        record = json.loads(out)
        assert record["total_qubits"] == 130_000
        assert record["n_stations"] == 1000
        assert record["photonic_baseline_qubits_5000km"] == 4.0e7
        assert record["photonic_baseline_qubits_1000km"] == 4.1e6
        assert "E_AB" in record

    def test_single_station(self, capsys):
        code, out = run_cli(
            capsys,
            "resources", "--mode", "path-selection", "--nqr", "0", "--l0", "3",
            "--trials", "20000", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["total_qubits"] == 130

    def test_postselected_mode_costs_more(self, capsys):
        argv = ["resources", "--nqr", "50", "--l0", "3", "--delta", "sqrt_pi/6",
                "--trials", "20000", "--format", "json"]
        _, hrm_out = run_cli(capsys, *argv, "--mode", "hrm")
        _, path_out = run_cli(capsys, *argv, "--mode", "path-selection")
        assert (
            json.loads(hrm_out)["total_qubits"]
            > json.loads(path_out)["total_qubits"]
        )


class TestPlob:
    def test_reference_value(self, capsys):
        code, out = run_cli(capsys, "plob", "--distance-list", "100")
        assert code == 0
        (row,) = parse_csv(out)
        assert float(row["PLOB"]) == pytest.approx(0.015396573030100614, abs=1e-9)


class TestOutputHandling:
    def test_output_file_and_outdir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("GKP_REPEATER_OUTDIR", str(tmp_path))
        code = cli.main(
            ["plob", "--distance-list", "100,200", "--output", "bounds.csv"]
        )
        assert code == 0
        written = (tmp_path / "bounds.csv").read_text()
        assert written.startswith("L_AB_km,PLOB")

    def test_absolute_output_ignores_outdir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GKP_REPEATER_OUTDIR", str(tmp_path / "elsewhere"))
        target = tmp_path / "direct.csv"
        code = cli.main(["plob", "--distance-list", "50", "--output", str(target)])
        assert code == 0
        assert target.exists()

    def test_unwritable_output_exits_1(self, capsys, tmp_path):
        target = tmp_path / "no" / "such" / "dir" / "out.csv"
        code = cli.main(["plob", "--distance-list", "50", "--output", str(target)])
        assert code == 1
        assert "error:" in capsys.readouterr().err
