import json
import os

import pytest

from contactsim.cli import main

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "demos", "configs")
CIRCLE_CONFIG = os.path.join(CONFIG_DIR, "circle.json")
ELLIPSE_CONFIG = os.path.join(CONFIG_DIR, "ellipse.json")


def short_circle_config(tmp_path, **overrides):
    with open(CIRCLE_CONFIG) as fh:
        cfg = json.load(fh)
    cfg["run"]["t_final"] = 5.0
    cfg["output"]["samples"] = 200
    for path, value in overrides.items():
        node = cfg
        parts = path.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestSimulate:
    def test_exit_zero_and_artifacts(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        assert os.path.exists(os.path.join(out, "trajectory.csv"))
        assert os.path.exists(os.path.join(out, "summary.json"))
        assert os.path.exists(os.path.join(out, "trajectory.svg"))
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["status"] == "Completed"
        assert summary["n_events"] >= 3
        assert all(c["passed"] for c in summary["checks"])

    def test_byte_identical_reruns(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out1 = str(tmp_path / "out1")
        out2 = str(tmp_path / "out2")
        assert main(["simulate", "--config", cfg, "--out", out1]) == 0
        assert main(["simulate", "--config", cfg, "--out", out2]) == 0
        for name in ("trajectory.csv", "summary.json", "trajectory.svg"):
            with open(os.path.join(out1, name), "rb") as fh:
                b1 = fh.read()
            with open(os.path.join(out2, name), "rb") as fh:
                b2 = fh.read()
            assert b1 == b2, name

    def test_no_svg_flag(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out, "--no-svg"]) == 0
        assert not os.path.exists(os.path.join(out, "trajectory.svg"))

    def test_samples_flag(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out,
                     "--samples", "50"]) == 0
        with open(os.path.join(out, "trajectory.csv")) as fh:
            rows = fh.read().strip().splitlines()
        # 50 flow samples plus two rows per event
        with open(os.path.join(out, "summary.json")) as fh:
            n_events = json.load(fh)["n_events"]
        assert len(rows) == 1 + 50 + 2 * n_events

    def test_hamiltonian_formulation(self, tmp_path):
        cfg = short_circle_config(tmp_path, **{"run.formulation": "hamiltonian"})
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        with open(os.path.join(out, "summary.json")) as fh:
            assert json.load(fh)["formulation"] == "hamiltonian"

    def test_formulation_override_flag(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out,
                     "--formulation", "hamiltonian"]) == 0
        with open(os.path.join(out, "summary.json")) as fh:
            assert json.load(fh)["formulation"] == "hamiltonian"

    def test_malformed_geometry_exits_one(self, tmp_path, capsys):
        cfg = short_circle_config(tmp_path)
        with open(cfg) as fh:
            data = json.load(fh)
        data["system"] = {"kind": "ellipse", "a": -0.5, "b": 1.0, "gamma": 0.0}
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        assert main(["simulate", "--config", str(bad), "--out",
                     str(tmp_path / "o")]) == 1
        assert "system.a" in capsys.readouterr().err

    def test_json_parse_error_names_location(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"system": {kind: "circle"}}')
        assert main(["simulate", "--config", str(bad), "--out",
                     str(tmp_path / "o")]) == 1
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_exterior_initial_state_rejected(self, tmp_path, capsys):
        cfg = short_circle_config(tmp_path, **{"initial.q": [2.0, 0.0]})
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
        assert "interior" in capsys.readouterr().err


class TestImpactTest:
    def test_circle_oracle_agreement(self, capsys):
        assert main(["impact-test", "circle", "--point", "1", "0",
                     "--velocity", "1", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "solver post-impact" in out and "closed-form oracle" in out
        assert "(-1, 0.5)" in out
        diff_line = [ln for ln in out.splitlines() if "max difference" in ln][0]
        assert float(diff_line.split()[-1]) < 1e-12

    def test_ellipse_vertex(self, capsys):
        assert main(["impact-test", "ellipse", "--a", "0.9", "--b", "1.1",
                     "--point", "0.9", "0", "--velocity", "1", "0.7"]) == 0
        out = capsys.readouterr().out
        line = [ln for ln in out.splitlines() if "solver post-impact" in ln][0]
        vx, vy = line.split("(")[1].rstrip(")").split(",")
        assert float(vx) == pytest.approx(-1.0, abs=1e-12)
        assert float(vy) == pytest.approx(0.7, abs=1e-12)

    def test_grazing_exits_two(self, capsys):
        assert main(["impact-test", "circle", "--point", "1", "0",
                     "--velocity", "0", "1"]) == 2
        assert "grazing" in capsys.readouterr().out.lower()

    def test_off_boundary_exits_one(self, capsys):
        assert main(["impact-test", "circle", "--point", "0.5", "0",
                     "--velocity", "1", "0"]) == 1


class TestCheck:
    def _fresh_run(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        return cfg, os.path.join(out, "trajectory.csv")

    def test_round_trip_passes(self, tmp_path):
        cfg, csv_path = self._fresh_run(tmp_path)
        assert main(["check", "--csv", csv_path, "--config", cfg]) == 0

    def test_corrupted_energy_fails_with_row_index(self, tmp_path, capsys):
        cfg, csv_path = self._fresh_run(tmp_path)
        with open(csv_path) as fh:
            lines = fh.read().splitlines()
        parts = lines[40].split(",")
        parts[-3] = "9.9"   # energy column
        lines[40] = ",".join(parts)
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        capsys.readouterr()   # drain the simulate output
        assert main(["check", "--csv", str(bad), "--config", cfg]) == 2
        report = json.loads(capsys.readouterr().out)
        col = [c for c in report["checks"] if c["name"] == "column_consistency"][0]
        assert not col["passed"]
        assert col["location"] == 41.0   # 1-based file row of the corruption

    def test_empty_csv_exits_one(self, tmp_path, capsys):
        cfg = short_circle_config(tmp_path)
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert main(["check", "--csv", str(empty), "--config", cfg]) == 1

    def test_header_only_csv_exits_one(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        stub = tmp_path / "stub.csv"
        stub.write_text("t,q1,q2,v1,v2,z,E,ell,event_flag\n")
        assert main(["check", "--csv", str(stub), "--config", cfg]) == 1

    def test_report_written_to_file(self, tmp_path):
        cfg, csv_path = self._fresh_run(tmp_path)
        report_path = str(tmp_path / "report.json")
        assert main(["check", "--csv", csv_path, "--config", cfg,
                     "--out", report_path]) == 0
        with open(report_path) as fh:
            report = json.load(fh)
        assert all(c["passed"] for c in report["checks"])


class TestSweep:
    def test_two_gamma_sweep(self, tmp_path):
        with open(CIRCLE_CONFIG) as fh:
            cfg = json.load(fh)
        cfg["run"]["t_final"] = 3.0
        cfg["output"]["samples"] = 100
        cfg["output"]["svg"] = False
        cfg["sweep"] = {"path": "system.gamma", "values": [0.0, 1e-4]}
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(cfg))
        out = str(tmp_path / "sweep_out")
        assert main(["sweep", "--config", str(path), "--out", out]) == 0
        with open(os.path.join(out, "sweep_summary.json")) as fh:
            merged = json.load(fh)
        assert merged["sweep_path"] == "system.gamma"
        assert [r["value"] for r in merged["runs"]] == [0.0, 1e-4]
        for r in merged["runs"]:
            assert r["status"] == "Completed" and r["all_checks_passed"]
            assert os.path.exists(os.path.join(out, r["out_dir"], "summary.json"))

    def test_parallel_workers_match_sequential(self, tmp_path):
        with open(CIRCLE_CONFIG) as fh:
            cfg = json.load(fh)
        cfg["run"]["t_final"] = 2.0
        cfg["output"]["samples"] = 50
        cfg["output"]["svg"] = False
        cfg["sweep"] = {"path": "system.gamma", "values": [1e-4, 1e-3]}
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(cfg))
        out_seq = str(tmp_path / "seq")
        out_par = str(tmp_path / "par")
        assert main(["sweep", "--config", str(path), "--out", out_seq]) == 0
        assert main(["sweep", "--config", str(path), "--out", out_par,
                     "--workers", "2"]) == 0
        for sub in ("run_000", "run_001"):
            with open(os.path.join(out_seq, sub, "trajectory.csv"), "rb") as fh:
                seq = fh.read()
            with open(os.path.join(out_par, sub, "trajectory.csv"), "rb") as fh:
                par = fh.read()
            assert seq == par

    def test_missing_sweep_section_exits_one(self, tmp_path):
        cfg = short_circle_config(tmp_path)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


class TestCustomSystem:
    def _config(self, tmp_path, formulation="lagrangian"):
        cfg = {
            "system": {"kind": "custom", "n": 2,
                       "mass_matrix": [[2.0, 0.0], [0.0, 2.0]],
                       "gamma": 1e-3,
                       "surface": {"kind": "sphere", "radius": 1.0}},
            "initial": {"q": [0.25, 0.0], "v": [1.0, 0.5], "z": 0.0},
            "run": {"t_final": 4.0, "formulation": formulation},
            "output": {"samples": 100, "svg": False},
        }
        path = tmp_path / "custom.json"
        path.write_text(json.dumps(cfg))
        return str(path)

    def test_lagrangian_run_and_check_round_trip(self, tmp_path):
        cfg = self._config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        assert main(["check", "--csv", os.path.join(out, "trajectory.csv"),
                     "--config", cfg]) == 0

    def test_hamiltonian_run(self, tmp_path):
        cfg = self._config(tmp_path, formulation="hamiltonian")
        out = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["status"] == "Completed"
        assert all(c["passed"] for c in summary["checks"])

    def test_momentum_initial_state(self, tmp_path):
        with open(self._config(tmp_path, formulation="hamiltonian")) as fh:
            cfg = json.load(fh)
        cfg["initial"] = {"q": [0.25, 0.0], "p": [2.0, 1.0], "z": 0.0}
        path = tmp_path / "mom.json"
        path.write_text(json.dumps(cfg))
        out = str(tmp_path / "out")
        # p = M v with M = 2 I: same trajectory as v = (1, 0.5)
        assert main(["simulate", "--config", str(path), "--out", out]) == 0

    def test_bad_mass_matrix_shape(self, tmp_path, capsys):
        with open(self._config(tmp_path)) as fh:
            cfg = json.load(fh)
        cfg["system"]["mass_matrix"] = [[1.0, 0.0]]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        assert main(["simulate", "--config", str(path), "--out",
                     str(tmp_path / "o")]) == 1
        assert "mass_matrix" in capsys.readouterr().err


class TestShippedConfigs:
    def test_reference_circle_config_runs(self, tmp_path):
        out = str(tmp_path / "fig1")
        assert main(["simulate", "--config", CIRCLE_CONFIG, "--out", out]) == 0
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["n_events"] >= 10

    def test_reference_ellipse_config_runs(self, tmp_path):
        out = str(tmp_path / "fig2")
        assert main(["simulate", "--config", ELLIPSE_CONFIG, "--out", out]) == 0
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["status"] == "Completed"
        assert all(c["passed"] for c in summary["checks"])
