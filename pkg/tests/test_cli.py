import json
import subprocess
import sys

import pytest

from heatsync.cli import main


def write_config(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def preset_config(tmp_path):
    return write_config(
        tmp_path / "scenario.json",
        {"scenario_preset": "sectionV", "sim": {"nx": 41, "dt": 0.002}},
    )


@pytest.fixture
def explicit_config(tmp_path):
    return write_config(
        tmp_path / "explicit.json",
        {
            "graph": {
                "n": 5,
                "edges": [[1, 3], [2, 4], [3, 4], [4, 5]],
                "leader_set": [1, 2, 3],
            },
            "alpha": 0.0,
            "beta": 1.0,
            "k": 3.0,
            "g": -2.0,
            "sim": {
                "nx": 41,
                "dt": 0.002,
                "t_end": 0.5,
                "source": "off",
                "initial_conditions": "sectionV",
            },
        },
    )


class TestParsing:
    def test_malformed_json_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["certify", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["certify", str(tmp_path / "nope.json")]) == 2

    def test_unknown_preset_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "p.json", {"scenario_preset": "mystery"})
        assert main(["certify", cfg]) == 2

    def test_missing_graph_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "g.json", {"alpha": 0.0})
        assert main(["certify", cfg]) == 2


class TestCertify:
    def test_feasible_preset(self, preset_config, tmp_path, capsys):
        assert main(["certify", preset_config]) == 0
        out = capsys.readouterr().out
        assert "feasible:         true" in out
        report = json.loads((tmp_path / "scenario.certify.json").read_text())
        assert report["feasible"] is True
        assert report["max_eig"] < -1e-9
        assert report["command"] == "certify"

    def test_infeasible_gain_exits_1(self, tmp_path):
        cfg = write_config(
            tmp_path / "k12.json",
            {
                "graph": {
                    "n": 5,
                    "edges": [[1, 3], [2, 4], [3, 4], [4, 5]],
                    "leader_set": [1, 2, 3],
                },
                "alpha": 0.0,
                "k": 12.0,
                "g": -2.0,
            },
        )
        assert main(["certify", cfg]) == 1
        report = json.loads((tmp_path / "k12.certify.json").read_text())
        assert report["feasible"] is False


class TestDesign:
    def test_design_and_round_trip(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "plant.json",
            {
                "graph": {
                    "n": 5,
                    "edges": [[1, 3], [2, 4], [3, 4], [4, 5]],
                    "leader_set": [1, 2, 3],
                },
                "alpha": 0.0,
                "beta": 1.0,
            },
        )
        assert main(["design", cfg]) == 0
        out = capsys.readouterr().out
        assert "chosen k" in out
        report_path = tmp_path / "plant.design.json"
        report = json.loads(report_path.read_text())
        assert report["k"] == pytest.approx(4.934802200544679)
        assert report["g"] < 0
        # the design report is itself a valid scenario: feed it back
        assert main(["certify", str(report_path)]) == 0

    def test_gains_in_config_warned_and_ignored(self, explicit_config, capsys):
        assert main(["design", explicit_config]) == 0
        assert "ignored" in capsys.readouterr().err

    def test_uncontrollable_exits_1(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "island.json",
            {"graph": {"n": 3, "edges": [[1, 2]], "leader_set": [1]}, "alpha": 0.0},
        )
        assert main(["design", cfg]) == 1
        assert "(3,)" in capsys.readouterr().err

    def test_empty_window_exits_1(self, tmp_path):
        cfg = write_config(
            tmp_path / "hot.json",
            {
                "graph": {
                    "n": 5,
                    "edges": [[1, 3], [2, 4], [3, 4], [4, 5]],
                    "leader_set": [1, 2, 3],
                },
                "alpha": 3.0,
            },
        )
        assert main(["design", cfg]) == 1


class TestSimulate:
    def test_output_files_and_headers(self, preset_config, tmp_path, capsys):
        out_dir = tmp_path / "run"
        assert main(["simulate", preset_config, "--out", str(out_dir)]) == 0
        errors = (out_dir / "errors.csv").read_text().splitlines()
        assert errors[0] == (
            "t,err_agent_1,err_agent_2,err_agent_3,err_agent_4,err_agent_5,"
            "err_total,pairwise_max"
        )
        boundary = (out_dir / "boundary.csv").read_text().splitlines()
        assert boundary[0] == "t,z_1,z_2,z_3,z_4,z_5,z_leader"
        avg = (out_dir / "avg_error.csv").read_text().splitlines()
        assert avg[0] == "x,ebar_t_0.1,ebar_t_0.5,ebar_t_1,ebar_t_2.5"
        assert len(avg) == 41 + 1
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["preset"] == "sectionV"
        assert manifest["outputs"] == "errors.csv;boundary.csv;avg_error.csv"

    def test_custom_snapshots(self, explicit_config, tmp_path):
        out_dir = tmp_path / "snap"
        assert (
            main(
                [
                    "simulate",
                    explicit_config,
                    "--out",
                    str(out_dir),
                    "--snapshots",
                    "0.1,0.25",
                ]
            )
            == 0
        )
        header = (out_dir / "avg_error.csv").read_text().splitlines()[0]
        assert header == "x,ebar_t_0.1,ebar_t_0.25"

    def test_divergence_exits_1(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "blowup.json",
            {
                "graph": {"n": 1, "edges": [], "leader_set": []},
                "alpha": 80.0,
                "k": 0.0,
                "g": 0.0,
                "sim": {
                    "nx": 21,
                    "dt": 0.001,
                    "t_end": 5.0,
                    "source": "off",
                    "initial_conditions": {
                        "followers": [[1.0] * 21],
                        "leader": [0.0] * 21,
                    },
                },
            },
        )
        assert main(["simulate", cfg, "--out", str(tmp_path / "d")]) == 1
        assert "diverged" in capsys.readouterr().err


class TestSpectrum:
    def test_prints_modes_and_abscissa(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "modes.json",
            {
                "graph": {"n": 1, "edges": [], "leader_set": [1]},
                "alpha": -1.0,
                "k": 0.0,
                "g": 0.0,
                "sim": {"nx": 81, "dt": 0.01, "source": "off"},
            },
        )
        assert main(["spectrum", cfg]) == 0
        out = capsys.readouterr().out
        assert "analytic open-loop modes" in out
        assert "spectral abscissa" in out
        abscissa = float(out.strip().splitlines()[-1].split()[-1])
        assert abscissa == pytest.approx(-1.0, rel=0.02)


class TestSweep:
    def test_grid_csv(self, explicit_config, tmp_path):
        out_csv = tmp_path / "sweep.csv"
        assert (
            main(
                ["sweep", explicit_config, "--k", "1:9:5", "--g", "-4:0:3",
                 "--out", str(out_csv)]
            )
            == 0
        )
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "k,g,max_eig_omega,feasible"
        assert len(lines) == 1 + 15
        rows = {}
        for line in lines[1:]:
            k, g, eig, feas = line.split(",")
            rows[(float(k), float(g))] = (float(eig), feas)
        assert rows[(3.0, -2.0)][1] == "true"  # published gains feasible
        assert all(feas == "false" for (k, g), (_, feas) in rows.items() if g == 0.0)

    def test_out_of_window_column_infeasible(self, explicit_config, tmp_path):
        out_csv = tmp_path / "k12.csv"
        assert (
            main(
                ["sweep", explicit_config, "--k", "12:13:2", "--g", "-6:-1:3",
                 "--out", str(out_csv)]
            )
            == 0
        )
        for line in out_csv.read_text().splitlines()[1:]:
            assert line.split(",")[3] == "false"

    def test_with_decay_rates(self, explicit_config, tmp_path):
        out_csv = tmp_path / "rates.csv"
        assert (
            main(
                ["sweep", explicit_config, "--k", "2:4:2", "--g", "-3:-1:2",
                 "--out", str(out_csv), "--simulate"]
            )
            == 0
        )
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "k,g,max_eig_omega,feasible,decay_rate"
        for line in lines[1:]:
            assert line.split(",")[4] != ""

    def test_failed_cells_keep_column_count(self, tmp_path):
        # cells whose simulation diverges keep their gain columns and blank
        # the metric columns
        cfg = write_config(
            tmp_path / "edge.json",
            {
                "graph": {"n": 1, "edges": [], "leader_set": [1]},
                "alpha": 80.0,
                "k": 0.0,
                "g": 0.0,
                "sim": {
                    "nx": 21,
                    "dt": 0.001,
                    "t_end": 4.0,
                    "source": "off",
                    "initial_conditions": {
                        "followers": [[1.0] * 21],
                        "leader": [0.0] * 21,
                    },
                },
            },
        )
        out = tmp_path / "cells.csv"
        code = main(
            ["sweep", cfg, "--k", "0:1:2", "--g", "-1:0:2", "--out", str(out),
             "--simulate"]
        )
        lines = out.read_text().splitlines()
        header = lines[0].split(",")
        assert header == ["k", "g", "max_eig_omega", "feasible", "decay_rate"]
        assert len(lines) == 5
        blank_rows = 0
        for line in lines[1:]:
            cells = line.split(",")
            assert len(cells) == len(header)
            if cells[2] == "":
                blank_rows += 1
                assert cells[3] == "" and cells[4] == ""
        assert blank_rows >= 1
        assert (code == 1) == (blank_rows == 4)

    def test_bad_range_exits_2(self, explicit_config, tmp_path):
        code = main(
            ["sweep", explicit_config, "--k", "1:9:1", "--g", "-4:0:3",
             "--out", str(tmp_path / "x.csv")]
        )
        assert code == 2
        code = main(
            ["sweep", explicit_config, "--k", "oops", "--g", "-4:0:3",
             "--out", str(tmp_path / "y.csv")]
        )
        assert code == 2


class TestDeterminism:
    def test_simulate_byte_identical(self, preset_config, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            assert main(["simulate", preset_config, "--out", str(d)]) == 0
        for name in ("errors.csv", "boundary.csv", "avg_error.csv", "manifest.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_certify_byte_identical(self, preset_config, tmp_path):
        report = tmp_path / "scenario.certify.json"
        assert main(["certify", preset_config]) == 0
        first = report.read_bytes()
        assert main(["certify", preset_config]) == 0
        assert report.read_bytes() == first


class TestPackaging:
    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "heatsync", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip()
