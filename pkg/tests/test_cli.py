import json
from math import sqrt

import pytest

from trireduce.cli import (
    EVALUATE_HEADER,
    PASSAGES_HEADER,
    TRAJECTORY_HEADER,
    main,
)

HARMONIC_CONFIG = {
    "masses": [1.0, 1.0, 1.0],
    "potential": {"builtin": "harmonic", "params": {"k": 1.0, "rest_length": 1.0}},
    "initial_state": {
        "cartesian": {
            "positions": [[0.3, -0.2, 0.9], [1.1, 0.1, -0.4], [-0.6, 0.8, 0.2]],
            "velocities": [[0.1, 0.2, -0.1], [-0.2, 0.1, 0.3], [0.1, -0.3, -0.2]],
        }
    },
    "integrator": {"dt": 0.01, "steps": 1000, "record_stride": 100},
}

# third particle crossing the line of the other two, free motion
CROSSING_CONFIG = {
    "masses": [1.0, 1.0, 1.0],
    "potential": {"builtin": "free"},
    "initial_state": {
        "cartesian": {
            "positions": [[0.0, 0.0, 1.0], [-0.5, 0.0, 0.3], [0.0, 0.0, -1.0]],
            "velocities": [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        }
    },
    "integrator": {"dt": 0.01, "steps": 100},
    "thresholds": {"passage": 0.5},
}


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(args):
    return main(args)


class TestSimulate:
    def test_row_count_and_header(self, tmp_path):
        cfg = write_config(tmp_path, HARMONIC_CONFIG)
        out = tmp_path / "traj.csv"
        assert run(["simulate", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == TRAJECTORY_HEADER
        assert len(lines) == 1 + 1 + 1000 // 100  # header + t=0 + strided rows

    def test_bitwise_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, HARMONIC_CONFIG)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert run(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_conservation_summary_printed(self, tmp_path, capsys):
        cfg = write_config(tmp_path, HARMONIC_CONFIG)
        out = tmp_path / "traj.csv"
        run(["simulate", "--config", cfg, "--out", str(out)])
        assert "energy_drift_rel" in capsys.readouterr().out

    def test_negative_mass_exit_2(self, tmp_path, caplog):
        bad = dict(HARMONIC_CONFIG, masses=[1.0, -1.0, 1.0])
        cfg = write_config(tmp_path, bad)
        assert run(["simulate", "--config", cfg]) == 2
        assert "masses" in caplog.text

    def test_missing_potential_exit_2(self, tmp_path, caplog):
        bad = {k: v for k, v in HARMONIC_CONFIG.items() if k != "potential"}
        cfg = write_config(tmp_path, bad)
        assert run(["simulate", "--config", cfg]) == 2
        assert "potential" in caplog.text

    def test_bad_expression_exit_2(self, tmp_path, caplog):
        bad = dict(HARMONIC_CONFIG, potential={"expression": "r1 +"})
        cfg = write_config(tmp_path, bad)
        assert run(["simulate", "--config", cfg]) == 2
        assert "potential.expression" in caplog.text

    def test_blowup_exit_3(self, tmp_path):
        # near-collision under 1/d gravity: the first kick is ~G/d^2 and
        # sends positions past the overflow guard within a few steps
        collision = {
            "masses": [1.0, 1.0, 1.0],
            "potential": {"builtin": "gravity", "params": {"G": 1.0}},
            "initial_state": {
                "cartesian": {
                    "positions": [[-1e-5, 0.0, 0.0], [0.0, 5.0, 0.0], [1e-5, 0.0, 0.0]],
                    "velocities": [[0.1, 0.0, 0.0], [0.0, 0.0, 0.0], [-0.1, 0.0, 0.0]],
                }
            },
            "integrator": {"dt": 10.0, "steps": 50, "record_stride": 50},
        }
        cfg = write_config(tmp_path, collision)
        assert run(["simulate", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == 3

    def test_unwritable_output_exit_4(self, tmp_path):
        cfg = write_config(tmp_path, HARMONIC_CONFIG)
        out = tmp_path / "no" / "such" / "dir" / "traj.csv"
        assert run(["simulate", "--config", cfg, "--out", str(out)]) == 4


class TestEvaluate:
    def test_noncollinear_row(self, tmp_path):
        cfg = write_config(tmp_path, HARMONIC_CONFIG)
        out = tmp_path / "eval.csv"
        assert run(["evaluate", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == EVALUATE_HEADER
        fields = dict(zip(EVALUATE_HEADER.split(","), lines[1].split(",")))
        assert fields["branch"] == "noncollinear"
        # zero total momentum: reduced Hamiltonian equals the total energy
        assert abs(float(fields["H_reduced"]) - float(fields["E_total"])) < 1e-8

    def test_collinear_branch(self, tmp_path):
        collinear = dict(
            CROSSING_CONFIG,
            initial_state={
                "cartesian": {
                    "positions": [[0.0, 0.0, 1.0], [0.0, 0.0, 0.2], [0.0, 0.0, -1.0]],
                    "velocities": [[-0.2, 0.0, 0.0], [0.4, 0.0, 0.0], [-0.2, 0.0, 0.0]],
                }
            },
        )
        cfg = write_config(tmp_path, collinear)
        out = tmp_path / "eval.csv"
        assert run(["evaluate", "--config", cfg, "--out", str(out)]) == 0
        row = out.read_text().splitlines()[1]
        fields = dict(zip(EVALUATE_HEADER.split(","), row.split(",")))
        assert fields["branch"] == "collinear"
        assert abs(float(fields["H_reduced"]) - float(fields["E_total"])) < 1e-8

    def test_zero_angular_momentum_collinear_exit_3(self, tmp_path, caplog):
        static = dict(
            CROSSING_CONFIG,
            initial_state={
                "cartesian": {
                    "positions": [[0.0, 0.0, 1.0], [0.0, 0.0, 0.2], [0.0, 0.0, -1.0]],
                    "velocities": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
                }
            },
        )
        cfg = write_config(tmp_path, static)
        assert run(["evaluate", "--config", cfg]) == 3
        assert "ZeroAngularMomentum" in caplog.text

    def test_shape_initial_state(self, tmp_path):
        shaped = dict(
            HARMONIC_CONFIG,
            initial_state={
                "shape": {
                    "r1": 1.0,
                    "r2": 1.0,
                    "phi": 1.5707963267948966,
                    "J": [0.0, 0.0, 2.0],
                    "p": [0.0, 0.0, 1.0],
                }
            },
        )
        cfg = write_config(tmp_path, shaped)
        out = tmp_path / "eval.csv"
        assert run(["evaluate", "--config", cfg, "--out", str(out)]) == 0
        fields = dict(
            zip(EVALUATE_HEADER.split(","), out.read_text().splitlines()[1].split(","))
        )
        assert float(fields["r1"]) == pytest.approx(1.0, rel=1e-12)
        assert float(fields["J3"]) == pytest.approx(2.0, rel=1e-10)
        assert float(fields["p3"]) == pytest.approx(1.0, rel=1e-10)

    def test_shape_state_needs_one_form(self, tmp_path, caplog):
        bad = dict(HARMONIC_CONFIG, initial_state={})
        cfg = write_config(tmp_path, bad)
        assert run(["evaluate", "--config", cfg]) == 2
        assert "initial_state" in caplog.text


class TestCollinearReport:
    def test_crossing_reported(self, tmp_path):
        cfg = write_config(tmp_path, CROSSING_CONFIG)
        out = tmp_path / "passages.csv"
        assert run(["collinear-report", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == PASSAGES_HEADER
        assert len(lines) >= 2
        fields = dict(zip(PASSAGES_HEADER.split(","), lines[1].split(",")))
        H_at = float(fields["H_at"])
        assert float(fields["delta_H"]) / abs(H_at) < 1e-6
        assert float(fields["t_minus"]) < float(fields["t_star"]) < float(fields["t_plus"])

    def test_non_crossing_header_only(self, tmp_path):
        quiet = dict(
            CROSSING_CONFIG,
            initial_state={
                "cartesian": {
                    "positions": [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
                    "velocities": [[0.0, 0.0, 0.0], [0.0, 0.1, 0.0], [0.0, 0.0, 0.0]],
                }
            },
        )
        cfg = write_config(tmp_path, quiet)
        out = tmp_path / "passages.csv"
        assert run(["collinear-report", "--config", cfg, "--out", str(out)]) == 0
        assert out.read_text().splitlines() == [PASSAGES_HEADER]

    def test_zero_threshold_header_only(self, tmp_path):
        zeroed = dict(CROSSING_CONFIG, thresholds={"passage": 0.0})
        cfg = write_config(tmp_path, zeroed)
        out = tmp_path / "passages.csv"
        assert run(["collinear-report", "--config", cfg, "--out", str(out)]) == 0
        assert out.read_text().splitlines() == [PASSAGES_HEADER]


class TestCheck:
    def test_default_run_passes(self, capsys):
        assert run(["check"]) == 0
        out = capsys.readouterr().out
        lines = [ln for ln in out.splitlines() if ln.startswith("PASS")]
        assert len(lines) >= 8

    def test_corrupted_tolerance_fails(self, capsys, monkeypatch):
        monkeypatch.setenv("TRIREDUCE_CHECK_TOL_SCALE", "1e-12")
        assert run(["check"]) == 1
        assert "FAIL" in capsys.readouterr().out
