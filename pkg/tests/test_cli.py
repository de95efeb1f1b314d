"""Scenario runner: presets, validation diagnostics, determinism, exit codes."""

import csv
import json
import math
import os

import pytest

from kickedbec.cli import (EXIT_CONFIG, EXIT_NUMERICS, EXIT_OK, ConfigError,
                           load_config, main, parse_angle, resolve_config,
                           run_scenario, validate_config)


def base_config(**overrides):
    cfg = {
        "schema_version": 1,
        "physical": {"recoil_frequency_rad_s": 2.37e4},
        "sequence": {
            "kick_strength": 0.6,
            "kick_period": {"talbot_units": 1.0},
            "pulse_width": {"talbot_units": 0.0},
            "bragg_area": "0.5pi",
            "bragg_duration_s": 6.0e-5,
            "phase_delay_s": 0.0,
        },
        "sweep": {
            "phases": ["0pi", "1pi"],
            "kick_counts": [1, 2, 3, 4, 5],
            "beta": {"kind": "fixed", "value": 0.0},
            "include_control": False,
        },
        "numerics": {"margin": 60, "substeps": 8, "norm_tolerance": 1e-12},
        "output": {"directory": ".", "format": "csv"},
    }
    for dotted, value in overrides.items():
        section, key = dotted.split(".")
        cfg[section][key] = value
    return cfg


def write_config(tmp_path, cfg, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_parse_angle_tokens():
    errors = []
    assert parse_angle("0.5pi", "f", errors) == (0.5 * math.pi, "0.5pi")
    assert parse_angle("pi", "f", errors) == (math.pi, "pi")
    assert parse_angle("-0.25pi", "f", errors) == (-0.25 * math.pi, "-0.25pi")
    assert parse_angle(1.5, "f", errors) == (1.5, "1.5")
    assert parse_angle("2", "f", errors) == (2.0, "2")
    assert errors == []
    assert parse_angle("halfpi", "f", errors) is None
    assert parse_angle(None, "f", errors) is None
    assert len(errors) == 2 and all(e.startswith("f:") for e in errors)


def test_validate_accepts_presets(tmp_path):
    from kickedbec.cli import _preset_resource
    for name in ("figure2", "figure4", "dephasing"):
        path = tmp_path / f"{name}.json"
        path.write_text(_preset_resource(name).read_text())
        assert validate_config(str(path)) == []


def test_validate_reports_negative_kick_strength(tmp_path):
    path = write_config(tmp_path, base_config(**{"sequence.kick_strength": -0.6}))
    diagnostics = validate_config(path)
    assert any("sequence.kick_strength" in d for d in diagnostics)


def test_validate_reports_wide_pulse(tmp_path):
    cfg = base_config()
    cfg["sequence"]["pulse_width"] = {"talbot_units": 2.0}
    path = write_config(tmp_path, cfg)
    diagnostics = validate_config(path)
    assert any("pulse_width" in d and "kick_period" in d for d in diagnostics)


def test_validate_reports_empty_sweep(tmp_path):
    cfg = base_config()
    cfg["sweep"]["phases"] = []
    path = write_config(tmp_path, cfg)
    assert any("sweep.phases" in d for d in validate_config(path))


def test_validate_reports_unknown_field(tmp_path):
    cfg = base_config()
    cfg["sequence"]["voltage"] = 3.0
    path = write_config(tmp_path, cfg)
    assert any("sequence.voltage" in d for d in validate_config(path))


def test_validate_reports_json_syntax_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema_version": 1,\n  oops\n}')
    diagnostics = validate_config(str(path))
    assert len(diagnostics) == 1 and "line 3" in diagnostics[0]


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.json")


def test_cli_validate_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path, base_config(), "good.json")
    assert main(["validate", good]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ok"
    bad = write_config(tmp_path, base_config(**{"sequence.kick_strength": -1}),
                       "bad.json")
    assert main(["validate", bad]) == EXIT_CONFIG
    assert "sequence.kick_strength" in capsys.readouterr().err


def test_cli_simulate_bad_config_exits_2(tmp_path):
    bad = write_config(tmp_path, base_config(**{"sequence.kick_strength": -1}))
    assert main(["simulate", bad]) == EXIT_CONFIG


def test_cli_simulate_truncation_exits_3(tmp_path):
    cfg = base_config()
    cfg["numerics"]["margin"] = 0
    cfg["sweep"]["kick_counts"] = [50]
    path = write_config(tmp_path, cfg)
    assert main(["simulate", path, "--out", str(tmp_path / "out")]) == EXIT_NUMERICS


def test_simulate_writes_expected_files(tmp_path):
    path = write_config(tmp_path, base_config())
    out = tmp_path / "run"
    assert main(["simulate", path, "--out", str(out)]) == EXIT_OK
    names = sorted(os.listdir(out))
    assert names == ["distributions.csv", "fits.csv", "mean_momentum.csv",
                     "summary.json"]
    with open(out / "distributions.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["phi", "kick", "n", "beta", "probability"]
    with open(out / "mean_momentum.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["phi", "kick", "mean_p"]
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) >= {"slopes", "max_abs_deviation", "runtime_s"}
    assert summary["max_abs_deviation"] < 1e-10
    assert summary["slopes"]["0pi"] == pytest.approx(-0.3, abs=1e-8)
    assert summary["slopes"]["1pi"] == pytest.approx(0.3, abs=1e-8)


def test_distribution_rows_are_normalized_per_snapshot(tmp_path):
    path = write_config(tmp_path, base_config())
    out = tmp_path / "run"
    assert main(["simulate", path, "--out", str(out)]) == EXIT_OK
    totals = {}
    with open(out / "distributions.csv") as fh:
        for row in csv.DictReader(fh):
            key = (row["phi"], row["kick"])
            totals[key] = totals.get(key, 0.0) + float(row["probability"])
    assert totals and all(abs(v - 1.0) < 1e-10 for v in totals.values())


def test_preset_figure4_slope_table(tmp_path):
    out = tmp_path / "fig4"
    assert main(["preset", "figure4", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    slopes = summary["slopes"]
    assert slopes["0pi"] == pytest.approx(-0.3, abs=1e-8)
    assert slopes["0.5pi"] == pytest.approx(0.0, abs=1e-8)
    assert slopes["1pi"] == pytest.approx(0.3, abs=1e-8)
    assert slopes["control"] == pytest.approx(0.0, abs=1e-8)
    assert summary["max_abs_deviation"] < 1e-10
    assert (out / "control_mean_momentum.csv").exists()
    assert (out / "figure4.json").exists()


def test_preset_figure2_distributions_match_closed_form(tmp_path):
    import numpy as np

    from kickedbec.analytic import resonant_probability_row

    out = tmp_path / "fig2"
    assert main(["preset", "figure2", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["max_abs_deviation"] < 1e-10
    rows = {}
    with open(out / "distributions.csv") as fh:
        for row in csv.DictReader(fh):
            key = (float(row["phi"]), int(row["kick"]))
            rows.setdefault(key, {})[int(row["n"])] = float(row["probability"])
    for (phi, t), by_index in rows.items():
        ns = sorted(by_index)
        expected = resonant_probability_row(ns[0], ns[-1], 0.6, t, phi)
        got = np.array([by_index[n] for n in ns])
        assert np.abs(got - expected).max() < 1e-10


def test_preset_dephasing_kills_current(tmp_path):
    out = tmp_path / "deph"
    assert main(["preset", "dephasing", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["slopes"]["0pi"]) < 0.02


def test_byte_identical_reruns(tmp_path):
    cfg = base_config()
    cfg["sweep"]["beta"] = {"kind": "gaussian", "count": 16, "sigma": 0.05,
                            "seed": 99}
    path = write_config(tmp_path, cfg)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", path, "--out", str(out_a)]) == EXIT_OK
    assert main(["simulate", path, "--out", str(out_b)]) == EXIT_OK
    for name in ("distributions.csv", "mean_momentum.csv", "fits.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_fit_min_kick_option(tmp_path):
    path = write_config(tmp_path, base_config())
    out = tmp_path / "out"
    assert main(["simulate", path, "--out", str(out),
                 "--fit-min-kick", "3"]) == EXIT_OK
    with open(out / "fits.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(int(row["points_used"]) == 3 for row in rows)


def test_resolve_rejects_wrong_schema_version():
    cfg = base_config()
    cfg["schema_version"] = 2
    with pytest.raises(ConfigError, match="schema_version"):
        resolve_config(cfg)


def test_run_scenario_summary_keys(tmp_path):
    cfg = resolve_config(base_config())
    summary = run_scenario(cfg, out_dir=str(tmp_path / "direct"))
    assert summary["kernel_backend"] in ("cython", "numpy")
    assert summary["runtime_s"] > 0.0
    assert summary["schema_version"] == 1


def test_finite_pulse_scenario_runs_and_reports_no_deviation(tmp_path):
    cfg = base_config()
    cfg["sequence"]["pulse_width"] = {"talbot_units": 5.0 / 66.3}
    cfg["sweep"]["kick_counts"] = [1, 2, 3]
    path = write_config(tmp_path, cfg)
    out = tmp_path / "finite"
    assert main(["simulate", path, "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    # off the ideal-kick limit there is no closed form to compare against
    assert summary["max_abs_deviation"] is None
