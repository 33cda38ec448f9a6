import json
import math
from pathlib import Path

import pytest
from scipy.stats import binomtest

from fpa.cli import main, wilson_interval

BASE = {
    "problems": "sphere",
    "dimension": 2,
    "max_iterations": 25,
    "num_runs": 5,
    "epsilon": 1.0,
    "levy_samples": 100000,
    "verify_power_steps": 1000,
    "verify_trajectories": 20000,
    "verify_samples": 100000,
}


def write_config(tmp_path, **overrides):
    values = {**BASE, **overrides}
    path = tmp_path / "exp.cfg"
    path.write_text(
        "".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8"
    )
    return path


def no_temp_files(root):
    return list(Path(root).rglob("*.tmp")) == []


def read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    assert text.endswith("\n")
    return json.loads(text)


# --- run ---------------------------------------------------------------------


def test_run_writes_trace_and_summary(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert "sphere: best" in capsys.readouterr().out

    lines = (out / "sphere_trace.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "iteration,best_fitness,evaluations"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 26
    assert [int(r[0]) for r in rows] == list(range(26))
    assert [int(r[2]) for r in rows] == [20 * (i + 1) for i in range(26)]
    best = [float(r[1]) for r in rows]
    assert all(b1 <= b0 for b0, b1 in zip(best, best[1:]))

    summary = read_json(out / "sphere_summary.json")
    assert summary["spec_version"] == "1.0"
    assert summary["problem"] == "sphere"
    assert summary["dimension"] == 2
    assert summary["seed"] == 1
    assert summary["params"]["variant"] == "full"
    assert summary["params"]["population_size"] == 20
    assert summary["evaluations"] == 20 * 26
    # repr() round trip: the CSV and the JSON carry the identical float
    assert summary["best_fitness"] == best[-1]
    assert no_temp_files(tmp_path)


def test_run_format_gating(tmp_path):
    cfg = write_config(tmp_path, formats="json")
    out = tmp_path / "json_only"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "sphere_summary.json").exists()
    assert not (out / "sphere_trace.csv").exists()

    out = tmp_path / "csv_only"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    assert (out / "sphere_trace.csv").exists()
    assert not (out / "sphere_summary.json").exists()


def test_seed_override_is_echoed(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "42"]) == 0
    assert read_json(out / "sphere_summary.json")["seed"] == 42


# --- determinism across reruns ---------------------------------------------------


@pytest.mark.parametrize("command", ["run", "hitprob", "levy-check", "verify"])
def test_outputs_byte_identical_across_reruns(tmp_path, capsys, command):
    cfg = write_config(tmp_path)
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main([command, "--config", str(cfg), "--out", str(out)]) == 0
        produced = sorted(p for p in out.rglob("*") if p.is_file())
        assert produced, command
        outputs.append({p.name: p.read_bytes() for p in produced})
    capsys.readouterr()
    assert outputs[0] == outputs[1]
    assert no_temp_files(tmp_path)


# --- hitprob -----------------------------------------------------------------------


def test_hitprob_report_fields(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["hitprob", "--config", str(cfg), "--out", str(out)]) == 0
    assert "hit fraction" in capsys.readouterr().out
    payload = read_json(out / "hitprob_sphere.json")
    assert payload["spec_version"] == "1.0"
    assert payload["problem"] == "sphere"
    assert payload["num_runs"] == 5
    assert payload["seed_base"] == 1
    assert payload["epsilon"] == 1.0
    assert payload["confidence"] == 0.95
    assert payload["hits"] == round(payload["fraction"] * 5)
    assert (
        0.0
        <= payload["interval_low"]
        <= payload["fraction"]
        <= payload["interval_high"]
        <= 1.0
    )


def test_hitprob_single_run_is_zero_or_one(tmp_path):
    cfg = write_config(tmp_path, num_runs=1)
    out = tmp_path / "out"
    assert main(["hitprob", "--config", str(cfg), "--out", str(out)]) == 0
    payload = read_json(out / "hitprob_sphere.json")
    assert payload["fraction"] in (0.0, 1.0)
    assert payload["hits"] in (0, 1)


@pytest.mark.parametrize(
    "hits,trials",
    [(0, 10), (10, 10), (3, 7), (50, 100), (999, 1000), (1, 1)],
)
def test_wilson_interval_matches_scipy(hits, trials):
    low, high = wilson_interval(hits, trials)
    ci = binomtest(hits, trials).proportion_ci(
        confidence_level=0.95, method="wilson"
    )
    assert math.isclose(low, ci.low, abs_tol=1e-12)
    assert math.isclose(high, ci.high, abs_tol=1e-12)


def test_wilson_interval_needs_trials():
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


# --- verify ---------------------------------------------------------------------------


def test_verify_passes_and_writes_report(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    report = read_json(out / "verification_report.json")
    assert report["all_passed"] is True
    assert len(report["checks"]) == 7
    assert all(check["passed"] for check in report["checks"])
    labels = [
        "line3_n1",
        "line3_n2",
        "line5_n1",
        "line5_n2",
        "grid3x3_n1",
        "line5_n1_simulated",
    ]
    for label in labels:
        curve = (out / f"mass_{label}.csv").read_text(encoding="utf-8").splitlines()
        assert curve[0] == "step,mass_on_optimal_set"
        assert len(curve) == 1 + 1001
    stdout = capsys.readouterr().out
    assert stdout.count(": pass") == 7


def test_verify_reports_failure_without_perturbation(tmp_path, capsys):
    # p = 0 leaves non-optimal absorbing states, so reachability and the
    # mass limit both fail and the command signals it in the exit code
    cfg = write_config(
        tmp_path,
        switch_probability=0.0,
        verify_power_steps=50,
        verify_trajectories=10000,
        verify_samples=10000,
    )
    out = tmp_path / "out"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 1
    captured = capsys.readouterr()
    assert "failed checks:" in captured.err
    report = read_json(out / "verification_report.json")
    assert report["all_passed"] is False
    by_name = {check["name"]: check for check in report["checks"]}
    reach = by_name["no_closed_set_misses_optimal"]
    assert reach["passed"] is False
    assert reach["per_chain"]["line3_n1"]["offending_set"] == [0]
    assert by_name["mass_concentrates_on_optimal_set"]["passed"] is False


# --- levy-check -------------------------------------------------------------------------


def test_levy_check_tail_slope(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["levy-check", "--config", str(cfg), "--out", str(out)]) == 0
    assert "tail slope" in capsys.readouterr().out
    payload = read_json(out / "levy_check.json")
    assert payload["mode"] == "tail_slope"
    assert payload["passed"] is True
    assert abs(payload["fitted_slope"] - (-1.5)) <= payload["tolerance"]
    survival = (out / "levy_survival.csv").read_text(encoding="utf-8").splitlines()
    assert survival[0] == "magnitude,survival"
    assert len(survival) > 10


def test_levy_check_gaussian_boundary_checks_variance(tmp_path):
    cfg = write_config(tmp_path, levy_tail_exponent=2.0)
    out = tmp_path / "out"
    assert main(["levy-check", "--config", str(cfg), "--out", str(out)]) == 0
    payload = read_json(out / "levy_check.json")
    assert payload["mode"] == "variance_finite"
    assert payload["passed"] is True
    assert "fitted_slope" not in payload


# --- error handling -------------------------------------------------------------------


def test_unknown_problem_exits_2_and_writes_nothing(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "untouched"
    code = main(
        ["run", "--config", str(cfg), "--out", str(out), "--problem", "nosuch"]
    )
    assert code == 2
    assert "error: unknown problem" in capsys.readouterr().err
    assert not out.exists()


def test_bad_epsilon_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, epsilon=-0.5)
    assert main(["hitprob", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "epsilon" in capsys.readouterr().err


def test_levy_sample_floor_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, levy_samples=50000)
    assert main(["levy-check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "levy_samples" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("sed = 1\n", encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 2
    assert "error:" in capsys.readouterr().err


def test_subcommand_required():
    with pytest.raises(SystemExit):
        main([])
