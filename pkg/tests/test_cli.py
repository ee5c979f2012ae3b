"""End-to-end command line coverage, run in process through main()."""
import json

import numpy as np
import pytest

from lvmut.cli import main
from lvmut.model import interaction_values
from lvmut.presets import get_preset
from lvmut.serialize import dumps_json, model_to_dict


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_presets_listing(capsys):
    code, out, _ = _run(capsys, "presets")
    assert code == 0
    for name in ("sym2", "fit2asym", "mut4", "pert2", "crowd3"):
        assert name in out
    code, out, _ = _run(capsys, "presets", "--json")
    names = {entry["name"] for entry in json.loads(out)}
    assert names == {"sym2", "fit2asym", "mut4", "pert2", "crowd3"}
    assert "0.06" in out  # mut4 copy error is pinned


def test_validate_preset(capsys):
    code, out, _ = _run(capsys, "validate", "--preset", "sym2")
    assert code == 0
    rep = json.loads(out)
    assert rep["h1_monotone"] and rep["h1_symmetry"] and rep["h3_half"]
    assert rep["h2_coercive"]


def test_unknown_preset_is_usage_error(capsys):
    code, _, err = _run(capsys, "simulate", "--preset", "nope")
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] in ("KeyError", "UsageError")
    assert "nope" in payload["message"]


def test_simulate_writes_deterministic_csv(tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out_dir in (out_a, out_b):
        code, _, _ = _run(
            capsys, "simulate", "--preset", "sym2", "--out", str(out_dir)
        )
        assert code == 0
    text_a = (out_a / "trajectory.csv").read_text()
    text_b = (out_b / "trajectory.csv").read_text()
    assert text_a == text_b
    header = text_a.split("\n", 1)[0]
    assert header == "t,v_1,v_2,total"


def test_equilibrium_perron_stdout(capsys):
    code, out, _ = _run(
        capsys, "equilibrium", "--preset", "fit2asym", "--method", "perron"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["lambda_p"] == pytest.approx(1.9099019513592785, abs=1e-12)
    assert payload["method"] == "perron"
    assert payload["residual"] <= 1e-10


def test_equilibrium_method_mismatch(capsys):
    code, _, err = _run(
        capsys, "equilibrium", "--preset", "crowd3", "--method", "perron"
    )
    assert code == 2
    assert json.loads(err)["error"] == "WrongInteractionKind"


def test_equilibrium_auto_picks_homotopy(capsys):
    code, out, _ = _run(capsys, "equilibrium", "--preset", "crowd3")
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "homotopy"
    assert payload["alpha_bar"] is None
    assert len(payload["path"]) == 21


def test_spectrum_value(capsys):
    code, out, _ = _run(capsys, "spectrum", "--preset", "sym2")
    assert code == 0
    assert json.loads(out)["c1"] == pytest.approx(0.2, abs=1e-10)


def test_entropy_requires_kernel(capsys, tmp_path):
    code, _, err = _run(capsys, "entropy", "--preset", "sym2")
    assert code == 2
    assert json.loads(err)["error"] == "UsageError"
    out_dir = tmp_path / "ent"
    code, _, _ = _run(
        capsys, "entropy", "--preset", "sym2", "--kernel", "quadratic",
        "--record-every", "0.1", "--out", str(out_dir)
    )
    assert code == 0
    lines = (out_dir / "entropy.csv").read_text().strip().split("\n")
    assert lines[0] == "t,H,D,gamma_term,analytic_dt,F,E_h,lambda,beta"
    assert len(lines) > 100


def test_entropy_polynomial_kernel(capsys):
    code, out, _ = _run(
        capsys, "entropy", "--preset", "sym2", "--kernel", "poly:0,0,1",
        "--record-every", "0.5"
    )
    assert code == 0
    assert out.startswith("t,H,")


def test_rates_fit(capsys):
    code, out, _ = _run(capsys, "rates", "--preset", "sym2", "--record-every", "0.1")
    assert code == 0
    payload = json.loads(out)
    assert payload["fitted_rate_eh"] <= -0.38
    assert payload["r_squared"] >= 0.999
    assert payload["predicted_c1"] == pytest.approx(0.2, abs=1e-10)


def test_stability_scope_gate_and_force(capsys, tmp_path):
    code, _, err = _run(
        capsys, "stability", "--preset", "crowd3", "--samples", "2",
        "--t-end", "5"
    )
    assert code == 1
    assert json.loads(err)["error"] == "OutOfTheoremScope"
    out_dir = tmp_path / "stab"
    code, _, err = _run(
        capsys, "stability", "--preset", "crowd3", "--samples", "2",
        "--t-end", "5", "--force", "--out", str(out_dir)
    )
    assert code == 0
    assert "outside" in err.lower() or "scope" in err.lower()
    report = json.loads((out_dir / "report.json").read_text())
    assert report["in_scope"] is False
    assert "warning" in report
    assert (out_dir / "report.csv").exists()


def test_stability_converges_on_preset(capsys):
    code, out, _ = _run(
        capsys, "stability", "--preset", "sym2", "--samples", "3",
        "--t-end", "120", "--seed", "7"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"] is True
    assert payload["max_pairwise_gap"] <= 1e-6


def test_sweep_from_perturbed_preset(capsys, tmp_path):
    out_dir = tmp_path / "sw"
    code, _, _ = _run(
        capsys, "sweep", "--preset", "pert2", "--eps", "1e-4,1e-3",
        "--out", str(out_dir)
    )
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert len(report["rows"]) == 3
    assert report["rows"][0]["eps"] == 0.0
    assert all(not row["failed"] for row in report["rows"])
    csv_lines = (out_dir / "report.csv").read_text().strip().split("\n")
    assert len(csv_lines) == 4


def test_sweep_needs_amplitudes_for_uniform_models(capsys):
    code, _, err = _run(capsys, "sweep", "--preset", "sym2", "--eps", "1e-4")
    assert code == 2
    assert "amp" in json.loads(err)["message"]
    code, out, _ = _run(
        capsys, "sweep", "--preset", "sym2", "--eps", "1e-4",
        "--amp", "1,-0.7", "--w", "0.2,-0.1;0.15,0.25"
    )
    assert code == 0
    assert len(json.loads(out)["rows"]) == 2


def test_scenario_file_drives_simulation(capsys, tmp_path):
    model = get_preset("sym2").model
    scenario = {
        "model": model_to_dict(model),
        "initial": [8.0, 2.0],
        "t_end": 2.0,
        "record_every": 0.5,
        "tasks": ["simulate"],
    }
    path = tmp_path / "scenario.json"
    path.write_text(dumps_json(scenario))
    code, out, _ = _run(capsys, "simulate", "--scenario", str(path))
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "t,v_1,v_2,total"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert float(first[1]) == 8.0


def test_scenario_sampler_runs_stability(capsys, tmp_path):
    scenario = {
        "model": model_to_dict(get_preset("sym2").model),
        "initial": {"count": 2, "seed": 3},
        "t_end": 100.0,
    }
    path = tmp_path / "scenario.json"
    path.write_text(dumps_json(scenario))
    code, out, _ = _run(
        capsys, "stability", "--scenario", str(path), "--tol", "1e-5"
    )
    assert code == 0
    assert json.loads(out)["converged"] is True


def test_scenario_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = _run(capsys, "simulate", "--scenario", str(bad))
    assert code == 2
    missing = tmp_path / "missing.json"
    missing.write_text(dumps_json({"initial": [1.0, 2.0]}))
    code, _, err = _run(capsys, "simulate", "--scenario", str(missing))
    assert code == 2
    assert "model" in json.loads(err)["message"]
    unknown_task = tmp_path / "task.json"
    unknown_task.write_text(
        dumps_json({"model": model_to_dict(get_preset("sym2").model),
                    "tasks": ["summon"]})
    )
    code, _, err = _run(capsys, "simulate", "--scenario", str(unknown_task))
    assert code == 2
    assert "summon" in json.loads(err)["message"]


def test_negative_v0_flag_rejected(capsys):
    code, _, err = _run(capsys, "simulate", "--preset", "sym2", "--v0=-1,2")
    assert code == 2
    assert json.loads(err)["error"] == "ValueError"


def test_verify_single_preset_filter(capsys):
    code, out, _ = _run(capsys, "verify", "--preset", "pert2")
    assert code == 0
    lines = [l for l in out.strip().split("\n") if l.startswith("criterion")]
    assert len(lines) == 1
    assert "perturbation-bound" in lines[0]
    assert "PASS" in lines[0]


def test_verify_reports_known_failure(capsys):
    code, out, _ = _run(capsys, "verify", "--preset", "fit2asym")
    assert code == 1
    lines = [l for l in out.strip().split("\n") if l.startswith("criterion")]
    failing = [l for l in lines if "FAIL" in l]
    assert len(failing) == 1
    assert failing[0].startswith("criterion 06 lyapunov-descent: FAIL")
    assert all("PASS" in l for l in lines if l not in failing)


def test_verify_rejects_untouched_preset(capsys):
    code, _, err = _run(capsys, "verify", "--preset", "nsuch")
    assert code == 2
    assert "nsuch" in json.loads(err)["message"]


def test_missing_subcommand_is_usage_error(capsys):
    code, _, err = _run(capsys)
    assert code == 2
    assert json.loads(err)["error"] == "UsageError"


def test_scenario_model_round_trips_through_cli(capsys, tmp_path):
    model = get_preset("crowd3").model
    path = tmp_path / "crowd.json"
    path.write_text(dumps_json({"model": model_to_dict(model)}))
    code, out, _ = _run(capsys, "equilibrium", "--scenario", str(path))
    assert code == 0
    payload = json.loads(out)
    v_bar = np.array(payload["v_bar"])
    assert np.all(v_bar > 0)
    vals = interaction_values(model, v_bar)
    assert vals.shape == (3,)
