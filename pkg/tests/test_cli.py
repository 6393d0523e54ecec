import json

import numpy as np
import pytest

from beliefnet.cli import main, read_trajectory_csv, run_scenario
from beliefnet.config import (
    BUNDLED,
    ParseError,
    ValidationError,
    generate_scenario,
    load_config,
    loads,
    save_config,
)
from beliefnet.dynamics import build_system
from beliefnet.model import RenormalizationWarning, detect_competing

from conftest import C_BAR, C_HAT, W_SIX


def scenario_dict(**extra):
    d = {"name": "tiny", "W": [[0.5, 0.5], [0.5, 0.5]],
         "logic": [[[1, 0], [0.5, 0.5]], [[1, 0], [0.5, 0.5]]], "x0": {"seed": 3}}
    d.update(extra)
    return d


def write(tmp_path, d, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


# -- configuration -----------------------------------------------------------

@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_load(name):
    cfg = load_config(name)
    net, prof, x0 = cfg.resolve()
    assert x0.shape == (net.n * prof.m,)


def test_bundled_first_study_is_the_six_person_model():
    net, prof, _ = load_config("scenario_fig3").resolve()
    assert np.array_equal(net.W, W_SIX)
    assert all(np.array_equal(prof.matrices[i].C, C_HAT) for i in range(3))
    assert all(np.array_equal(prof.matrices[i].C, C_BAR) for i in range(3, 6))


def test_missing_influence_matrix_is_a_parse_error(tmp_path):
    d = scenario_dict()
    del d["W"]
    with pytest.raises(ParseError, match="'W'"):
        load_config(write(tmp_path, d))


def test_malformed_json_reports_position():
    with pytest.raises(ParseError, match=r"<string>:2:"):
        loads('{"W": [[1]],\n "logic": ]}')


def test_unknown_field_rejected():
    with pytest.raises(ParseError, match="unknown"):
        loads(json.dumps(scenario_dict(colour="red")))


def test_invalid_model_is_a_validation_error():
    with pytest.raises(ValidationError, match="field 'W'"):
        loads(json.dumps(scenario_dict(W=[[1.0, 0.0], [0.0, 1.0]])))
    with pytest.raises(ValidationError, match="field 'x0'"):
        loads(json.dumps(scenario_dict(x0=[0.0, 0.1, 0.2])))


def test_rounded_row_is_renormalized_with_warning():
    d = scenario_dict(W=[[0.5, 0.5000000002], [0.5, 0.5]])
    with pytest.warns(RenormalizationWarning):
        net, _, _ = loads(json.dumps(d)).resolve()
    assert net.W.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-15)


def test_shared_matrix_assignment():
    d = scenario_dict(logic={"matrices": [[[1, 0], [0.5, 0.5]], [[1, 0], [-0.5, 0.5]]],
                             "assign": [0, 1]})
    _, prof, _ = loads(json.dumps(d)).resolve()
    assert prof.matrices[1].C[1, 0] == -0.5


@pytest.mark.parametrize("name", BUNDLED)
def test_config_round_trip_is_lossless(tmp_path, name):
    cfg = load_config(name)
    path = tmp_path / "copy.json"
    save_config(cfg, path)
    again = load_config(path)
    assert again == cfg
    assert np.array_equal(again.initial_state(), cfg.initial_state())


# -- generation --------------------------------------------------------------

def test_generation_is_deterministic():
    spec = {"n": 5, "m": 4, "density": 0.4}
    assert generate_scenario(spec, 17).dumps() == generate_scenario(spec, 17).dumps()
    assert generate_scenario(spec, 17).dumps() != generate_scenario(spec, 18).dumps()


@pytest.mark.parametrize("seed", range(10))
def test_generation_with_competition(seed):
    cfg = generate_scenario({"n": 4, "m": 3, "competition": True}, seed)
    _, prof, _ = cfg.resolve()
    assert any(detect_competing(prof, p) for p in range(prof.m))
    assert cfg.generator["seed"] == seed


def test_full_density_is_one_block():
    from beliefnet.graphs import condense_logic

    _, prof, _ = generate_scenario({"n": 3, "m": 5, "density": 1.0}, 0).resolve()
    assert len(condense_logic(prof).blocks) == 1


def test_generate_command_writes_a_loadable_config(tmp_path):
    out = tmp_path / "g.json"
    assert main(["generate", '{"n": 3, "m": 3}', "--seed", "4", "--out", str(out)]) == 0
    assert load_config(out).generator["seed"] == 4


# -- running -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["scenario_fig3", "scenario_fig4", "homogeneous_example",
                                  "space_example", "space_example_opposed"])
def test_run_bundled_scenarios(tmp_path, name):
    assert main(["run", name, "--out", str(tmp_path)]) == 0
    for f in ("trajectory.csv", "prediction.json", "verification.json"):
        assert (tmp_path / f).exists()


def test_first_study_files(tmp_path):
    main(["run", "scenario_fig3", "--out", str(tmp_path)])
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0].split(",")
    assert header[:4] == ["t", "x1_t1", "x1_t2", "x1_t3"]
    X = read_trajectory_csv(tmp_path / "trajectory.csv")
    topic3 = X[-1, 2::5]
    assert np.ptp(topic3) > 1e-3
    pred = json.loads((tmp_path / "prediction.json").read_text())
    assert [t["verdict"] for t in pred["topics"]] == [
        "consensus", "consensus", "disagreement", "consensus", "consensus"]


def test_second_study_spreads(tmp_path):
    main(["run", "scenario_fig4", "--out", str(tmp_path)])
    X = read_trajectory_csv(tmp_path / "trajectory.csv")
    spreads = [np.ptp(X[-1, p::5]) for p in range(5)]
    assert spreads[0] < 1e-8 and min(spreads[1:]) > 1e-3


def test_homogeneous_run_reaches_consensus(tmp_path):
    main(["run", "homogeneous_example", "--out", str(tmp_path)])
    ver = json.loads((tmp_path / "verification.json").read_text())
    assert all(t["simulated_spread"] < 1e-8 for t in ver["topics"])


def test_csv_replays_through_the_system(tmp_path):
    main(["simulate", "scenario_fig3", "--out", str(tmp_path)])
    X = read_trajectory_csv(tmp_path / "trajectory.csv")
    net, prof, x0 = load_config("scenario_fig3").resolve()
    B = build_system(net, prof)
    assert np.array_equal(X[0], x0)
    assert np.max(np.abs(X[1:] - X[:-1] @ B.T)) <= 1e-12


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", "random_seed_2", "--out", str(a)])
    main(["run", "random_seed_2", "--out", str(b)])
    for f in ("trajectory.csv", "prediction.json", "verification.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_mismatch_exit_code(tmp_path):
    path = write(tmp_path, scenario_dict(agreement_tol=1e-300))
    assert main(["verify", str(path), "--out", str(tmp_path / "o")]) == 2


def test_error_exit_code(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "missing.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_max_steps_exceeded_is_an_error(tmp_path):
    assert main(["simulate", "scenario_fig3", "--max-steps", "3", "--out", str(tmp_path)]) == 1


def test_validate_and_predict_to_stdout(capsys):
    assert main(["validate", "scenario_fig4"]) == 0
    assert "n=6, m=5" in capsys.readouterr().out
    assert main(["predict", "scenario_fig4"]) == 0
    pred = json.loads(capsys.readouterr().out)
    assert pred["topics"][2]["verdict"] == "conjectured-disagreement"


def test_batch_reports_worst_code(tmp_path):
    cases = tmp_path / "cases"
    cases.mkdir()
    write(cases, scenario_dict(), "good.json")
    assert main(["batch", str(cases), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "good" / "verification.json").exists()
    write(cases, scenario_dict(agreement_tol=1e-300), "strict.json")
    assert main(["batch", str(cases)]) == 2
    (cases / "broken.json").write_text("{")
    assert main(["batch", str(cases)]) == 1


def test_run_scenario_returns_report():
    code, result = run_scenario(load_config("space_example"), None)
    assert code == 0 and result["agreement"]
    assert result["topics"][1]["simulated_limit"] == pytest.approx([1.0], abs=1e-9)
