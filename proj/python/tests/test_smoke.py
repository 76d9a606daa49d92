import json

import pytest

import faasbench


def test_listing():
    assert sorted(faasbench.benchmarks()) == ["smartcity", "smartfactory", "streaming", "webshop"]
    assert "exp3-three-way-factory" in faasbench.recipes()
    assert faasbench.__version__


def test_recipe_round_trip_validates():
    config, profile = faasbench.recipe("exp2-edge-cloud")
    assert config["benchmark"] == "smartcity"
    faasbench.validate("smartcity", json.dumps(config), json.dumps(profile))


def test_unknown_recipe_raises():
    with pytest.raises(faasbench.FaasbenchError):
        faasbench.recipe("exp9")


def test_application_json():
    app = json.loads(faasbench.application("smartfactory"))
    assert len(app["functions"]) == 7


def test_simulate_is_deterministic():
    a = faasbench.simulate("webshop", seed=3, scale=0.01)
    b = faasbench.simulate("webshop", seed=3, scale=0.01)
    assert a["log"] == b["log"]
    assert a["run_id"] == b["run_id"]
    assert a["summary"]


def test_run_then_analyze(tmp_path):
    out = faasbench.run("smartfactory", str(tmp_path / "out"), seed=2, scale=0.05)
    assert out["exit_code"] == 0, out["error"]
    inline = faasbench.summary(out)
    again = faasbench.analyze(out["run_dir"] + "/raw.log", str(tmp_path / "reports"))
    assert again["exit_code"] == 0
    assert faasbench.summary(again) == inline


def test_analyze_missing_log(tmp_path):
    out = faasbench.analyze(str(tmp_path / "nope.log"), str(tmp_path / "r"))
    assert out["exit_code"] == 2
