import json

import pytest

from lckhopf.cli import ConfigError, RunConfig, main, run

FAST = ["--suites", "contact,theorem_a", "--points", "8"]


def test_demo_passes(capsys):
    assert main(["demo", "--points", "8"]) == 0
    out = capsys.readouterr().out
    assert "Lambda = (0.5+0i, 0.5+0i)" in out and "overall: PASS" in out


def test_json_schema(capsys):
    assert main(["run", "--a", "1,2", "--s", "0.5"] + FAST) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"config", "suites", "overall_pass", "elapsed_ms"}
    assert doc["elapsed_ms"] is None and doc["config"]["n"] == 2
    for suite in doc["suites"]:
        assert suite["pass"] == all(c["pass"] for c in suite["checks"])
        for c in suite["checks"]:
            assert c["pass"] == (c["max_residual"] < c["tolerance"])


@pytest.mark.parametrize("argv, msg", [
    (["run", "--a", "2,1"], "sorted"),
    (["run", "--n", "1", "--a", "1"], "n must be at least 2"),
    (["run", "--a", "1,1", "--s", "-1"], "s must be positive"),
    (["run", "--a", "1,1", "--c", "1,0.5"], "unit"),
    (["run", "--suites", "bogus"], "unknown suite"),
    (["run", "--points", "0"], "points"),
])
def test_config_errors_exit_2(argv, msg, capsys):
    assert main(argv) == 2
    assert msg in capsys.readouterr().err


def test_failing_check_exits_1(capsys):
    assert main(["run", "--suites", "theorem_a", "--points", "5", "--tol", "theorem_a=0"]) == 1


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "a": [0.5, 1.0, 2.0], "s": 0.4, "c": [[1, 0], [0, 1], [-1, 0]],
                               "seed": 5, "points": 6, "suites": ["contact"]}))
    assert main(["run", "--config", str(cfg), "--seed", "6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["seed"] == 6 and doc["config"]["a"] == [0.5, 1.0, 2.0]
    assert doc["config"]["c"][1] == [0.0, 1.0]


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"n": 2, "colour": 1}')
    assert main(["run", "--config", str(cfg)]) == 2
    cfg.write_text("not json")
    assert main(["run", "--config", str(cfg)]) == 2


def test_output_file_and_determinism(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["run", "--a", "0.7,1.3", "--seed", "4"] + FAST
    assert main(args + ["--output", str(out1)]) == 0
    assert main(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_parallel_matches_sequential():
    base = dict(n=2, a=(1.0, 2.0), s=0.5, seed=2, points=6, suites=("contact", "theorem_a", "biholomorphism"))
    assert run(RunConfig(**base)).to_json() == run(RunConfig(parallel=3, **base)).to_json()


def test_timing_flag(capsys):
    assert main(["run", "--timing"] + FAST) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["elapsed_ms"] > 0 and all(s["elapsed_ms"] is not None for s in doc["suites"])


def test_text_format(capsys):
    assert main(["run", "--format", "text"] + FAST) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("Lambda = (") and lines[-1] == "overall: PASS"
    assert any(l.strip().startswith("contact.etaA.reeb_eta_A") for l in lines)


def test_validate_direct():
    with pytest.raises(ConfigError):
        RunConfig(output_format="xml").validate()


def test_weighted_three_dimensional_run(capsys):
    assert main(["run", "--n", "3", "--a", "1,2,5", "--suites", "lck,parallel_lee", "--points", "12"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["name"] for s in doc["suites"]] == ["lck", "parallel_lee"] and doc["overall_pass"]
