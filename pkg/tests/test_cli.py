import json

import pytest

from mrfjunta.cli import main


@pytest.fixture
def pipeline(tmp_path):
    m, f, ms = tmp_path / "m.json", tmp_path / "f.json", tmp_path / "ms.json"
    s, sl = tmp_path / "s.jsonl", tmp_path / "sl.jsonl"
    assert main(["gen-model", "--n", "6", "--d", "2", "--lambda", "0.5", "--k", "2", "--seed", "3",
                 "-o", str(m), "--junta-output", str(f)]) == 0
    assert main(["smooth", "--model", str(m), "--seed", "4", "-o", str(ms)]) == 0
    assert main(["sample", "--model", str(ms), "--count", "20000", "--seed", "5", "-o", str(s)]) == 0
    assert main(["label", "--samples", str(s), "--junta", str(f), "-o", str(sl)]) == 0
    return tmp_path


class TestPipeline:
    def test_learn_calibrated(self, pipeline, capsys):
        rc = main(["learn", "--samples", str(pipeline / "sl.jsonl"), "--model", str(pipeline / "ms.json"),
                   "--threshold-mode", "calibrated", "--junta", str(pipeline / "f.json")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        truth = json.loads((pipeline / "f.json").read_text())
        assert out["rel"] == truth["relevant"]

    def test_smoothed_model_has_alpha(self, pipeline):
        data = json.loads((pipeline / "ms.json").read_text())
        assert len(data["alpha"]) == 6

    def test_zero_sigma_needs_flag(self, pipeline):
        with pytest.raises(SystemExit):
            main(["smooth", "--model", str(pipeline / "m.json"), "--sigma", "0"])
        assert main(["smooth", "--model", str(pipeline / "m.json"), "--sigma", "0", "--allow-zero-sigma",
                     "-o", str(pipeline / "z.json")]) == 0

    def test_gibbs_sample(self, pipeline, capsys):
        assert main(["sample", "--model", str(pipeline / "ms.json"), "--count", "5", "--sampler", "gibbs",
                     "--burn-in", "10", "--thinning", "1", "--junta", str(pipeline / "f.json")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 5 and set(json.loads(lines[0])) == {"x", "y"}


class TestOracleCommand:
    def test_empty_battery(self, tmp_path, capsys):
        spec = tmp_path / "e.json"
        spec.write_text('{"checks": []}')
        assert main(["oracle", str(spec)]) == 0
        assert capsys.readouterr().out == ""

    def test_unknown_check(self, tmp_path):
        spec = tmp_path / "b.json"
        spec.write_text('{"checks": [{"name": "bogus"}]}')
        assert main(["oracle", str(spec)]) == 2

    def test_corrupted_model_fails(self, pipeline, capsys):
        data = json.loads((pipeline / "m.json").read_text())
        data["psi_bar"][0]["coeff"] = 50.0
        (pipeline / "bad.json").write_text(json.dumps(data))
        spec = pipeline / "v.json"
        spec.write_text(json.dumps({"checks": [{"name": "validate", "models": [str(pipeline / "bad.json")]}]}))
        assert main(["oracle", str(spec)]) == 1
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["pass"] is False


class TestExperimentCommand:
    ARGS = ["experiment", "--n", "6", "--k", "2", "--d", "2", "--sigma", "0.3", "--lambda", "0.5", "--N", "2000",
            "--trials", "3", "--seed", "7", "--format", "csv", "--threshold-mode", "calibrated"]

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(self.ARGS + ["-o", str(a)]) == 0
        assert main(self.ARGS + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"n": 6, "k": 1, "d": 1, "sigma": 0.2, "lambda": 0.3, "N": 500, "trials": 2}))
        assert main(["experiment", "--config", str(cfg)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["config"]["k"] == 1

    def test_invalid_config(self, capsys):
        assert main(["experiment", "--n", "4", "--k", "5", "--d", "1", "--sigma", "0.3", "--lambda", "0.5",
                     "--N", "10"]) == 1
