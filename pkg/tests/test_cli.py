import csv
import json
import os

import pytest

from conformal_frbc.cli import main

from conftest import blob_dataset

FAST = ["--population", "8", "--generations", "4", "--folds", "4"]


def write_csv(path, data):
    import csv as _csv
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(data.feature_names + ["label"])
        for row, lab in zip(data.features, data.labels):
            w.writerow(list(row) + [data.class_names[lab]])
    return str(path)


@pytest.fixture(scope="module")
def csv_path(tmp_path_factory):
    data = blob_dataset(n=120, gap=3.0, seed=17)
    return write_csv(tmp_path_factory.mktemp("data") / "blobs.csv", data)


@pytest.fixture(scope="module")
def model_path(tmp_path_factory, csv_path):
    out = str(tmp_path_factory.mktemp("model") / "model.json")
    code = main(["train", "--data", csv_path, "--out", out, "--seed", "1"] + FAST)
    assert code == 0
    return out


class TestTrain:
    def test_writes_model_and_prints_rules(self, csv_path, tmp_path, capsys):
        out = str(tmp_path / "m.json")
        assert main(["train", "--data", csv_path, "--out", out] + FAST) == 0
        captured = capsys.readouterr().out
        assert "IF " in captured and " THEN class " in captured
        doc = json.loads(open(out).read())
        assert doc["format"] == "conformal-frbc-model"
        assert len(doc["rules"]) <= 15
        assert all(len(r["antecedents"]) <= 3 for r in doc["rules"])
        assert doc["config"]["seed"] == 0

    def test_rerun_is_byte_identical(self, csv_path, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = ["train", "--data", csv_path, "--seed", "3"] + FAST
        assert main(args + ["--out", a]) == 0
        assert main(args + ["--out", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_missing_data_exits_2_without_output(self, tmp_path, capsys):
        out = str(tmp_path / "m.json")
        code = main(["train", "--data", str(tmp_path / "missing.csv"), "--out", out])
        assert code == 2
        assert not os.path.exists(out)
        assert "error:" in capsys.readouterr().err

    def test_ivt2_flag(self, csv_path, tmp_path):
        out = str(tmp_path / "m.json")
        assert main(["train", "--data", csv_path, "--kind", "ivt2", "--out", out] + FAST) == 0
        assert json.loads(open(out).read())["kind"] == "ivt2"

    def test_thread_env_var_accepted(self, csv_path, tmp_path, monkeypatch):
        monkeypatch.setenv("CONFORMAL_FRBC_THREADS", "3")
        out = str(tmp_path / "m.json")
        assert main(["train", "--data", csv_path, "--out", out] + FAST) == 0

    def test_ga_config_file_with_flag_override(self, csv_path, tmp_path):
        cfg = tmp_path / "ga.json"
        cfg.write_text(json.dumps({"population_size": 8, "generations": 4,
                                   "seed": 9, "penalty_weight": 0.01}))
        out = str(tmp_path / "m.json")
        assert main(["train", "--data", csv_path, "--ga-config", str(cfg),
                     "--generations", "3", "--folds", "4", "--out", out]) == 0
        ga = json.loads(open(out).read())["config"]["ga"]
        assert ga["population_size"] == 8      # from the file
        assert ga["generations"] == 3          # flag overrides the file
        assert ga["seed"] == 9
        assert ga["penalty_weight"] == 0.01

    def test_ga_config_file_rejects_unknown_keys(self, csv_path, tmp_path, capsys):
        cfg = tmp_path / "ga.json"
        cfg.write_text(json.dumps({"pop": 8}))
        code = main(["train", "--data", csv_path, "--ga-config", str(cfg),
                     "--out", str(tmp_path / "m.json")])
        assert code == 2
        assert "unknown keys" in capsys.readouterr().err


class TestEval:
    def test_writes_summary_and_sweep(self, model_path, csv_path, tmp_path, capsys):
        outdir = str(tmp_path / "results")
        assert main(["eval", "--model", model_path, "--data", csv_path,
                     "--out", outdir]) == 0
        summary = json.loads(open(os.path.join(outdir, "summary.json")).read())
        assert 0.0 <= summary["accuracy"] <= 1.0
        assert summary["config"]["model"] == model_path
        lines = open(os.path.join(outdir, "sweep.csv")).read().splitlines()
        assert lines[0].startswith("# config:")
        rows = list(csv.DictReader(lines[1:]))
        assert len(rows) == 19  # default grid
        assert list(rows[0]) == ["significance", "mean_set_size", "std_set_size",
                                 "nonempty_frac", "coverage", "mean_rule_f1"]

    def test_single_significance_gives_one_row(self, model_path, csv_path, tmp_path):
        outdir = str(tmp_path / "one")
        assert main(["eval", "--model", model_path, "--data", csv_path,
                     "--significance", "0.1", "--out", outdir]) == 0
        lines = open(os.path.join(outdir, "sweep.csv")).read().splitlines()
        assert len(list(csv.DictReader(lines[1:]))) == 1

    def test_custom_grid(self, model_path, csv_path, tmp_path):
        outdir = str(tmp_path / "grid")
        assert main(["eval", "--model", model_path, "--data", csv_path,
                     "--grid", "0.1,0.5,0.9", "--out", outdir]) == 0
        lines = open(os.path.join(outdir, "sweep.csv")).read().splitlines()
        rows = list(csv.DictReader(lines[1:]))
        assert [r["significance"] for r in rows] == ["0.1", "0.5", "0.9"]

    def test_schema_mismatch_exits_2(self, model_path, tmp_path):
        bad = tmp_path / "narrow.csv"
        bad.write_text("f0,label\n0.1,a\n0.9,b\n")
        code = main(["eval", "--model", model_path, "--data", str(bad),
                     "--out", str(tmp_path / "x")])
        assert code == 2
        assert not os.path.exists(tmp_path / "x" / "sweep.csv")


class TestPredict:
    def test_jsonl_rows(self, model_path, csv_path, capsys):
        assert main(["predict", "--model", model_path, "--data", csv_path,
                     "--significance", "0.1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        records = [json.loads(line) for line in lines]
        assert len(records) == 120
        for rec in records[:20]:
            assert set(rec) >= {"row", "winner", "prediction_set", "rules",
                                "class_scores", "significance"}
            if rec["winner"] is not None and rec["prediction_set"]:
                assert rec["winner"] in rec["prediction_set"]
            assert all(isinstance(r, int) for r in rec["rules"])

    def test_high_significance_can_empty_sets(self, model_path, csv_path, capsys):
        assert main(["predict", "--model", model_path, "--data", csv_path,
                     "--significance", "0.99"]) == 0
        records = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
        assert any(rec["prediction_set"] == [] for rec in records)

    def test_feature_only_csv(self, model_path, csv_path, tmp_path, capsys):
        rows = open(csv_path).read().splitlines()
        header = rows[0].split(",")[:-1]
        stripped = tmp_path / "features.csv"
        stripped.write_text("\n".join(
            [",".join(header)] + [",".join(r.split(",")[:-1]) for r in rows[1:]]) + "\n")
        assert main(["predict", "--model", model_path, "--data", str(stripped)]) == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 120
