import json
import subprocess
import sys

import pytest

from silvertrain.cli import main, variant_name
from silvertrain.corpus import dedup, load_jsonl

TRAIN_FLAGS = ["--eval-every-steps", "40", "--seed", "5"]


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAugmentCommand:
    def test_writes_output_and_summary(self, corpus_files, capsys):
        out = corpus_files["dir"] / "aug.jsonl"
        code, stdout, _ = run_cli(
            ["augment", "--in", str(corpus_files["train"]), "--out", str(out), "--seed", "1"],
            capsys,
        )
        assert code == 0
        assert out.exists()
        assert "anonymize" in stdout and "final" in stdout
        augmented = load_jsonl(out, "train")
        assert len(augmented) >= len(load_jsonl(corpus_files["train"], "train"))

    def test_fraction_zero_equals_dedup_of_input(self, corpus_files, capsys):
        out = corpus_files["dir"] / "aug0.jsonl"
        code, _, _ = run_cli(
            ["augment", "--in", str(corpus_files["train"]), "--out", str(out), "--fraction", "0"],
            capsys,
        )
        assert code == 0
        original = load_jsonl(corpus_files["train"], "train")
        deduped, _ = dedup(original)
        assert load_jsonl(out, "train").ids() == deduped.ids()

    def test_missing_input_nonzero_exit_names_path(self, corpus_files, capsys):
        code, _, stderr = run_cli(
            ["augment", "--in", str(corpus_files["dir"] / "nope.jsonl"), "--out", "x.jsonl"],
            capsys,
        )
        assert code != 0
        assert "nope.jsonl" in stderr

    def test_json_summary(self, corpus_files, capsys):
        out = corpus_files["dir"] / "augj.jsonl"
        code, stdout, _ = run_cli(
            ["augment", "--in", str(corpus_files["train"]), "--out", str(out), "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(stdout)
        assert set(payload["per_technique"]) == {"anonymize", "lowercase", "uppercase", "homoglyph"}

    def test_rerun_overwrites_identically(self, corpus_files, capsys):
        out = corpus_files["dir"] / "rerun.jsonl"
        argv = ["augment", "--in", str(corpus_files["train"]), "--out", str(out), "--seed", "6"]
        assert run_cli(argv, capsys)[0] == 0
        first = out.read_bytes()
        assert run_cli(argv, capsys)[0] == 0
        assert out.read_bytes() == first


class TestSplitCommand:
    def test_split_sizes(self, corpus_files, capsys):
        out_train = corpus_files["dir"] / "sp_train.jsonl"
        out_holdout = corpus_files["dir"] / "sp_holdout.jsonl"
        code, stdout, _ = run_cli(
            [
                "split",
                "--in", str(corpus_files["gold"]),
                "--out-train", str(out_train),
                "--out-holdout", str(out_holdout),
                "--per-class", "10",
                "--seed", "2",
            ],
            capsys,
        )
        assert code == 0
        assert len(load_jsonl(out_holdout, "holdout")) == 20
        assert len(load_jsonl(out_train, "train")) == 180


class TestTrainPredictEvalSweep:
    @pytest.fixture
    def trained_model(self, corpus_files, capsys):
        model_path = corpus_files["dir"] / "model.npz"
        code, _, _ = run_cli(
            [
                "train",
                "--train", str(corpus_files["train"]),
                "--valid", str(corpus_files["holdout"]),
                "--out-model", str(model_path),
                *TRAIN_FLAGS,
            ],
            capsys,
        )
        assert code == 0 and model_path.exists()
        return model_path

    def test_train_writes_log(self, corpus_files, capsys):
        model_path = corpus_files["dir"] / "m2.npz"
        log_path = corpus_files["dir"] / "log.json"
        code, stdout, _ = run_cli(
            [
                "train",
                "--train", str(corpus_files["train"]),
                "--valid", str(corpus_files["holdout"]),
                "--out-model", str(model_path),
                "--out-log", str(log_path),
                "--json",
                *TRAIN_FLAGS,
            ],
            capsys,
        )
        assert code == 0
        log = json.loads(log_path.read_text())
        assert log["entries"] and log["selected_step"] >= 1
        assert json.loads(stdout)["best_macro_f1"] >= 0.9

    def test_predict_and_eval(self, corpus_files, trained_model, capsys):
        preds = corpus_files["dir"] / "preds.jsonl"
        code, _, _ = run_cli(
            ["predict", "--model", str(trained_model), "--in", str(corpus_files["pool"]),
             "--out", str(preds), "--threshold", "0.7"],
            capsys,
        )
        assert code == 0
        rows = [json.loads(line) for line in preds.read_text().splitlines()]
        assert len(rows) == 60
        assert all(r["label"] in ("Yes", "No") for r in rows)

        code, stdout, _ = run_cli(
            ["eval", "--model", str(trained_model), "--in", str(corpus_files["holdout"]),
             "--threshold", "0.7", "--name", "native"],
            capsys,
        )
        assert code == 0
        assert "native_th0.7" in stdout

    def test_eval_json_report(self, corpus_files, trained_model, capsys):
        code, stdout, _ = run_cli(
            ["eval", "--model", str(trained_model), "--in", str(corpus_files["holdout"]), "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(stdout)
        assert 0.0 <= payload["macro_f1"] <= 1.0
        assert payload["variant"] == "model"

    def test_eval_predictions_file_mode(self, corpus_files, trained_model, capsys):
        preds = corpus_files["dir"] / "hpreds.jsonl"
        run_cli(
            ["predict", "--model", str(trained_model), "--in", str(corpus_files["holdout"]),
             "--out", str(preds)],
            capsys,
        )
        code, stdout, _ = run_cli(
            ["eval", "--preds", str(preds), "--in", str(corpus_files["holdout"]), "--json"],
            capsys,
        )
        assert code == 0
        assert json.loads(stdout)["macro_f1"] >= 0.9

    def test_eval_missing_prediction_ids_listed(self, corpus_files, trained_model, capsys):
        preds = corpus_files["dir"] / "short_preds.jsonl"
        preds.write_text('{"id": "gold-00001", "label": "Yes"}\n', encoding="utf-8")
        code, _, stderr = run_cli(
            ["eval", "--preds", str(preds), "--in", str(corpus_files["holdout"])],
            capsys,
        )
        assert code != 0
        assert "missing ids" in stderr

    def test_sweep(self, corpus_files, trained_model, capsys):
        code, stdout, _ = run_cli(
            ["sweep", "--model", str(trained_model), "--valid", str(corpus_files["holdout"]),
             "--grid", "0.3,0.5,0.7", "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["best_threshold"] in (0.3, 0.5, 0.7)
        assert len(payload["reports"]) == 3


class TestSelftrainCommand:
    def test_full_loop_outputs(self, corpus_files, capsys):
        model_path = corpus_files["dir"] / "st.npz"
        silver_path = corpus_files["dir"] / "silver.jsonl"
        log_path = corpus_files["dir"] / "prov.json"
        code, stdout, _ = run_cli(
            [
                "selftrain",
                "--train", str(corpus_files["train"]),
                "--valid", str(corpus_files["holdout"]),
                "--pool", str(corpus_files["pool"]),
                "--out-model", str(model_path),
                "--out-silver", str(silver_path),
                "--out-log", str(log_path),
                *TRAIN_FLAGS,
            ],
            capsys,
        )
        assert code == 0
        assert model_path.exists() and silver_path.exists()
        prov = json.loads(log_path.read_text())
        assert prov["rounds"][0]["round"] == 1
        silver = [json.loads(line) for line in silver_path.read_text().splitlines()]
        hidden = corpus_files["hidden"]
        assert silver, "separable corpus should produce silver labels"
        assert all(hidden[r["id"]] == r["assigned"] for r in silver)

    def test_empty_pool_is_plain_training(self, corpus_files, capsys):
        empty_pool = corpus_files["dir"] / "empty.jsonl"
        empty_pool.write_text("", encoding="utf-8")
        model_path = corpus_files["dir"] / "st_empty.npz"
        silver_path = corpus_files["dir"] / "silver_empty.jsonl"
        code, stdout, _ = run_cli(
            [
                "selftrain",
                "--train", str(corpus_files["train"]),
                "--valid", str(corpus_files["holdout"]),
                "--pool", str(empty_pool),
                "--out-model", str(model_path),
                "--out-silver", str(silver_path),
                "--json",
                *TRAIN_FLAGS,
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["silver_total"] == 0
        assert silver_path.read_text() == ""

    def test_unreachable_remote_backend(self, corpus_files, capsys):
        code, _, stderr = run_cli(
            [
                "selftrain",
                "--train", str(corpus_files["train"]),
                "--valid", str(corpus_files["holdout"]),
                "--pool", str(corpus_files["pool"]),
                "--out-silver", str(corpus_files["dir"] / "s.jsonl"),
                "--backend", "remote",
                "--backend-url", "http://127.0.0.1:9",
            ],
            capsys,
        )
        assert code != 0
        assert "unreachable" in stderr


class TestConfigFile:
    def test_config_values_used_and_flags_win(self, corpus_files, capsys):
        cfg_path = corpus_files["dir"] / "pipeline.ini"
        cfg_path.write_text(
            "[augment]\nfraction = 0.5\nseed = 4\n\n[decision]\nthreshold = 0.7\n",
            encoding="utf-8",
        )
        out = corpus_files["dir"] / "aug_cfg.jsonl"
        code, stdout, _ = run_cli(
            ["augment", "--config", str(cfg_path), "--in", str(corpus_files["train"]),
             "--out", str(out), "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(stdout)
        # fraction 0.5 of the 160 train samples copied per technique
        assert payload["per_technique"]["anonymize"]["sampled"] == 80

        out2 = corpus_files["dir"] / "aug_cfg2.jsonl"
        code, stdout, _ = run_cli(
            ["augment", "--config", str(cfg_path), "--in", str(corpus_files["train"]),
             "--out", str(out2), "--fraction", "0.1", "--json"],
            capsys,
        )
        payload = json.loads(stdout)
        assert payload["per_technique"]["anonymize"]["sampled"] == 16  # flag wins

    def test_unknown_config_key_rejected(self, corpus_files, capsys):
        cfg_path = corpus_files["dir"] / "bad.ini"
        cfg_path.write_text("[augment]\nfractoin = 0.5\n", encoding="utf-8")
        code, _, stderr = run_cli(
            ["augment", "--config", str(cfg_path), "--in", str(corpus_files["train"]),
             "--out", "o.jsonl"],
            capsys,
        )
        assert code != 0
        assert "fractoin" in stderr

    def test_missing_config_file(self, corpus_files, capsys):
        code, _, stderr = run_cli(
            ["augment", "--config", str(corpus_files["dir"] / "ghost.ini"),
             "--in", str(corpus_files["train"]), "--out", "o.jsonl"],
            capsys,
        )
        assert code != 0
        assert "ghost.ini" in stderr


def test_variant_name_convention():
    assert variant_name("native", 0.5) == "native"
    assert variant_name("native", 0.7) == "native_th0.7"
    assert variant_name("native_ST", 0.7) == "native_ST_th0.7"


def test_console_script_entry_point(corpus_files):
    result = subprocess.run(
        [sys.executable, "-m", "silvertrain.cli", "split",
         "--in", str(corpus_files["gold"]),
         "--out-train", str(corpus_files["dir"] / "t.jsonl"),
         "--out-holdout", str(corpus_files["dir"] / "h.jsonl"),
         "--per-class", "5"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    assert "split 200 samples" in result.stdout
