import json

import pytest
from click.testing import CliRunner

from latent_shift_lab.cli import cli

SMALL_SCM = {"d_c": 1, "d_s": 1, "d_x": 2, "n_domains": 5, "samples_per_domain": 80}


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, *args):
    result = runner.invoke(cli, list(args))
    payload = json.loads(result.stdout) if result.exit_code == 0 else None
    return result, payload


def _write_config(tmp_path, document: dict):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(document))
    return str(path)


class TestGenerate:
    def test_benchmark_defaults(self, runner, tmp_path):
        result, payload = _run(runner, "generate", "--seed", "3", "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        assert payload["per_domain_counts"] == {str(u): 1000 for u in range(5)}
        assert payload["target_domain"] == 4
        assert payload["variability_singular"] is False
        assert (tmp_path / "dataset.csv").exists()
        assert (tmp_path / "dataset.latents.csv").exists()

    def test_rerun_is_byte_identical(self, runner, tmp_path):
        config = _write_config(tmp_path, {"scm": SMALL_SCM})
        _run(runner, "generate", "--config", config, "--seed", "9", "--out", str(tmp_path / "a"))
        _run(runner, "generate", "--config", config, "--seed", "9", "--out", str(tmp_path / "b"))
        for name in ("dataset.csv", "dataset.latents.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_missing_field_exits_with_config_error(self, runner, tmp_path):
        config = _write_config(tmp_path, {"scm": {"d_c": 1, "d_s": 1, "d_x": 2, "n_domains": 5}})
        result = runner.invoke(cli, ["generate", "--config", config])
        assert result.exit_code == 2
        assert "scm.samples_per_domain" in result.stderr

    def test_unknown_key_exits_with_config_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["generate", "--config", _write_config(tmp_path, {"sed": 1})])
        assert result.exit_code == 2
        assert "sed" in result.stderr

    def test_unreadable_config_exits_with_io_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["generate", "--config", str(tmp_path / "absent.json")])
        assert result.exit_code == 4


class TestTrainAndEvaluate:
    def test_train_then_evaluate(self, runner, tmp_path):
        config = _write_config(tmp_path, {
            "scm": SMALL_SCM,
            "train": {"epochs": 2, "batch_size": 64, "eval_every": 1},
            "model": {"hidden_units": 6},
        })
        result, payload = _run(runner, "train", "--config", config, "--seed", "1", "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        assert payload["epochs"] == 2
        assert len((tmp_path / "history.jsonl").read_text().splitlines()) == 2

        result, payload = _run(runner, "evaluate", "--config", config, "--seed", "1", "--out", str(tmp_path),
                               "--checkpoint", str(tmp_path / "checkpoint.json"))
        assert result.exit_code == 0, result.output
        assert 0.0 <= payload["report"]["mcc"] <= 1.0
        assert (tmp_path / "metrics.json").exists()

    def test_evaluate_without_checkpoint(self, runner, tmp_path):
        result = runner.invoke(cli, ["evaluate", "--out", str(tmp_path)])
        assert result.exit_code == 2


class TestOtherCommands:
    def test_gradcheck_passes(self, runner, tmp_path):
        result, payload = _run(runner, "gradcheck", "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        assert payload["passed"]
        assert all(err < 1e-4 for err in payload["ops"].values())
        assert set(payload["losses"]) == {"elbo", "mi", "entropy", "objective"}

    def test_counterexample_report(self, runner, tmp_path):
        result, payload = _run(runner, "counterexample", "--seed", "2", "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        assert payload["report"]["max_abs_difference"] <= 1e-9
        assert payload["report"]["equivalent"] is True

    def test_resample(self, runner, tmp_path):
        config = _write_config(tmp_path, {
            "scm": {**SMALL_SCM, "samples_per_domain": 600},
            "resample": {"target_kl": 0.0, "n_classes": 3},
        })
        result, payload = _run(runner, "resample", "--config", config, "--seed", "4", "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        assert payload["max_residual"] == 0.0
        assert (tmp_path / "resampled.csv").exists()
        assert json.loads((tmp_path / "marginals.json").read_text())["distributions"]

    def test_resample_without_target(self, runner, tmp_path):
        result = runner.invoke(cli, ["resample", "--out", str(tmp_path)])
        assert result.exit_code == 2
