import json

import numpy as np
import pytest

from stiefelcast.cli import main
from stiefelcast.synthetic import make_two_sine_toy, write_csv


@pytest.fixture(scope="module")
def toy_run(tmp_path_factory):
    """Tiny dataset + run config shared by the CLI smoke tests."""
    root = tmp_path_factory.mktemp("cli")
    data_path = root / "toy.csv"
    write_csv(make_two_sine_toy(260, n_vars=3), data_path)
    config = {
        "model": {
            "t": 16, "horizon": 4, "p": 4, "s": 4, "k": 8, "d": 8, "m": 2,
            "learning_rate": 1e-3, "epochs": 2, "batch_size": 16, "seed": 11,
        },
        "data": {"path": str(data_path), "train_stride": 2},
        "output_dir": str(root / "out"),
    }
    config_path = root / "run.json"
    config_path.write_text(json.dumps(config))
    return root, config_path, config


def test_missing_dataset_exits_2(tmp_path, capsys):
    cfg = {
        "model": {"t": 16, "horizon": 4, "p": 4, "s": 4, "k": 8, "d": 8},
        "data": {"path": str(tmp_path / "nope.csv")},
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["train", "--config", str(path)]) == 2
    assert "nope.csv" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"model": {}, "data": {"path": "x"}, "oops": 1}))
    assert main(["train", "--config", str(path)]) == 2
    assert "oops" in capsys.readouterr().err


def test_train_writes_artifacts_and_is_reproducible(toy_run):
    root, config_path, config = toy_run
    out = root / "out"
    assert main(["train", "--config", str(config_path)]) == 0
    for name in ("model.ckpt", "history.json", "run_manifest.json"):
        assert (out / name).exists()
    history_first = (out / "history.json").read_bytes()
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["seed"] == 11
    assert manifest["model"]["t"] == 16

    out2 = root / "out2"
    assert main(["train", "--config", str(config_path),
                 "--output", str(out2)]) == 0
    assert (out2 / "history.json").read_bytes() == history_first


def test_evaluate_is_deterministic(toy_run):
    root, config_path, _ = toy_run
    ckpt = root / "out" / "model.ckpt"
    e1 = root / "eval1"
    e2 = root / "eval2"
    for out in (e1, e2):
        assert main(["evaluate", "--config", str(config_path),
                     "--checkpoint", str(ckpt), "--output", str(out)]) == 0
    assert (e1 / "evaluation.json").read_bytes() == (e2 / "evaluation.json").read_bytes()
    report = json.loads((e1 / "evaluation.json").read_text())
    for key in ("dataset", "horizon", "mse", "mae", "window_count",
                "persistence_mse", "persistence_mae"):
        assert key in report
    assert report["window_count"] > 0


def test_predict_writes_forecast(toy_run):
    root, config_path, _ = toy_run
    ckpt = root / "out" / "model.ckpt"
    out = root / "pred"
    assert main(["predict", "--config", str(config_path),
                 "--checkpoint", str(ckpt), "--output", str(out)]) == 0
    payload = json.loads((out / "predictions.json").read_text())
    y = np.asarray(payload["y"])
    assert y.shape == (4, 3)
    assert np.all(np.isfinite(y))


def test_evaluate_memorizing_model_scores_zero():
    # constant series + zero weights: prediction collapses to the window
    # mean, which equals the constant target exactly
    from stiefelcast.cli import evaluate_checkpoint
    from stiefelcast.data import Dataset, SplitSpec
    from stiefelcast.model import ModelConfig, ModelParams

    cfg = ModelConfig(t=16, horizon=4, n_vars=2, p=4, s=4, k=8, d=8, m=2)
    ds = Dataset("const", np.full((120, 2), 3.0))
    report = evaluate_checkpoint(cfg, ModelParams(cfg), ds, SplitSpec())
    assert report["mse"] == pytest.approx(0.0, abs=1e-20)
    assert report["mae"] == pytest.approx(0.0, abs=1e-12)


def test_verify_small_scale_passes(capsys):
    assert main(["verify", "--cases", "25", "--graphs", "5",
                 "--gradient-points", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6 and "FAIL" not in out


def test_bench_single_repeat_emits_csv(tmp_path):
    assert main(["bench", "--sizes", "64,128", "--dim", "8",
                 "--repeats", "1", "--output", str(tmp_path)]) == 0
    lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert lines[0] == "n,median_seconds"
    assert len(lines) == 4  # header + 2 rows + slope comment
    assert lines[-1].startswith("# log-log slope:")


def test_bench_kernels_compares_lanes(tmp_path):
    assert main(["bench", "--kernels", "--repeats", "2",
                 "--output", str(tmp_path)]) == 0
    text = (tmp_path / "kernels_bench.csv").read_text()
    assert "ldgosm_core,numpy" in text
