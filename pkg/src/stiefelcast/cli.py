"""Command-line entry point: train / evaluate / predict / verify / bench.

Run configuration is one JSON document; command-line flags override file
values and the effective configuration is echoed into the run manifest.
Exit codes: 0 success, 1 internal failure, 2 usage or config error.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__, bench as bench_mod, verify as verify_mod
from .backend import active_backend
from .checkpoint import load_checkpoint, save_checkpoint
from .data import (
    Dataset,
    SplitSpec,
    Standardizer,
    chronological_split,
    load_csv,
    load_manifest,
    metrics,
    persistence_forecast,
    sliding_windows,
)
from .errors import ConfigError, StiefelcastError
from .model import ModelConfig, forward, train

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

_RUN_KEYS = {"model", "data", "output_dir"}
_DATA_KEYS = {"path", "manifest", "split", "train_stride"}
_SPLIT_KEYS = {"train_frac", "val_frac", "test_frac"}


def load_run_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown run config keys: {sorted(unknown)}")
    if "model" not in cfg or "data" not in cfg:
        raise ConfigError("run config requires 'model' and 'data' sections")
    data = cfg["data"]
    unknown = set(data) - _DATA_KEYS
    if unknown:
        raise ConfigError(f"unknown data config keys: {sorted(unknown)}")
    if "path" not in data:
        raise ConfigError("data section requires 'path'")
    split = data.get("split")
    if split is not None:
        unknown = set(split) - _SPLIT_KEYS
        if unknown:
            raise ConfigError(f"unknown split keys: {sorted(unknown)}")
    return cfg


def _load_dataset(data_cfg: dict) -> Dataset:
    path = Path(data_cfg["path"])
    if not path.exists():
        raise ConfigError(f"dataset file not found: {path}")
    manifest = data_cfg.get("manifest")
    if isinstance(manifest, str):
        manifest = load_manifest(manifest)
    return load_csv(path, manifest)


def _split_spec(data_cfg: dict) -> SplitSpec:
    split = data_cfg.get("split")
    return SplitSpec(**split) if split else SplitSpec()


def _model_config(cfg: dict, n_vars: int, seed_override=None) -> ModelConfig:
    model_dict = dict(cfg["model"])
    declared = model_dict.setdefault("n_vars", n_vars)
    if declared != n_vars:
        raise ConfigError(
            f"config declares n_vars={declared} but dataset has {n_vars} columns"
        )
    if seed_override is not None:
        model_dict["seed"] = seed_override
    return ModelConfig.from_dict(model_dict)


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_train(args) -> int:
    cfg = load_run_config(args.config)
    out_dir = Path(args.output or cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    ds = _load_dataset(cfg["data"])
    train_raw, val_raw, _ = chronological_split(ds, _split_spec(cfg["data"]))
    scaler = Standardizer.fit(train_raw)
    config = _model_config(cfg, ds.cols, args.seed)

    params, history = train(
        config,
        scaler.apply(train_raw),
        scaler.apply(val_raw),
        train_stride=int(cfg["data"].get("train_stride", 1)),
    )

    save_checkpoint(params, config, out_dir / "model.ckpt")
    _write_json(out_dir / "history.json", history)
    _write_json(out_dir / "run_manifest.json", {
        "dataset": ds.name,
        "model": config.to_dict(),
        "split": vars(_split_spec(cfg["data"])),
        "train_stride": int(cfg["data"].get("train_stride", 1)),
        "seed": config.seed,
        "code_version": __version__,
        "backend": active_backend(),
    })
    print(f"trained {len(history)} epochs; wrote {out_dir}/model.ckpt")
    return EXIT_OK


def evaluate_checkpoint(config: ModelConfig, params, ds: Dataset,
                        split: SplitSpec, stride: int = 1,
                        workers: int = 1) -> dict:
    """Standardized-space test metrics plus the repeat-last-value baseline.

    Windows are independent, so evaluation may fan out over threads; the
    ordered reduction keeps the result identical for any worker count.
    """
    train_raw, _, test_raw = chronological_split(ds, split)
    scaler = Standardizer.fit(train_raw)
    pairs = sliding_windows(scaler.apply(test_raw), config.t, config.horizon,
                            stride=stride)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            preds = list(pool.map(
                lambda pair: forward(params, config, pair[0]).y, pairs))
    else:
        preds = [forward(params, config, w).y for w, _ in pairs]
    targets = [t for _, t in pairs]
    naive = [persistence_forecast(w, config.horizon) for w, _ in pairs]
    mse, mae = metrics(preds, targets)
    p_mse, p_mae = metrics(naive, targets)
    return {
        "dataset": ds.name,
        "horizon": config.horizon,
        "mse": mse,
        "mae": mae,
        "window_count": len(pairs),
        "persistence_mse": p_mse,
        "persistence_mae": p_mae,
    }


def cmd_evaluate(args) -> int:
    cfg = load_run_config(args.config)
    params, config = load_checkpoint(args.checkpoint)
    ds = _load_dataset(cfg["data"])
    report = evaluate_checkpoint(config, params, ds, _split_spec(cfg["data"]),
                                 stride=args.stride, workers=args.workers)
    out_dir = Path(args.output or cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "evaluation.json", report)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = load_run_config(args.config)
    params, config = load_checkpoint(args.checkpoint)
    ds = _load_dataset(cfg["data"])
    if ds.rows < config.t:
        raise ConfigError(
            f"dataset has {ds.rows} rows, need at least t={config.t} to predict"
        )
    train_raw, _, _ = chronological_split(ds, _split_spec(cfg["data"]))
    scaler = Standardizer.fit(train_raw)
    window = scaler.apply(ds.values[-config.t :])
    pred = scaler.invert(forward(params, config, window).y)
    out_dir = Path(args.output or cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "predictions.json", {
        "dataset": ds.name,
        "horizon": config.horizon,
        "from_row": ds.rows,
        "y": pred.tolist(),
    })
    print(f"wrote {out_dir}/predictions.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_mod.run_all(seed=args.seed or 0, cases=args.cases,
                                 graphs=args.graphs,
                                 gradient_points=args.gradient_points)
    failed = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        print(f"{tag} {r.name}: {r.detail}")
        failed += 0 if r.passed else 1
    if failed:
        print(f"{failed} verification suite(s) failed", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_bench(args) -> int:
    out_dir = Path(args.output or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kernels:
        rows = bench_mod.backend_bench(repeats=args.repeats,
                                       seed=args.seed or 0)
        path = out_dir / "kernels_bench.csv"
        bench_mod.write_backend_csv(path, rows)
        for name, lane, t in rows:
            print(f"{name:26s} {lane:6s} {t * 1e6:10.1f} us")
        print(f"wrote {path}")
        return EXIT_OK
    sizes = [int(s) for s in args.sizes.split(",")]
    rows, slope = bench_mod.scaling_bench(sizes, d=args.dim,
                                          repeats=args.repeats,
                                          seed=args.seed or 0)
    path = out_dir / "bench.csv"
    bench_mod.write_scaling_csv(path, rows, slope)
    for n, t in rows:
        print(f"n={n:6d}  median {t * 1e3:9.3f} ms")
    print(f"log-log slope: {slope:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


def _add_common(sp, config_required=False):
    sp.add_argument("--config", required=config_required,
                    help="path to the run config JSON")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the configured seed")
    sp.add_argument("--output", default=None, help="output directory")
    sp.add_argument("--workers", type=int, default=1,
                    help="worker count (1 keeps runs deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stiefelcast",
        description="Spatio-temporal forecasting with dynamic graph "
                    "spectral convolution on the Stiefel manifold",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("train", help="train a model and write a checkpoint")
    _add_common(sp, config_required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="evaluate a checkpoint on the test split")
    _add_common(sp, config_required=True)
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--stride", type=int, default=1,
                    help="test window stride")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("predict", help="forecast beyond the end of the dataset")
    _add_common(sp, config_required=True)
    sp.add_argument("--checkpoint", required=True)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("verify", help="run all correctness suites")
    _add_common(sp)
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--graphs", type=int, default=50)
    sp.add_argument("--gradient-points", type=int, default=10)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="scaling benchmark of the dynamic solve")
    _add_common(sp)
    sp.add_argument("--sizes", default="256,512,1024,2048")
    sp.add_argument("--dim", type=int, default=32)
    sp.add_argument("--repeats", type=int, default=5)
    sp.add_argument("--kernels", action="store_true",
                    help="compare numba and numpy kernel lanes instead")
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StiefelcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
