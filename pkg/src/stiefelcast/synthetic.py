"""Deterministic synthetic series for tests and self-contained benchmark runs.

The benchmark surrogate mimics the shape of a daily financial panel
(8 variables, 7588 steps): slow random walks with cross-variable coupling
plus periodic structure a forecaster can actually learn, so accuracy
bounds and the repeat-last-value baseline are both meaningful.
"""

import numpy as np

BENCHMARK_ROWS = 7588
BENCHMARK_COLS = 8
BENCHMARK_NAME = "exchange_rate_surrogate"


def make_two_sine_toy(rows: int, n_vars: int = 3, seed: int = 7) -> np.ndarray:
    """Sum of two incommensurate sines per variable plus mild noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(rows)[:, None]
    phase = rng.uniform(0, 2 * np.pi, size=(2, n_vars))
    amp = rng.uniform(0.6, 1.2, size=(2, n_vars))
    values = (
        amp[0] * np.sin(2 * np.pi * t / 16.0 + phase[0])
        + amp[1] * np.sin(2 * np.pi * t / 29.0 + phase[1])
        + 0.02 * rng.standard_normal((rows, n_vars))
    )
    return values


def make_benchmark_series(rows: int = BENCHMARK_ROWS, cols: int = BENCHMARK_COLS,
                          seed: int = 20240) -> np.ndarray:
    """Surrogate panel: coupled random walks + two seasonal tones + AR noise.

    The walks dominate total variance, so train-split standardization puts
    step-to-step changes on the scale of a slowly drifting currency panel;
    the periodic terms give a forecaster structure the repeat-last-value
    baseline cannot track over a long horizon.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(rows)[:, None]

    own = np.cumsum(rng.standard_normal((rows, cols)), axis=0)
    shared = np.cumsum(rng.standard_normal((rows, 1)), axis=0)
    walk = 0.06 * (np.sqrt(1.0 - 0.25) * own + 0.5 * shared)

    periods = rng.uniform(18.0, 40.0, size=cols)
    periods2 = rng.uniform(50.0, 90.0, size=cols)
    phase = rng.uniform(0, 2 * np.pi, size=(2, cols))
    seasonal = (
        0.40 * np.sin(2 * np.pi * t / periods + phase[0])
        + 0.25 * np.sin(2 * np.pi * t / periods2 + phase[1])
    )

    ar = np.zeros((rows, cols))
    eps = 0.04 * rng.standard_normal((rows, cols))
    for i in range(1, rows):
        ar[i] = 0.9 * ar[i - 1] + eps[i]

    return walk + seasonal + ar


def write_csv(values: np.ndarray, path, header: bool = True) -> None:
    cols = values.shape[1]
    head = ",".join(f"v{i}" for i in range(cols)) if header else ""
    np.savetxt(path, values, delimiter=",", header=head, comments="",
               fmt="%.10f")


def _main(argv=None):
    import argparse

    parser = argparse.ArgumentParser(
        description="write a deterministic synthetic series as CSV")
    parser.add_argument("out", help="output CSV path")
    parser.add_argument("--rows", type=int, default=BENCHMARK_ROWS)
    parser.add_argument("--cols", type=int, default=BENCHMARK_COLS)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--kind", choices=("benchmark", "sines"),
                        default="benchmark")
    args = parser.parse_args(argv)
    if args.kind == "benchmark":
        seed = 20240 if args.seed is None else args.seed
        values = make_benchmark_series(args.rows, args.cols, seed=seed)
    else:
        seed = 7 if args.seed is None else args.seed
        values = make_two_sine_toy(args.rows, args.cols, seed=seed)
    write_csv(values, args.out)
    print(f"wrote {args.out} ({values.shape[0]} x {values.shape[1]})")


if __name__ == "__main__":
    _main()
