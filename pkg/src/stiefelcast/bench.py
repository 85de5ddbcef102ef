"""Benchmarks: node-count scaling of the dynamic-graph solve, and the
numba-vs-numpy lane comparison for the hot kernels."""

import time

import numpy as np

from . import kernels
from .backend import HAVE_NUMBA, active_backend
from .ldgosm import DynamicGraphInput, ldgosm_solve


def _median_time(fn, repeats: int) -> float:
    fn()  # warm up (JIT compilation, allocator, caches)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def scaling_bench(sizes, d: int = 32, repeats: int = 5, seed: int = 0):
    """Median solve time per node count; returns (rows, slope) where rows
    are (n, median_seconds) and slope is the log-log least squares fit."""
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("node counts must be ascending")
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        x = rng.standard_normal((n, d))
        inp = DynamicGraphInput(x)
        rows.append((n, _median_time(lambda: ldgosm_solve(inp), repeats)))
    ns = np.array([r[0] for r in rows], dtype=float)
    ts = np.array([r[1] for r in rows], dtype=float)
    if len(rows) >= 2:
        slope = float(np.polyfit(np.log(ns), np.log(ts), 1)[0])
    else:
        slope = float("nan")
    return rows, slope


def backend_bench(repeats: int = 20, seed: int = 0):
    """Per-kernel median times for the numpy lane and, when available, the
    numba lane. Returns rows of (kernel, lane, median_seconds)."""
    rng = np.random.default_rng(seed)
    x3 = rng.standard_normal((24, 16, 8))
    xe = rng.standard_normal((192, 128))
    p = rng.standard_normal((128, 128))
    g = rng.standard_normal((2, 128, 128))
    pred = rng.standard_normal((96, 8))
    target = rng.standard_normal((96, 8))
    vec = rng.standard_normal(50_000)
    grad = rng.standard_normal(50_000)
    m1 = np.zeros_like(vec)
    m2 = np.zeros_like(vec)

    cases = {
        "trend_moving_average": (
            lambda f: f(x3, 7),
            kernels.trend_moving_average_numpy,
            getattr(kernels, "trend_moving_average_numba", None),
        ),
        "ldgosm_core": (
            lambda f: f(xe, np.maximum(xe, 0.0), 1e-8),
            kernels.ldgosm_core_numpy,
            getattr(kernels, "ldgosm_core_numba", None),
        ),
        "spectral_chain_forward": (
            lambda f: f(p, g),
            kernels.spectral_chain_forward_numpy,
            getattr(kernels, "spectral_chain_forward_numba", None),
        ),
        "mae_and_sign": (
            lambda f: f(pred, target),
            kernels.mae_and_sign_numpy,
            getattr(kernels, "mae_and_sign_numba", None),
        ),
        "adam_step": (
            lambda f: f(vec, grad, m1, m2, 1, 1e-4, 0.9, 0.999, 1e-8),
            kernels.adam_step_numpy,
            getattr(kernels, "adam_step_numba", None),
        ),
    }
    rows = []
    for name, (call, numpy_fn, numba_fn) in cases.items():
        rows.append((name, "numpy", _median_time(lambda: call(numpy_fn), repeats)))
        if HAVE_NUMBA and numba_fn is not None:
            rows.append((name, "numba", _median_time(lambda: call(numba_fn), repeats)))
    return rows


def write_scaling_csv(path, rows, slope) -> None:
    lines = ["n,median_seconds"]
    lines += [f"{n},{t:.9f}" for n, t in rows]
    lines.append(f"# log-log slope: {slope:.4f}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_backend_csv(path, rows) -> None:
    lines = ["kernel,lane,median_seconds"]
    lines += [f"{name},{lane},{t:.9f}" for name, lane, t in rows]
    lines.append(f"# active lane: {active_backend()}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
