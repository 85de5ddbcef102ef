"""Window-to-graph preprocessing: instance normalization, patching,
seasonal/trend split, node assembly, and the embedding map."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, DimensionError

STD_FLOOR = 1e-5


@dataclass(frozen=True)
class TimeSeriesWindow:
    """One (T, N) slice of the series plus the index of its first row."""

    values: np.ndarray
    t_index: int = 0


@dataclass(frozen=True)
class NormStats:
    """Per-variable mean and (floored) standard deviation of one window."""

    mean: np.ndarray
    std: np.ndarray


@dataclass(frozen=True)
class PatchConfig:
    p: int
    s: int
    j: int

    @classmethod
    def for_window(cls, t: int, p: int, s: int) -> "PatchConfig":
        if p > t:
            raise ConfigError(f"patch length {p} exceeds window length {t}")
        if not 1 <= s <= p:
            raise ConfigError(f"stride must satisfy 1 <= s <= p, got s={s}, p={p}")
        return cls(p=p, s=s, j=(t - p) // s + 2)


def patch_count(t: int, p: int, s: int) -> int:
    return PatchConfig.for_window(t, p, s).j


def normalize(window):
    """Standardize each variable over the window; returns (normalized, stats).

    Accepts a TimeSeriesWindow or a bare (T, N) array and returns the same
    kind. Stds below 1e-5 are floored there, so constant columns map to
    zero and denormalize still restores them exactly.
    """
    wrapped = isinstance(window, TimeSeriesWindow)
    values = np.asarray(window.values if wrapped else window, dtype=np.float64)
    if values.ndim != 2:
        raise DimensionError(f"window must be 2-D, got shape {values.shape}")
    mean = values.mean(axis=0)
    std = np.maximum(values.std(axis=0), STD_FLOOR)
    normalized = (values - mean) / std
    stats = NormStats(mean=mean, std=std)
    if wrapped:
        return TimeSeriesWindow(normalized, window.t_index), stats
    return normalized, stats


def denormalize(y: np.ndarray, stats: NormStats) -> np.ndarray:
    """Invert normalize: y * std + mean, row-wise."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != stats.mean.shape[0]:
        raise DimensionError(
            f"expected (*, {stats.mean.shape[0]}) matrix, got {y.shape}"
        )
    return y * stats.std + stats.mean


def patch(values: np.ndarray, p: int, s: int) -> np.ndarray:
    """Cut a (T, N) window into J = floor((T-p)/s) + 2 patches of length p.

    The window is first extended by repeating its last s rows so the final
    patch is fully defined. Patch j covers rows s*j .. s*j + p - 1 of the
    extended series. Returns a (J, p, N) tensor.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise DimensionError(f"window must be 2-D, got shape {values.shape}")
    cfg = PatchConfig.for_window(values.shape[0], p, s)
    extended = np.concatenate([values, values[-s:]], axis=0)
    return np.stack([extended[s * j : s * j + p] for j in range(cfg.j)])


@dataclass(frozen=True)
class ComponentPair:
    seasonal: np.ndarray
    trend: np.ndarray


def series_decomp(x: np.ndarray, kernel: int) -> ComponentPair:
    """Additive split of (J, p, N) patches into trend and seasonal parts.

    Trend is a centered moving average of size ``kernel`` along the
    patch-time axis with replicate padding at both ends; seasonal is the
    residual, so seasonal + trend reconstructs the input exactly.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise DimensionError(f"expected (J, p, N) tensor, got shape {x.shape}")
    p = x.shape[1]
    if kernel % 2 == 0:
        raise ConfigError(f"moving-average kernel must be odd, got {kernel}")
    if not 1 <= kernel <= p:
        raise ConfigError(f"kernel must satisfy 1 <= kernel <= p={p}, got {kernel}")
    trend = kernels.trend_moving_average(x, kernel)
    return ComponentPair(seasonal=x - trend, trend=trend)


def default_decomp_kernel(p: int, preferred: int = 25) -> int:
    """Largest odd kernel <= min(preferred, p)."""
    k = min(preferred, p)
    return k if k % 2 == 1 else k - 1


def assemble_hyperpatch(component: np.ndarray) -> np.ndarray:
    """Flatten (J, p, N) patches into the (J*N, p) node matrix.

    Row j*N + v holds patch j of variable v. The layout is load-bearing
    for the per-variable feature gather later in the pipeline.
    """
    component = np.asarray(component, dtype=np.float64)
    if component.ndim != 3:
        raise DimensionError(f"expected (J, p, N) tensor, got {component.shape}")
    j, p_len, n = component.shape
    return np.ascontiguousarray(
        component.transpose(0, 2, 1).reshape(j * n, p_len))


def disassemble_hyperpatch(nodes: np.ndarray, j: int, n: int) -> np.ndarray:
    """Inverse of assemble_hyperpatch: (J*N, p) back to (J, p, N)."""
    nodes = np.asarray(nodes, dtype=np.float64)
    if nodes.ndim != 2 or nodes.shape[0] != j * n:
        raise DimensionError(f"expected ({j * n}, p) matrix, got {nodes.shape}")
    return nodes.reshape(j, n, -1).transpose(0, 2, 1)


def embed(raw: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map raw @ weights + bias applied to every node row."""
    raw = np.asarray(raw, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if raw.ndim != 2 or weights.ndim != 2 or raw.shape[1] != weights.shape[0]:
        raise DimensionError(
            f"cannot multiply {raw.shape} by {weights.shape}"
        )
    if bias.shape != (weights.shape[1],):
        raise DimensionError(
            f"bias shape {bias.shape} does not match width {weights.shape[1]}"
        )
    return raw @ weights + bias
