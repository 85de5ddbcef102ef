"""End-to-end forecaster: window -> patches -> seasonal/trend components ->
embedded hyperpatch nodes -> per-window dynamic spectral basis -> layered
spectral convolution -> per-variable feature concat -> affine head.

The spectral basis F is recomputed from the embedded features on every
forward pass but treated as a constant in reverse mode: gradients flow
through the transform applications, never through the eigendecompositions
that produced F.
"""

from dataclasses import dataclass, asdict

import numpy as np

from . import kernels
from .errors import ConfigError, DataError, DimensionError
from .ldgosm import DynamicGraphInput, ldgosm_solve
from .preprocess import (
    PatchConfig,
    TimeSeriesWindow,
    assemble_hyperpatch,
    denormalize,
    default_decomp_kernel,
    normalize,
    patch,
    series_decomp,
)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class ForecastOutput:
    """Forecast in the units of the model input, shape (horizon, N)."""

    y: np.ndarray


@dataclass(frozen=True)
class ModelConfig:
    t: int
    horizon: int
    n_vars: int
    p: int
    s: int
    k: int = 128
    d: int = 128
    m: int = 2
    decomp_kernel: int | None = None
    ridge: float | None = None
    learning_rate: float = 1e-4
    epochs: int = 10
    batch_size: int = 32
    patience: int = 5
    seed: int = 0

    def __post_init__(self):
        for name in ("t", "horizon", "n_vars", "p", "s", "k", "d", "m",
                     "epochs", "batch_size", "patience"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        PatchConfig.for_window(self.t, self.p, self.s)
        if self.k != self.d:
            raise ConfigError(
                f"k and d must match (the basis transform is square), "
                f"got k={self.k}, d={self.d}"
            )
        if self.d > self.n_nodes:
            raise ConfigError(
                f"d={self.d} exceeds node count J*N={self.n_nodes}; "
                f"shrink d or use smaller patch stride"
            )
        dk = self.resolved_decomp_kernel
        if dk % 2 == 0 or not 1 <= dk <= self.p:
            raise ConfigError(
                f"decomp_kernel must be odd and within [1, p={self.p}], got {dk}"
            )
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.ridge is not None and self.ridge < 0:
            raise ConfigError("ridge must be >= 0 or null for automatic")

    @property
    def j(self) -> int:
        return PatchConfig.for_window(self.t, self.p, self.s).j

    @property
    def n_nodes(self) -> int:
        return self.j * self.n_vars

    @property
    def resolved_decomp_kernel(self) -> int:
        if self.decomp_kernel is not None:
            return self.decomp_kernel
        return default_decomp_kernel(self.p)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        return cls(**d)


class ModelParams:
    """All trainable weights, stored as one flat float64 vector with
    structured views. Flat layout, in order:

        for component in (seasonal, trend):
            embed_w (p, K), embed_b (K,), kernel weights (m, n, K)
        head_w (2*J*K, horizon), head_b (horizon,)
    """

    def __init__(self, config: ModelConfig, flat: np.ndarray | None = None):
        p, k, m = config.p, config.k, config.m
        n, j, tau = config.n_nodes, config.j, config.horizon
        shapes = [
            ("embed_w", (2, p, k)),
            ("embed_b", (2, k)),
            ("kern_w", (2, m, n, k)),
            ("head_w", (2 * j * k, tau)),
            ("head_b", (tau,)),
        ]
        total = sum(int(np.prod(s)) for _, s in shapes)
        if flat is None:
            flat = np.zeros(total)
        else:
            flat = np.array(flat, dtype=np.float64).ravel()
            if flat.size != total:
                raise DimensionError(
                    f"flat vector has {flat.size} entries, config needs {total}"
                )
        self.config = config
        self.flat = flat
        offset = 0
        for name, shape in shapes:
            size = int(np.prod(shape))
            setattr(self, name, self.flat[offset : offset + size].reshape(shape))
            offset += size

    @property
    def size(self) -> int:
        return self.flat.size

    def to_flat(self) -> np.ndarray:
        return self.flat.copy()

    @classmethod
    def from_flat(cls, config: ModelConfig, vec: np.ndarray) -> "ModelParams":
        return cls(config, flat=vec)

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, flat=self.flat)


def init_params(config: ModelConfig, rng=None) -> ModelParams:
    """Uniform +-1/sqrt(fan_in) weights, zero biases."""
    rng = np.random.default_rng(config.seed) if rng is None else rng
    params = ModelParams(config)
    for c in range(2):
        bound = 1.0 / np.sqrt(config.p)
        params.embed_w[c] = rng.uniform(-bound, bound, params.embed_w[c].shape)
        bound = 1.0 / np.sqrt(config.n_nodes)
        params.kern_w[c] = rng.uniform(-bound, bound, params.kern_w[c].shape)
    bound = 1.0 / np.sqrt(params.head_w.shape[0])
    params.head_w[:] = rng.uniform(-bound, bound, params.head_w.shape)
    return params


def count_params(params: ModelParams) -> int:
    return params.size


def _window_values(window) -> np.ndarray:
    values = window.values if isinstance(window, TimeSeriesWindow) else window
    return np.ascontiguousarray(values, dtype=np.float64)


def compute_bases(params: ModelParams, config: ModelConfig, window) -> list:
    """The per-component spectral bases the forward pass would derive from
    the current parameters. Exposed so the bases can be frozen across
    parameter perturbations (the stop-gradient contract)."""
    _, cache = _forward_cache(params, config, window, bases=None)
    return cache["bases"]


def _forward_cache(params: ModelParams, config: ModelConfig, window, bases=None):
    values = _window_values(window)
    if values.shape != (config.t, config.n_vars):
        raise DimensionError(
            f"window shape {values.shape} != (t={config.t}, N={config.n_vars})"
        )
    xn, stats = normalize(values)
    patches = patch(xn, config.p, config.s)
    comp = series_decomp(patches, config.resolved_decomp_kernel)
    j, n, k = config.j, config.n_nodes, config.k

    raws, fs, ps, ghats, runs, ys = [], [], [], [], [], []
    for c, tensor in enumerate((comp.seasonal, comp.trend)):
        raw = assemble_hyperpatch(tensor)
        xt = raw @ params.embed_w[c] + params.embed_b[c]
        if bases is None:
            f = ldgosm_solve(DynamicGraphInput(xt), ridge=config.ridge).f
        else:
            f = bases[c]
        p_spec = f.T @ xt
        ghat = np.ascontiguousarray(
            np.einsum("nd,mnk->mdk", f, params.kern_w[c], optimize=True)
        )
        z, r = kernels.spectral_chain_forward(p_spec, ghat)
        y = f @ z
        raws.append(raw)
        fs.append(f)
        ps.append(p_spec)
        ghats.append(ghat)
        runs.append(r)
        ys.append(y)

    # per-variable gather: rows j*N + v of each component -> (N, J*K) blocks
    feat = np.concatenate(
        [y.reshape(j, config.n_vars, k).transpose(1, 0, 2).reshape(config.n_vars, j * k)
         for y in ys],
        axis=1,
    )
    out = feat @ params.head_w + params.head_b
    pred = denormalize(out.T, stats)
    cache = {
        "stats": stats,
        "raws": raws,
        "bases": fs,
        "p_specs": ps,
        "ghats": ghats,
        "runs": runs,
        "feat": feat,
    }
    return pred, cache


def forward(params: ModelParams, config: ModelConfig, window, bases=None) -> ForecastOutput:
    """Forecast the next ``horizon`` rows from one window.

    ``bases`` optionally pins the per-component spectral bases instead of
    re-deriving them from the embedded features.
    """
    pred, _ = _forward_cache(params, config, window, bases=bases)
    return ForecastOutput(y=pred)


def loss_mae(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean absolute element-wise difference of two (horizon, N) matrices."""
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    target = np.ascontiguousarray(target, dtype=np.float64)
    if pred.ndim != 2 or pred.shape != target.shape:
        raise DimensionError(f"shape mismatch: {pred.shape} vs {target.shape}")
    loss, _ = kernels.mae_and_sign(pred, target)
    return loss


def forward_loss(params, config, window, target, bases=None) -> float:
    """MAE of the forecast against a (horizon, N) target."""
    pred, _ = _forward_cache(params, config, window, bases=bases)
    return loss_mae(pred, target)


def backward(params: ModelParams, config: ModelConfig, window, target, bases=None):
    """Reverse-mode gradient of the MAE loss for all parameters.

    Returns (loss, grad) with grad in the flat layout. The bases are
    constants of the pass: they are taken from the forward evaluation (or
    from ``bases``) and not differentiated through.
    """
    target = np.ascontiguousarray(target, dtype=np.float64)
    pred, cache = _forward_cache(params, config, window, bases=bases)
    if target.shape != pred.shape:
        raise DimensionError(f"target shape {target.shape} != {pred.shape}")
    loss, sign = kernels.mae_and_sign(pred, target)

    grad = ModelParams(config)  # zero-initialized accumulator
    j, n_vars, k = config.j, config.n_vars, config.k

    dout = (sign * cache["stats"].std[None, :]).T / sign.size  # (N, tau)
    grad.head_w[:] = cache["feat"].T @ dout
    grad.head_b[:] = dout.sum(axis=0)
    dfeat = dout @ params.head_w.T  # (N, 2*J*K)

    for c in range(2):
        block = dfeat[:, c * j * k : (c + 1) * j * k]
        dy = np.ascontiguousarray(
            block.reshape(n_vars, j, k).transpose(1, 0, 2).reshape(j * n_vars, k)
        )
        f = cache["bases"][c]
        dz = np.ascontiguousarray(f.T @ dy)
        dp, dghat = kernels.spectral_chain_backward(
            dz, cache["p_specs"][c], cache["ghats"][c], cache["runs"][c]
        )
        grad.kern_w[c] = np.einsum("nd,mdk->mnk", f, dghat, optimize=True)
        dxt = f @ dp
        grad.embed_w[c] = cache["raws"][c].T @ dxt
        grad.embed_b[c] = dxt.sum(axis=0)
    return loss, grad.to_flat()


def train(config: ModelConfig, train_values: np.ndarray, val_values: np.ndarray,
          train_stride: int = 1):
    """Mini-batch Adam on MAE with early stopping on validation MAE.

    Returns (params, history) where params are the best-on-validation
    weights and history holds one record per completed epoch.
    """
    from .data import sliding_windows

    train_pairs = sliding_windows(train_values, config.t, config.horizon,
                                  stride=train_stride)
    val_pairs = sliding_windows(val_values, config.t, config.horizon)
    if not train_pairs:
        raise DataError("training split yields no windows")
    if not val_pairs:
        raise DataError("validation split yields no windows")

    rng = np.random.default_rng(config.seed)
    params = init_params(config, rng)
    m1 = np.zeros(params.size)
    m2 = np.zeros(params.size)
    step = 0

    best_val = np.inf
    best_flat = params.to_flat()
    bad_epochs = 0
    history = []

    for epoch in range(config.epochs):
        order = rng.permutation(len(train_pairs))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            grad = np.zeros(params.size)
            for i in idx:
                w, tgt = train_pairs[i]
                loss, g = backward(params, config, w, tgt)
                grad += g
                epoch_loss += loss
            grad /= len(idx)
            step += 1
            kernels.adam_step(params.flat, grad, m1, m2, step,
                              config.learning_rate, ADAM_BETA1, ADAM_BETA2,
                              ADAM_EPS)
        train_loss = epoch_loss / len(train_pairs)

        val_loss = 0.0
        for w, tgt in val_pairs:
            val_loss += forward_loss(params, config, w, tgt)
        val_loss /= len(val_pairs)

        history.append({"epoch": epoch, "train_loss": train_loss,
                        "val_loss": val_loss})
        if val_loss < best_val:
            best_val = val_loss
            best_flat = params.to_flat()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break

    return ModelParams.from_flat(config, best_flat), history
