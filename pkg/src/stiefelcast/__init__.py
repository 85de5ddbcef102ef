"""Spatio-temporal forecasting with dynamic graph spectral convolution on
the Stiefel manifold: linear-time per-window basis optimization, layered
spectral convolution with a single transform pair, and an MAE-trained
forecasting head."""

__version__ = "0.1.0"

from .backend import active_backend
from .data import (
    Dataset,
    SplitSpec,
    Standardizer,
    chronological_split,
    load_csv,
    metrics,
    persistence_forecast,
    sliding_windows,
)
from .errors import (
    ConfigError,
    DataError,
    DimensionError,
    EigFailure,
    FormatError,
    ParseError,
    RankDeficientError,
    ShapeError,
    StiefelcastError,
    ZeroDegreeError,
)
from .ldgosm import (
    DynamicGraphInput,
    LdgosmResult,
    dynamic_adjacency_apply,
    ldgosm_objective,
    ldgosm_solve,
)
from .model import (
    ForecastOutput,
    ModelConfig,
    ModelParams,
    backward,
    count_params,
    forward,
    init_params,
    loss_mae,
    train,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .msgsc import KernelStack, msgsc_fast, msgsc_naive, spectral_kernels
from .preprocess import (
    ComponentPair,
    NormStats,
    PatchConfig,
    TimeSeriesWindow,
    assemble_hyperpatch,
    denormalize,
    disassemble_hyperpatch,
    embed,
    normalize,
    patch,
    series_decomp,
)
from .spectral import (
    GraphSpec,
    StiefelBasis,
    filtered_spectral_oracle,
    isgft,
    laplacian,
    normalized_adjacency,
    sgft,
    sgsc,
    stiefel_basis_by_eig,
)
