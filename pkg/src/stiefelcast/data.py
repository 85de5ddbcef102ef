"""Dataset ingestion, chronological splitting, window sampling, metrics."""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, DimensionError, ParseError, ShapeError


@dataclass(frozen=True)
class Dataset:
    name: str
    values: np.ndarray  # (timesteps, features)
    feature_names: tuple | None = None

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.7
    val_frac: float = 0.1
    test_frac: float = 0.2

    def __post_init__(self):
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must be >= 0 and sum to 1, got {fracs}")


def load_manifest(path) -> dict:
    """Manifest JSON: {"name": str, "rows": int, "cols": int}."""
    with open(path) as fh:
        manifest = json.load(fh)
    missing = {"name", "rows", "cols"} - set(manifest)
    if missing:
        raise ConfigError(f"manifest {path} missing keys: {sorted(missing)}")
    return manifest


def load_csv(path, manifest: dict | None = None) -> Dataset:
    """Parse a numeric CSV (optional single header row, one timestep per row).

    Rows keep file order, which is assumed chronological. Any unparseable
    or non-finite cell raises ParseError naming its row and column; a
    manifest mismatch raises ShapeError.
    """
    path = Path(path)
    rows = []
    feature_names = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for i, record in enumerate(reader):
            if not record:
                continue
            if i == 0:
                try:
                    rows.append([_parse_cell(cell, i, j) for j, cell in enumerate(record)])
                except ParseError:
                    feature_names = tuple(cell.strip() for cell in record)
                continue
            if rows and len(record) != len(rows[0]):
                raise ParseError(
                    f"row {i} has {len(record)} cells, expected {len(rows[0])}"
                )
            rows.append([_parse_cell(cell, i, j) for j, cell in enumerate(record)])
    if not rows:
        raise DataError(f"{path} contains no data rows")
    values = np.asarray(rows, dtype=np.float64)
    name = manifest["name"] if manifest else path.stem
    if manifest is not None:
        expected = (int(manifest["rows"]), int(manifest["cols"]))
        if values.shape != expected:
            raise ShapeError(
                f"{path} has shape {values.shape}, manifest declares {expected}"
            )
    return Dataset(name=name, values=values, feature_names=feature_names)


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: cannot parse {cell!r}") from None
    if not np.isfinite(v):
        raise ParseError(f"row {row}, column {col}: non-finite value {cell!r}")
    return v


def chronological_split(ds: Dataset, spec: SplitSpec = SplitSpec()):
    """Contiguous (train, val, test) row ranges; sizes floor(frac * rows)
    with the remainder going to test."""
    rows = ds.rows
    n_train = int(spec.train_frac * rows)
    n_val = int(spec.val_frac * rows)
    if n_train + n_val > rows:
        raise ConfigError("split fractions leave no room for a test range")
    train = ds.values[:n_train]
    val = ds.values[n_train : n_train + n_val]
    test = ds.values[n_train + n_val :]
    return train, val, test


def sliding_windows(values: np.ndarray, t: int, horizon: int, stride: int = 1):
    """All (window, target) pairs: rows [i, i+t) and [i+t, i+t+horizon),
    i stepping by stride. Pairs never cross the end of ``values``."""
    values = np.asarray(values, dtype=np.float64)
    if stride < 1:
        raise ConfigError(f"stride must be >= 1, got {stride}")
    total = values.shape[0]
    if total < t + horizon:
        raise DataError(
            f"split has {total} rows, needs at least t + horizon = {t + horizon}"
        )
    pairs = []
    for i in range(0, total - t - horizon + 1, stride):
        pairs.append((values[i : i + t], values[i + t : i + t + horizon]))
    return pairs


def metrics(pred_set, target_set):
    """(mse, mae) as element-wise means over all windows/horizons/variables."""
    pred = np.asarray(pred_set, dtype=np.float64)
    target = np.asarray(target_set, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionError(f"shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff)), float(np.mean(np.abs(diff)))


@dataclass(frozen=True)
class Standardizer:
    """Per-variable affine scaling fitted on the training split. Metrics are
    computed in this standardized space by default; invert() recovers the
    raw scale when needed."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, train_values: np.ndarray) -> "Standardizer":
        train_values = np.asarray(train_values, dtype=np.float64)
        mean = train_values.mean(axis=0)
        std = np.maximum(train_values.std(axis=0), 1e-8)
        return cls(mean=mean, std=std)

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.std

    def invert(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * self.std + self.mean


def persistence_forecast(window: np.ndarray, horizon: int) -> np.ndarray:
    """Repeat the last observed row across the horizon."""
    window = np.asarray(window, dtype=np.float64)
    return np.tile(window[-1], (horizon, 1))
