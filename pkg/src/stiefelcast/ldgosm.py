"""Closed-form dynamic-graph basis optimization.

The graph over node features X is the implicit adjacency I + E E' with
E = relu(X), never materialized. The solve finds the transformation W
maximizing Tr(W'(X'X + X'E E'X)W) subject to W'X'X W = I via two d x d
eigendecompositions (whiten the Gram matrix, then eigendecompose the
whitened objective), which keeps the cost O(n d^2 + d^3) instead of the
O(n^3) a full graph eigendecomposition would need.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, EigFailure, RankDeficientError

# Relative scale of the automatic Gram-matrix regularization; the absolute
# floor keeps the solve defined when the features vanish entirely.
AUTO_RIDGE_SCALE = 1e-6
AUTO_RIDGE_FLOOR = 1e-12


class DynamicGraphInput:
    """Node features X (n x d) and nonnegative activation E of the same shape."""

    __slots__ = ("x", "e")

    def __init__(self, x, e=None):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2:
            raise DimensionError(f"features must be 2-D, got shape {x.shape}")
        if e is None:
            e = np.maximum(x, 0.0)
        else:
            e = np.ascontiguousarray(e, dtype=np.float64)
            if e.shape != x.shape:
                raise DimensionError(
                    f"activation shape {e.shape} != feature shape {x.shape}"
                )
            if np.any(e < 0.0):
                raise DimensionError("activation has negative entries")
        self.x = x
        self.e = e


@dataclass(frozen=True)
class LdgosmResult:
    """Solver output: W (d x d), F = XW (n x d), the value of the maximized
    objective, and the regularization actually applied."""

    w: np.ndarray
    f: np.ndarray
    objective: float
    ridge: float


def resolve_ridge(inp: DynamicGraphInput, ridge=None) -> float:
    """Explicit ridge is used verbatim; None picks the automatic value
    max(1e-6 * tr(X'X) / d, 1e-12)."""
    if ridge is not None:
        return float(ridge)
    d = inp.x.shape[1]
    return max(AUTO_RIDGE_SCALE * float(np.sum(inp.x * inp.x)) / d, AUTO_RIDGE_FLOOR)


def dynamic_adjacency_apply(inp: DynamicGraphInput, v: np.ndarray) -> np.ndarray:
    """(I + E E') v without forming the n x n adjacency."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] != inp.x.shape[0]:
        raise DimensionError(
            f"expected ({inp.x.shape[0]}, k) operand, got {v.shape}"
        )
    return v + inp.e @ (inp.e.T @ v)


def ldgosm_solve(inp: DynamicGraphInput, ridge=None) -> LdgosmResult:
    """Run the closed-form solve on regularized inputs.

    Steps, with B = X'X + ridge*I:
      1. eigendecompose B
      2. M = B^{-1/2} (symmetric inverse square root)
      3. C = E'X
      4. H = B + C'C
      5. eigendecompose M'HM, eigenvectors U ordered by descending eigenvalue
      6. W = MU, F = XW

    The reported objective is Tr(W' H W) evaluated from the returned
    matrices as ||F||_F^2 + ||E'F||_F^2 + ridge * ||W||_F^2; with ridge = 0
    this is exactly Tr(W'(X'X + X'E E'X)W).
    """
    n, d = inp.x.shape
    if not 1 <= d <= n:
        raise DimensionError(f"need n >= d >= 1, got n={n}, d={d}")
    ridge = resolve_ridge(inp, ridge)
    try:
        status, w, f, obj, lam_min = kernels.ldgosm_core(inp.x, inp.e, ridge)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(f"dynamic-graph solve did not converge: {exc}") from exc
    if status == kernels.SOLVE_RANK_DEFICIENT:
        raise RankDeficientError(
            f"regularized Gram matrix has min eigenvalue {lam_min:.3e} <= 0"
        )
    return LdgosmResult(w=w, f=f, objective=float(obj), ridge=ridge)


def ldgosm_objective(inp: DynamicGraphInput, w: np.ndarray) -> float:
    """Tr(W'(X'X + X'E E'X)W) for an arbitrary W (no regularization term)."""
    w = np.asarray(w, dtype=np.float64)
    d = inp.x.shape[1]
    if w.shape != (d, d):
        raise DimensionError(f"expected ({d}, {d}) transform, got {w.shape}")
    f = inp.x @ w
    ef = inp.e.T @ f
    return float(np.sum(f * f) + np.sum(ef * ef))
