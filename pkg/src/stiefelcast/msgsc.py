"""Layered spectral convolution with learnable kernels.

Stacking convolutions naively would transform in and out of the spectral
subspace once per layer. Because the forward transform of a convolution
is the elementwise product of the operand spectra, the whole stack
collapses to one forward transform, an accumulation of running Hadamard
products, and one inverse transform.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError
from .spectral import StiefelBasis, isgft, sgft


@dataclass(frozen=True)
class KernelStack:
    """Per-layer kernel weights, each n x K in node space."""

    layer_weights: list

    def __post_init__(self):
        if len(self.layer_weights) < 1:
            raise DimensionError("kernel stack needs at least one layer")
        shape = self.layer_weights[0].shape
        for w in self.layer_weights:
            if w.ndim != 2 or w.shape != shape:
                raise DimensionError(
                    f"all layers must share one (n, K) shape, got {w.shape} vs {shape}"
                )

    @property
    def m(self):
        return len(self.layer_weights)


def spectral_kernels(f: StiefelBasis, stack: KernelStack) -> list:
    """Project each layer's weights into the subspace: G_hat_j = F' W_j."""
    if stack.layer_weights[0].shape[0] != f.n:
        raise DimensionError(
            f"kernel rows {stack.layer_weights[0].shape[0]} != basis rows {f.n}"
        )
    return [sgft(f, w) for w in stack.layer_weights]


def msgsc_fast(f: StiefelBasis, x: np.ndarray, spectra: list) -> np.ndarray:
    """Multi-layer convolution via a single transform pair.

    ``spectra`` holds the d x K layer spectra (e.g. from spectral_kernels).
    Computes S(x) once, accumulates sum_i S(x) * prod_{j<=i} G_hat_j, and
    inverts once, so the transform count is independent of depth.
    """
    stacked = _stack_spectra(f, spectra)
    p = sgft(f, x)
    z, _ = kernels.spectral_chain_forward(p, stacked)
    return isgft(f, z)


def msgsc_naive(f: StiefelBasis, x: np.ndarray, g_list: list) -> np.ndarray:
    """Reference form: left-nested repeated convolutions, summed over depth.

    Test oracle only; costs one transform pair per layer. Kernels are
    given in node space (n x K each).
    """
    from .spectral import sgsc

    if len(g_list) < 1:
        raise DimensionError("need at least one kernel")
    total = np.zeros_like(np.asarray(x, dtype=np.float64))
    term = x
    for g in g_list:
        term = sgsc(f, term, g)
        total = total + term
    return total


def _stack_spectra(f: StiefelBasis, spectra: list) -> np.ndarray:
    if len(spectra) < 1:
        raise DimensionError("need at least one layer spectrum")
    stacked = np.ascontiguousarray(np.stack(spectra), dtype=np.float64)
    if stacked.shape[1] != f.d:
        raise DimensionError(
            f"layer spectra have {stacked.shape[1]} rows, basis has d={f.d}"
        )
    return stacked
