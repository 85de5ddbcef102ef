"""Graph spectral primitives on a column-orthonormal (Stiefel) basis.

The basis F spans the dominant eigenspace of the degree-normalized
adjacency D^{-1/2} A D^{-1/2}. Signals are moved to and from that
subspace with a pair of linear maps (a pseudo graph Fourier transform),
and convolution is an elementwise product between the two transformed
operands, mapped back to node space.
"""

import numpy as np

from .errors import DimensionError, EigFailure, ZeroDegreeError

ORTHONORMALITY_TOL = 1e-8


class GraphSpec:
    """Symmetric nonnegative adjacency plus its row-sum degree vector."""

    __slots__ = ("adjacency", "degree")

    def __init__(self, adjacency):
        a = np.asarray(adjacency, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"adjacency must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DimensionError("adjacency contains non-finite entries")
        if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
            raise DimensionError("adjacency is not symmetric within 1e-12")
        if np.any(a < 0.0):
            raise DimensionError("adjacency has negative entries")
        self.adjacency = a
        self.degree = a.sum(axis=1)

    @property
    def n(self):
        return self.adjacency.shape[0]


class StiefelBasis:
    """An n x d matrix with orthonormal columns.

    ``check=False`` skips the orthonormality test; it is meant for bases
    produced by the dynamic-graph solver, which satisfy the constraint in
    a data-dependent metric and may drift off the manifold when the node
    features are rank deficient.
    """

    __slots__ = ("f",)

    def __init__(self, f, check=True):
        f = np.ascontiguousarray(f, dtype=np.float64)
        if f.ndim != 2:
            raise DimensionError(f"basis must be 2-D, got shape {f.shape}")
        n, d = f.shape
        if d > n:
            raise DimensionError(f"basis has more columns than rows: {f.shape}")
        if check:
            gram_err = np.linalg.norm(f.T @ f - np.eye(d))
            if not gram_err < ORTHONORMALITY_TOL:
                raise DimensionError(
                    f"columns are not orthonormal: ||F'F - I||_F = {gram_err:.3e}"
                )
        self.f = f

    @property
    def n(self):
        return self.f.shape[0]

    @property
    def d(self):
        return self.f.shape[1]


def normalized_adjacency(g: GraphSpec) -> np.ndarray:
    """D^{-1/2} A D^{-1/2}, symmetrized against rounding."""
    if np.any(g.degree <= 0.0):
        raise ZeroDegreeError("graph has a node with degree <= 0")
    inv_sqrt = 1.0 / np.sqrt(g.degree)
    a_hat = g.adjacency * inv_sqrt[:, None] * inv_sqrt[None, :]
    return (a_hat + a_hat.T) / 2.0


def laplacian(g: GraphSpec) -> np.ndarray:
    """I - D^{-1/2} A D^{-1/2}. Derived quantity; nothing downstream uses it."""
    return np.eye(g.n) - normalized_adjacency(g)


def sorted_symmetric_eig(sym: np.ndarray):
    """Full eigendecomposition of a symmetric matrix with a fixed convention:
    eigenvalues descending (stable tie order), each eigenvector's
    largest-magnitude entry made positive.

    Every caller that must agree on eigenvector signs goes through here.
    """
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(f"symmetric eigendecomposition failed: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = np.ascontiguousarray(v[:, order])
    anchor = np.abs(v).argmax(axis=0)
    flip = v[anchor, np.arange(v.shape[1])] < 0.0
    v[:, flip] *= -1.0
    return w, v


def stiefel_basis_by_eig(g: GraphSpec, d: int) -> StiefelBasis:
    """Basis of the top-d eigenvectors of the normalized adjacency.

    This maximizes Tr(F' A_hat F) over all n x d column-orthonormal F, so
    the achieved trace equals the sum of the d largest eigenvalues.
    """
    if not 1 <= d <= g.n:
        raise DimensionError(f"need 1 <= d <= n, got d={d}, n={g.n}")
    _, v = sorted_symmetric_eig(normalized_adjacency(g))
    return StiefelBasis(v[:, :d])


def sgft(f: StiefelBasis, x: np.ndarray) -> np.ndarray:
    """Forward transform F' x, mapping n-row signals to d-row spectra."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != f.n:
        raise DimensionError(f"expected ({f.n}, k) signal, got {x.shape}")
    return f.f.T @ x


def isgft(f: StiefelBasis, z: np.ndarray) -> np.ndarray:
    """Inverse transform F z, mapping d-row spectra back to node space."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] != f.d:
        raise DimensionError(f"expected ({f.d}, k) spectrum, got {z.shape}")
    return f.f @ z


def sgsc(f: StiefelBasis, x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Spectral convolution F(F'x * F'g), elementwise in the subspace."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if x.shape != g.shape:
        raise DimensionError(f"operands differ in shape: {x.shape} vs {g.shape}")
    return isgft(f, sgft(f, x) * sgft(f, g))


def filtered_spectral_oracle(
    g_spec: GraphSpec, d: int, x: np.ndarray, g: np.ndarray
) -> np.ndarray:
    """Truncated-spectrum filtered convolution P diag(theta) P' x.

    P and the descending eigenvalues come from the full decomposition of
    the normalized adjacency, through the same routine (hence the same
    sign convention) as stiefel_basis_by_eig. The filter keeps
    theta_i = p_i' g on the eigenvalues >= the d-th largest and zeroes the
    rest. Intended as an independent check of ``sgsc`` on single-column
    signals with distinct eigenvalues.
    """
    if not 1 <= d <= g_spec.n:
        raise DimensionError(f"need 1 <= d <= n, got d={d}, n={g_spec.n}")
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if x.shape != (g_spec.n, 1) or g.shape != (g_spec.n, 1):
        raise DimensionError(
            f"oracle expects ({g_spec.n}, 1) operands, got {x.shape} and {g.shape}"
        )
    w, p = sorted_symmetric_eig(normalized_adjacency(g_spec))
    theta = np.where(w >= w[d - 1], (p.T @ g)[:, 0], 0.0)
    return p @ (theta[:, None] * (p.T @ x))
