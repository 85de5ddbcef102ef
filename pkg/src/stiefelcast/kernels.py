"""Hot numeric kernels, each in two lanes: numba @njit and pure numpy.

The ``*_numpy`` builds are always defined. When numba is importable the
``*_numba`` builds exist too, and the unsuffixed public names dispatch to
the lane chosen by ``backend.USE_NUMBA``. The numpy lane mirrors the numba
lane step for step so both return the same values up to rounding.
"""

import numpy as np

from .backend import HAVE_NUMBA, USE_NUMBA

# status codes returned by the dynamic-graph solve cores
SOLVE_OK = 0
SOLVE_RANK_DEFICIENT = 1


# ---------------------------------------------------------------------------
# centered moving average over the patch-time axis (replicate padding)

def trend_moving_average_numpy(x, kernel):
    """Trend of a (J, p, N) tensor: size-`kernel` centered mean along axis 1."""
    half = kernel // 2
    padded = np.pad(x, ((0, 0), (half, half), (0, 0)), mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, kernel, axis=1)
    return windows.mean(axis=-1)


# ---------------------------------------------------------------------------
# Stiefel-constrained dynamic graph solve (two small eigendecompositions)

def _fix_column_signs_numpy(u):
    flip = u[np.abs(u).argmax(axis=0), np.arange(u.shape[1])] < 0.0
    u[:, flip] *= -1.0
    return u


def ldgosm_core_numpy(x, e, ridge):
    """Whiten the Gram matrix, eigendecompose the lifted objective, return
    (status, w, f, objective, lam_min) with objective evaluated from the
    output matrices themselves."""
    d = x.shape[1]
    b = x.T @ x
    b[np.diag_indices(d)] += ridge
    lam, dv = np.linalg.eigh(b)
    lam_min = lam[0]
    if lam_min <= 0.0:
        z = np.zeros((d, d))
        return SOLVE_RANK_DEFICIENT, z, np.zeros((x.shape[0], d)), 0.0, lam_min
    m = (dv / np.sqrt(lam)) @ dv.T
    c = e.T @ x
    h = b + c.T @ c
    _, u = np.linalg.eigh(m @ h @ m)
    u = _fix_column_signs_numpy(np.ascontiguousarray(u[:, ::-1]))
    w = m @ u
    f = x @ w
    ef = e.T @ f
    obj = float(np.sum(f * f) + np.sum(ef * ef) + ridge * np.sum(w * w))
    return SOLVE_OK, w, f, obj, lam_min


# ---------------------------------------------------------------------------
# layered spectral convolution chain (forward + reverse accumulation)

def spectral_chain_forward_numpy(p, g):
    """p: (d, k) spectrum of the signal; g: (m, d, k) layer spectra.
    Returns (z, r): z = sum_i p * prod_{j<=i} g_j, r = the running products."""
    m = g.shape[0]
    r = np.empty_like(g)
    running = np.ones_like(p)
    z = np.zeros_like(p)
    for i in range(m):
        running = running * g[i]
        r[i] = running
        z += p * running
    return z, r


def spectral_chain_backward_numpy(dz, p, g, r):
    """Reverse pass of spectral_chain_forward; returns (dp, dg)."""
    m = g.shape[0]
    q = r.sum(axis=0)
    dp = dz * q
    dq = dz * p
    dg = np.empty_like(g)
    acc = dq.copy()
    for i in range(m - 1, -1, -1):
        dg[i] = acc * r[i - 1] if i > 0 else acc
        if i > 0:
            acc = dq + acc * g[i]
    return dp, dg


# ---------------------------------------------------------------------------
# mean absolute error and its sign field

def mae_and_sign_numpy(pred, target):
    diff = pred - target
    return float(np.mean(np.abs(diff))), np.sign(diff)


# ---------------------------------------------------------------------------
# Adam update, in place on (params, m1, m2)

def adam_step_numpy(params, grad, m1, m2, step, lr, beta1, beta2, eps):
    m1 *= beta1
    m1 += (1.0 - beta1) * grad
    m2 *= beta2
    m2 += (1.0 - beta2) * grad * grad
    bc1 = 1.0 - beta1 ** step
    bc2 = 1.0 - beta2 ** step
    params -= lr * (m1 / bc1) / (np.sqrt(m2 / bc2) + eps)


if HAVE_NUMBA:
    from numba import njit

    _jit = njit(cache=True, nogil=True)

    @_jit
    def trend_moving_average_numba(x, kernel):
        j, p, n = x.shape
        half = kernel // 2
        out = np.empty_like(x)
        for a in range(j):
            for v in range(n):
                for t in range(p):
                    s = 0.0
                    for u in range(t - half, t + half + 1):
                        uu = u
                        if uu < 0:
                            uu = 0
                        elif uu > p - 1:
                            uu = p - 1
                        s += x[a, uu, v]
                    out[a, t, v] = s / kernel
        return out

    @_jit
    def ldgosm_core_numba(x, e, ridge):
        n, d = x.shape
        b = x.T @ x
        for i in range(d):
            b[i, i] += ridge
        lam, dv = np.linalg.eigh(b)
        lam_min = lam[0]
        if lam_min <= 0.0:
            z = np.zeros((d, d))
            return SOLVE_RANK_DEFICIENT, z, np.zeros((n, d)), 0.0, lam_min
        m = (dv / np.sqrt(lam)) @ dv.T
        c = e.T @ x
        h = b + c.T @ c
        _, u = np.linalg.eigh(m @ h @ m)
        u = np.ascontiguousarray(u[:, ::-1])
        for jcol in range(d):
            amax = 0.0
            arg = 0
            for irow in range(d):
                a = abs(u[irow, jcol])
                if a > amax:
                    amax = a
                    arg = irow
            if u[arg, jcol] < 0.0:
                for irow in range(d):
                    u[irow, jcol] = -u[irow, jcol]
        w = m @ u
        f = x @ w
        ef = e.T @ f
        obj = np.sum(f * f) + np.sum(ef * ef) + ridge * np.sum(w * w)
        return SOLVE_OK, w, f, obj, lam_min

    @_jit
    def spectral_chain_forward_numba(p, g):
        m, d, k = g.shape
        r = np.empty_like(g)
        z = np.zeros_like(p)
        for a in range(d):
            for b in range(k):
                running = 1.0
                for i in range(m):
                    running *= g[i, a, b]
                    r[i, a, b] = running
                    z[a, b] += p[a, b] * running
        return z, r

    @_jit
    def spectral_chain_backward_numba(dz, p, g, r):
        m, d, k = g.shape
        dp = np.empty_like(p)
        dg = np.empty_like(g)
        for a in range(d):
            for b in range(k):
                q = 0.0
                for i in range(m):
                    q += r[i, a, b]
                dp[a, b] = dz[a, b] * q
                dq = dz[a, b] * p[a, b]
                acc = dq
                for i in range(m - 1, -1, -1):
                    dg[i, a, b] = acc * r[i - 1, a, b] if i > 0 else acc
                    if i > 0:
                        acc = dq + acc * g[i, a, b]
        return dp, dg

    @_jit
    def mae_and_sign_numba(pred, target):
        t, n = pred.shape
        sg = np.empty_like(pred)
        total = 0.0
        for i in range(t):
            for j in range(n):
                diff = pred[i, j] - target[i, j]
                total += abs(diff)
                if diff > 0.0:
                    sg[i, j] = 1.0
                elif diff < 0.0:
                    sg[i, j] = -1.0
                else:
                    sg[i, j] = 0.0
        return total / (t * n), sg

    @_jit
    def adam_step_numba(params, grad, m1, m2, step, lr, beta1, beta2, eps):
        bc1 = 1.0 - beta1 ** step
        bc2 = 1.0 - beta2 ** step
        for i in range(params.shape[0]):
            m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i]
            m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i]
            params[i] -= lr * (m1[i] / bc1) / (np.sqrt(m2[i] / bc2) + eps)


if USE_NUMBA:
    trend_moving_average = trend_moving_average_numba
    ldgosm_core = ldgosm_core_numba
    spectral_chain_forward = spectral_chain_forward_numba
    spectral_chain_backward = spectral_chain_backward_numba
    mae_and_sign = mae_and_sign_numba
    adam_step = adam_step_numba
else:
    trend_moving_average = trend_moving_average_numpy
    ldgosm_core = ldgosm_core_numpy
    spectral_chain_forward = spectral_chain_forward_numpy
    spectral_chain_backward = spectral_chain_backward_numpy
    mae_and_sign = mae_and_sign_numpy
    adam_step = adam_step_numpy
