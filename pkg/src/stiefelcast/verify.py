"""Self-contained verification suites for every closed-form claim the
package relies on, each checked against an independent brute-force route.

Each suite returns a CheckResult; the CLI ``verify`` command runs them all
and fails the process if any check is red.
"""

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from . import checkpoint as ckpt
from . import model as model_mod
from . import msgsc as msgsc_mod
from . import spectral as spectral_mod
from .data import Dataset, SplitSpec, chronological_split
from .ldgosm import DynamicGraphInput, ldgosm_solve
from .preprocess import normalize, denormalize, patch, patch_count, series_decomp


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_graph(rng, n: int, jitter: float = 1e-6) -> spectral_mod.GraphSpec:
    """Random dense symmetric graph with positive weights; a graded diagonal
    jitter separates near-degenerate eigenvalues."""
    a = rng.uniform(0.1, 1.0, size=(n, n))
    a = (a + a.T) / 2.0
    a[np.diag_indices(n)] += jitter * np.arange(1, n + 1)
    return spectral_mod.GraphSpec(a)


def random_orthonormal(rng, n: int, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, d)))
    return q * np.where(np.diag(r) < 0.0, -1.0, 1.0)


def check_basis_optimality(graphs: int = 50, rand_bases: int = 100,
                           seed: int = 0) -> CheckResult:
    """Top-d eigenvector basis maximizes the trace functional: equals the
    top-d eigenvalue sum and beats random orthonormal competitors."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst_gap = np.inf
    worst_eq = 0.0
    for _ in range(graphs):
        n = int(rng.integers(3, 25))
        d = int(rng.integers(1, n + 1))
        g = random_graph(rng, n)
        a_hat = spectral_mod.normalized_adjacency(g)
        basis = spectral_mod.stiefel_basis_by_eig(g, d)
        achieved = float(np.trace(basis.f.T @ a_hat @ basis.f))
        eigsum = float(np.sort(np.linalg.eigvalsh(a_hat))[-d:].sum())
        worst_eq = max(worst_eq, abs(achieved - eigsum))
        for _ in range(rand_bases):
            q = random_orthonormal(rng, n, d)
            worst_gap = min(worst_gap, achieved - float(np.trace(q.T @ a_hat @ q)))
    elapsed = time.perf_counter() - start
    passed = worst_eq < 1e-8 and worst_gap > -1e-10
    return CheckResult(
        "basis_optimality", passed,
        f"max |trace - eigsum| = {worst_eq:.2e}, "
        f"min margin over random bases = {worst_gap:.2e}, {elapsed:.2f}s",
    )


def check_filtered_convolution(cases: int = 200, seed: int = 1) -> CheckResult:
    """Subspace convolution equals the filtered full-spectrum convolution
    for d in {1, n/2, n} on jittered random graphs."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 33))
        g = random_graph(rng, n)
        x = rng.standard_normal((n, 1))
        gsig = rng.standard_normal((n, 1))
        for d in sorted({1, max(1, n // 2), n}):
            basis = spectral_mod.stiefel_basis_by_eig(g, d)
            fast = spectral_mod.sgsc(basis, x, gsig)
            oracle = spectral_mod.filtered_spectral_oracle(g, d, x, gsig)
            worst = max(worst, float(np.max(np.abs(fast - oracle))))
    elapsed = time.perf_counter() - start
    return CheckResult(
        "filtered_convolution", worst < 1e-8,
        f"max |sgsc - filtered oracle| = {worst:.2e} over {cases} graphs, "
        f"{elapsed:.2f}s",
    )


def check_layered_convolution(cases: int = 200, seed: int = 2) -> CheckResult:
    """Single-transform layered convolution equals the literal nested sum."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 17))
        d = int(rng.integers(1, n + 1))
        k = int(rng.integers(1, 9))
        m = int(rng.integers(1, 5))
        basis = spectral_mod.StiefelBasis(random_orthonormal(rng, n, d))
        x = rng.standard_normal((n, k))
        g_list = [rng.standard_normal((n, k)) for _ in range(m)]
        spectra = [spectral_mod.sgft(basis, g) for g in g_list]
        fast = msgsc_mod.msgsc_fast(basis, x, spectra)
        naive = msgsc_mod.msgsc_naive(basis, x, g_list)
        worst = max(worst, float(np.max(np.abs(fast - naive))))
    elapsed = time.perf_counter() - start
    return CheckResult(
        "layered_convolution", worst < 1e-9,
        f"max |fast - naive| = {worst:.2e} over {cases} cases, {elapsed:.2f}s",
    )


def check_dynamic_solve(cases: int = 200, seed: int = 3) -> CheckResult:
    """Dynamic-graph solve: constraint satisfaction and objective equal to
    the top-d generalized eigenvalue sum computed densely by scipy."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst_constraint = 0.0
    worst_obj = 0.0
    for case in range(cases):
        d = int(rng.integers(1, 9))
        n = int(rng.integers(d, 65))
        x = rng.standard_normal((n, d))
        inp = DynamicGraphInput(x)
        ridge = None if case % 2 else 0.0
        res = ldgosm_solve(inp, ridge=ridge)
        b_r = x.T @ x + res.ridge * np.eye(d)
        h_r = b_r + (inp.e.T @ x).T @ (inp.e.T @ x)
        constraint = float(np.linalg.norm(res.w.T @ b_r @ res.w - np.eye(d)))
        eigsum = float(np.sort(scipy.linalg.eigh(h_r, b_r, eigvals_only=True))[-d:].sum())
        rel = abs(res.objective - eigsum) / max(abs(eigsum), 1e-12)
        worst_constraint = max(worst_constraint, constraint)
        worst_obj = max(worst_obj, rel)
    elapsed = time.perf_counter() - start
    passed = worst_constraint < 1e-6 and worst_obj < 1e-7
    return CheckResult(
        "dynamic_solve", passed,
        f"max ||W'(X'X+ridge I)W - I||_F = {worst_constraint:.2e}, "
        f"max relative objective error = {worst_obj:.2e}, {elapsed:.2f}s",
    )


def tiny_gradient_config() -> model_mod.ModelConfig:
    return model_mod.ModelConfig(t=16, horizon=4, n_vars=3, p=4, s=4,
                                 k=8, d=8, m=2, seed=0)


def check_gradients(points: int = 10, seed: int = 4,
                    eps: float = 1e-5) -> CheckResult:
    """Every analytic gradient coordinate against central finite differences
    of the loss with the spectral bases frozen at the evaluation point."""
    config = tiny_gradient_config()
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(points):
        params = model_mod.init_params(config, rng)
        params.flat[:] += 0.05 * rng.standard_normal(params.size)
        window = rng.standard_normal((config.t, config.n_vars)).cumsum(axis=0)
        bases = model_mod.compute_bases(params, config, window)
        pred0 = model_mod.forward(params, config, window, bases=bases).y
        # keep every |pred - target| safely away from the kink of |.|
        offset = rng.uniform(0.2, 0.8, size=pred0.shape)
        offset *= np.where(rng.uniform(size=pred0.shape) < 0.5, -1.0, 1.0)
        target = pred0 + offset
        _, grad = model_mod.backward(params, config, window, target, bases=bases)
        fd = np.empty_like(grad)
        base = params.to_flat()
        for i in range(base.size):
            theta = base.copy()
            theta[i] = base[i] + eps
            up = model_mod.forward_loss(
                model_mod.ModelParams.from_flat(config, theta), config, window,
                target, bases=bases)
            theta[i] = base[i] - eps
            down = model_mod.forward_loss(
                model_mod.ModelParams.from_flat(config, theta), config, window,
                target, bases=bases)
            fd[i] = (up - down) / (2 * eps)
        rel = np.abs(grad - fd) / np.maximum.reduce(
            [np.abs(grad), np.abs(fd), np.full_like(grad, 1e-8)])
        worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - start
    return CheckResult(
        "gradient_check", worst < 1e-4,
        f"max relative error vs central differences = {worst:.2e} "
        f"({points} points x {model_mod.init_params(config).size} coords), "
        f"{elapsed:.1f}s",
    )


def check_pipeline_invariants(seed: int = 5) -> CheckResult:
    """Decomposition additivity, normalization roundtrip, patch-count
    formula sweep, split partition, checkpoint bit-exact roundtrip."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    failures = []

    worst_add = 0.0
    for _ in range(20):
        x = rng.standard_normal((int(rng.integers(1, 8)),
                                 int(rng.integers(3, 30)),
                                 int(rng.integers(1, 6))))
        kernel = int(rng.integers(0, (x.shape[1] - 1) // 2 + 1)) * 2 + 1
        comp = series_decomp(x, kernel)
        worst_add = max(worst_add,
                        float(np.max(np.abs(comp.seasonal + comp.trend - x))))
    if not worst_add < 1e-12:
        failures.append(f"decomposition additivity {worst_add:.2e}")

    worst_rt = 0.0
    for _ in range(20):
        w = rng.standard_normal((int(rng.integers(4, 64)),
                                 int(rng.integers(1, 8)))) * 10 + 5
        w[:, 0] = w[0, 0]  # one constant column
        xn, stats = normalize(w)
        worst_rt = max(worst_rt, float(np.max(np.abs(denormalize(xn, stats) - w))))
    if not worst_rt < 1e-10:
        failures.append(f"normalization roundtrip {worst_rt:.2e}")

    bad_counts = 0
    for t in range(8, 41):
        for p in range(2, t + 1):
            for s in range(1, p + 1):
                if patch(np.zeros((t, 1)), p, s).shape[0] != (t - p) // s + 2:
                    bad_counts += 1
    for _ in range(200):
        t = int(rng.integers(8, 513))
        p = int(rng.integers(2, t + 1))
        s = int(rng.integers(1, p + 1))
        if patch(np.zeros((t, 1)), p, s).shape[0] != patch_count(t, p, s):
            bad_counts += 1
    if bad_counts:
        failures.append(f"{bad_counts} patch-count mismatches")

    for _ in range(10):
        rows = int(rng.integers(10, 400))
        ds = Dataset("x", rng.standard_normal((rows, 3)))
        tr, va, te = chronological_split(ds, SplitSpec())
        if not (len(tr) + len(va) + len(te) == rows
                and np.array_equal(np.vstack([tr, va, te]), ds.values)):
            failures.append("split is not an order-preserving partition")
            break

    config = tiny_gradient_config()
    params = model_mod.init_params(config)
    with tempfile.TemporaryDirectory() as tmp:
        p1 = Path(tmp) / "a.ckpt"
        p2 = Path(tmp) / "b.ckpt"
        ckpt.save_checkpoint(params, config, p1)
        loaded, cfg2 = ckpt.load_checkpoint(p1)
        ckpt.save_checkpoint(loaded, cfg2, p2)
        if p1.read_bytes() != p2.read_bytes():
            failures.append("checkpoint save/load/save not byte-identical")
        if not np.array_equal(loaded.flat, params.flat):
            failures.append("checkpoint parameters not bit-exact")

    elapsed = time.perf_counter() - start
    detail = "; ".join(failures) if failures else (
        f"additivity {worst_add:.1e}, roundtrip {worst_rt:.1e}, "
        f"patch sweep ok, splits ok, checkpoint ok, {elapsed:.1f}s")
    return CheckResult("pipeline_invariants", not failures, detail)


def run_all(seed: int = 0, cases: int = 200, graphs: int = 50,
            gradient_points: int = 10) -> list:
    return [
        check_basis_optimality(graphs=graphs, seed=seed),
        check_filtered_convolution(cases=cases, seed=seed + 1),
        check_layered_convolution(cases=cases, seed=seed + 2),
        check_dynamic_solve(cases=cases, seed=seed + 3),
        check_gradients(points=gradient_points, seed=seed + 4),
        check_pipeline_invariants(seed=seed + 5),
    ]
