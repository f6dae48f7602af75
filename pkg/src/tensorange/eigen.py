"""Extremal eigenpairs of real symmetric matrices, dense or sparse."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .validation import check_matrix, check_symmetric

Which = Literal["max", "min"]

DENSE_DIM_LIMIT = 1024
DENSE_DENSITY_LIMIT = 0.10
CHECK_EVERY = 8


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Eigensolver settings.

    ``max_iterations`` caps the number of matrix-vector products of the
    iterative solver; ``restart_length`` is the Lanczos basis size.
    """

    method: Literal["auto", "dense", "iterative"] = "auto"
    tolerance: float = 1e-10
    max_iterations: int = 20000
    restart_length: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("auto", "dense", "iterative"):
            raise ValueError(f"unknown eigensolver method {self.method!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.restart_length < 4:
            raise ValueError("restart_length must be at least 4")


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float
    converged: bool = True
    matvecs: int = 0
    method: str = "dense"


def choose_method(M, cfg: SolverConfig) -> str:
    if cfg.method != "auto":
        return cfg.method
    n = M.shape[0]
    if not sp.issparse(M) or n <= DENSE_DIM_LIMIT:
        return "dense"
    density = M.nnz / float(n) ** 2
    return "dense" if density > DENSE_DENSITY_LIMIT else "iterative"


def extreme_eigenpair(M, which: Which = "max", cfg: SolverConfig | None = None, *,
                      v0: np.ndarray | None = None, assume_symmetric: bool = False) -> EigenPair:
    """Largest (``which="max"``) or smallest eigenvalue of symmetric ``M`` with a unit witness.

    ``v0`` warm-starts the iterative solver; it is ignored by the dense path.
    """
    cfg = cfg or SolverConfig()
    if which not in ("max", "min"):
        raise ValueError(f"which must be 'max' or 'min', got {which!r}")
    if not assume_symmetric:
        M = check_symmetric(check_matrix(M))
    method = choose_method(M, cfg)
    if method == "dense":
        return _dense_extreme(M, which)
    sign = 1.0 if which == "max" else -1.0
    if sp.issparse(M):
        M = sp.csr_array(M)
    matvec = (lambda x: M @ x) if sign > 0 else (lambda x: -(M @ x))
    rng = np.random.default_rng(cfg.seed)
    value, x, res, ok, count = lanczos_largest(
        matvec, M.shape[0], tol=cfg.tolerance, max_matvecs=cfg.max_iterations,
        basis_size=cfg.restart_length, rng=rng, v0=v0)
    if not ok:
        warnings.warn(f"Lanczos did not converge in {count} matrix-vector products "
                      f"(residual {res:.2e})", ConvergenceWarning, stacklevel=2)
    return EigenPair(sign * value, x, res, ok, count, "iterative")


def _dense_extreme(M, which: Which) -> EigenPair:
    A = M.toarray() if sp.issparse(M) else np.asarray(M)
    n = A.shape[0]
    idx = n - 1 if which == "max" else 0
    if n == 1:
        return EigenPair(float(A[0, 0]), np.ones(1), 0.0)
    w, V = sla.eigh(A, subset_by_index=[idx, idx], check_finite=False)
    if w.size == 0:
        # the MRRR driver occasionally returns no eigenvalue for clustered spectra
        w, V = np.linalg.eigh(A)
        w, V = w[idx:idx + 1], V[:, idx:idx + 1]
    x = V[:, 0]
    x = x / np.linalg.norm(x)
    lam = float(w[0])
    return EigenPair(lam, x, float(np.linalg.norm(A @ x - lam * x)))


def lanczos_largest(matvec: Callable[[np.ndarray], np.ndarray], n: int, *, tol: float,
                    max_matvecs: int, basis_size: int = 64, rng=None,
                    v0: np.ndarray | None = None):
    """Thick-restart Lanczos for the largest eigenvalue of a symmetric operator.

    Every new basis vector is orthogonalized twice against the whole basis.
    After each cycle the best half of the Ritz vectors is kept and the
    expansion continues from the last residual direction.

    Returns ``(value, vector, residual, converged, matvecs)``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    m = max(4, min(basis_size, n))
    keep_max = max(1, m // 2)
    start = rng.standard_normal(n)
    if v0 is not None and np.linalg.norm(v0) > 0:
        # small random admixture so a warm start cannot sit inside an invariant subspace
        v0 = np.asarray(v0, dtype=np.float64)
        start = v0 / np.linalg.norm(v0) + 1e-3 * start / np.linalg.norm(start)
    V = np.zeros((n, m + 1), order="F")
    H = np.zeros((m + 1, m + 1))
    V[:, 0] = start / np.linalg.norm(start)
    k = 0
    matvecs = 0
    anorm = 0.0
    best = None
    while True:
        used = m
        beta = 0.0
        for j in range(k, min(m, n)):
            w = matvec(V[:, j])
            matvecs += 1
            Vj = V[:, : j + 1]
            h = Vj.T @ w
            w = w - Vj @ h
            h2 = Vj.T @ w
            w -= Vj @ h2
            h += h2
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            beta = float(np.linalg.norm(w))
            anorm = max(anorm, abs(h[j]) + beta)
            if beta <= 1e-14 * max(anorm, 1e-300):
                used = j + 1
                beta = 0.0
                break
            V[:, j + 1] = w / beta
            H[j + 1, j] = H[j, j + 1] = beta
            used = j + 1
            # cheap early exit, mostly for warm starts
            if used % CHECK_EVERY == 0 and used < m:
                theta, Y = np.linalg.eigh(H[:used, :used])
                if abs(beta * Y[-1, -1]) <= tol * max(1.0, anorm, abs(theta[-1]), abs(theta[0])):
                    break
        T = H[:used, :used]
        theta, Y = np.linalg.eigh((T + T.T) / 2)
        anorm = max(anorm, float(np.max(np.abs(theta))))
        y = Y[:, -1]
        res = abs(beta * y[-1])
        best = (float(theta[-1]), V[:, :used] @ y, res)
        if res <= tol * max(1.0, anorm) or beta == 0.0 or used >= n:
            return _finish(matvec, best, True, matvecs)
        if matvecs >= max_matvecs:
            return _finish(matvec, best, False, matvecs)
        keep = min(keep_max, used - 1)
        sel = slice(used - keep, used)
        s = beta * Y[-1, sel]
        V[:, :keep] = V[:, :used] @ Y[:, sel]
        V[:, keep] = V[:, used]
        H[:] = 0.0
        H[np.arange(keep), np.arange(keep)] = theta[sel]
        H[:keep, keep] = s
        H[keep, :keep] = s
        V[:, keep + 1:] = 0.0
        k = keep


def _finish(matvec, best, converged: bool, matvecs: int):
    value, x, _ = best
    x = x / np.linalg.norm(x)
    Ax = matvec(x)
    lam = float(x @ Ax)
    res = float(np.linalg.norm(Ax - lam * x))
    return lam, x, res, converged, matvecs + 1


def eigenvalue_interval(M, cfg: SolverConfig | None = None) -> tuple[float, float]:
    """``(lambda_min, lambda_max)`` of symmetric ``M``: the trivial bound interval."""
    cfg = cfg or SolverConfig()
    M = check_symmetric(check_matrix(M))
    if choose_method(M, cfg) == "dense":
        # one full decomposition serves both ends and avoids the bisection
        # error of the index-subset driver
        A = M.toarray() if sp.issparse(M) else M
        w = sla.eigh(A, eigvals_only=True, check_finite=False)
        return float(w[0]), float(w[-1])
    lo = extreme_eigenpair(M, "min", cfg, assume_symmetric=True)
    hi = extreme_eigenpair(M, "max", cfg, assume_symmetric=True)
    return lo.value, hi.value
