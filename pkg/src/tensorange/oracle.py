"""Inner estimates of the product-vector optimum, independent of the numerical-range code.

Every value returned here is attained by an explicit unit product vector, so
``best_max <= mu_max`` and ``best_min >= mu_min`` hold exactly (up to rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp

from .tensor import product_vector, symmetrize
from .validation import as_shape, check_matrix, check_shape, is_symmetric


@dataclass(frozen=True)
class ProductVector:
    factors: tuple[np.ndarray, ...]
    value: float = math.nan

    def __post_init__(self):
        factors = tuple(np.asarray(v, dtype=np.float64) for v in self.factors)
        for v in factors:
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError("product vector factors must be unit vectors")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def random(cls, shape, rng) -> "ProductVector":
        shape = as_shape(shape)
        factors = []
        for n in shape.factor_dims:
            v = rng.standard_normal(n)
            factors.append(v / np.linalg.norm(v))
        return cls(tuple(factors))

    def vector(self) -> np.ndarray:
        return product_vector(self.factors)

    def evaluate(self, B) -> "ProductVector":
        x = self.vector()
        return ProductVector(self.factors, float(x @ (B @ x)))


@dataclass(frozen=True)
class SampleResult:
    best_min: float
    argmin: ProductVector
    best_max: float
    argmax: ProductVector
    samples: int


def _row_kron(factors: Sequence[np.ndarray]) -> np.ndarray:
    X = factors[0]
    for F in factors[1:]:
        X = (X[:, :, None] * F[:, None, :]).reshape(X.shape[0], -1)
    return X


def _quadratic_forms(B, X: np.ndarray) -> np.ndarray:
    """``x^T B x`` for every row ``x`` of ``X``."""
    BX = (B @ X.T).T if sp.issparse(B) else X @ B.T
    return np.einsum("si,si->s", X, BX)


def sample_mu(B, shape, samples: int = 10_000, seed: int = 0, chunk: int | None = None) -> SampleResult:
    """Evaluate the quadratic form at random unit product vectors and keep the extremes."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    B = check_matrix(B)
    shape = check_shape(B, shape)
    rng = np.random.default_rng(seed)
    if chunk is None:
        chunk = max(1, min(samples, 2_000_000 // shape.total_dim))
    lo = (math.inf, None)
    hi = (-math.inf, None)
    done = 0
    while done < samples:
        s = min(chunk, samples - done)
        factors = []
        for n in shape.factor_dims:
            F = rng.standard_normal((s, n))
            factors.append(F / np.linalg.norm(F, axis=1, keepdims=True))
        vals = _quadratic_forms(B, _row_kron(factors))
        i, j = int(np.argmin(vals)), int(np.argmax(vals))
        if vals[i] < lo[0]:
            lo = (float(vals[i]), tuple(F[i] for F in factors))
        if vals[j] > hi[0]:
            hi = (float(vals[j]), tuple(F[j] for F in factors))
        done += s
    return SampleResult(lo[0], ProductVector(lo[1], lo[0]), hi[0], ProductVector(hi[1], hi[0]),
                        samples)


class _Contractor:
    """Contracts ``B`` against all factors but one, working on coordinate triplets."""

    def __init__(self, B, shape):
        coo = sp.coo_array(B) if sp.issparse(B) else sp.coo_array(np.asarray(B))
        self.vals = coo.data
        self.rows = np.unravel_index(coo.row, shape.factor_dims)
        self.cols = np.unravel_index(coo.col, shape.factor_dims)
        self.dims = shape.factor_dims

    def reduced(self, factors, j: int) -> np.ndarray:
        w = self.vals.copy()
        for k, v in enumerate(factors):
            if k != j:
                w *= v[self.rows[k]] * v[self.cols[k]]
        n = self.dims[j]
        M = np.zeros((n, n))
        np.add.at(M, (self.rows[j], self.cols[j]), w)
        return (M + M.T) / 2


def alternating_ascent(B, shape, start: ProductVector | None = None,
                       direction: Literal["min", "max"] = "max", iters: int = 200,
                       tol: float = 1e-12, seed: int = 0) -> tuple[ProductVector, list[float]]:
    """Coordinate ascent over the factors of a product vector.

    With all factors but one fixed the objective is a quadratic form in the
    free factor, maximized (or minimized) by an extremal eigenvector.  Factors
    are updated round-robin; the objective sequence is monotone.  Returns the
    final product vector and the objective after each sweep.
    """
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    B = check_matrix(B)
    shape = check_shape(B, shape)
    if not is_symmetric(B):
        B = symmetrize(B)
    if start is None:
        start = ProductVector.random(shape, np.random.default_rng(seed))
    if len(start.factors) != shape.n_factors or any(
            len(v) != n for v, n in zip(start.factors, shape.factor_dims)):
        raise ValueError("start vector does not match the tensor shape")
    contract = _Contractor(B, shape)
    factors = [v.copy() for v in start.factors]
    value = start.evaluate(B).value
    history = [value]
    pick = -1 if direction == "max" else 0
    better = (lambda a, b: a > b) if direction == "max" else (lambda a, b: a < b)
    for _ in range(iters):
        for j in range(shape.n_factors):
            M = contract.reduced(factors, j)
            w, V = np.linalg.eigh(M)
            # keep the current factor if the eigensolve cannot improve it
            if better(w[pick], float(factors[j] @ M @ factors[j])):
                factors[j] = V[:, pick] / np.linalg.norm(V[:, pick])
        new = ProductVector(tuple(factors)).evaluate(B).value
        improvement = abs(new - value)
        value = new
        history.append(value)
        if improvement <= tol * max(1.0, abs(value)):
            break
    return ProductVector(tuple(factors), value), history


@dataclass(frozen=True)
class GridResult:
    mu_min: float
    mu_max: float
    argmin: tuple[float, float]
    argmax: tuple[float, float]
    error_bound: float


def grid_mu_2x2(B, resolution: int = 256) -> GridResult:
    """Brute-force ``mu_min``/``mu_max`` for ``2 x 2`` factors over an angle grid.

    Factors are ``(cos a, sin a)`` and ``(cos b, sin b)`` with ``a, b`` on a
    uniform grid of ``[0, pi)``.  The objective has Lipschitz constant at most
    ``2 ||B||`` in each angle, which gives the reported ``error_bound``.
    """
    B = check_matrix(B)
    check_shape(B, (2, 2))
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    A = B.toarray() if sp.issparse(B) else B
    A = (A + A.T) / 2
    t = np.pi * np.arange(resolution) / resolution
    V = np.stack([np.cos(t), np.sin(t)], axis=1)
    X = (V[:, None, :, None] * V[None, :, None, :]).reshape(resolution * resolution, 4)
    vals = np.einsum("si,ij,sj->s", X, A, X).reshape(resolution, resolution)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    k, l = np.unravel_index(np.argmax(vals), vals.shape)
    h = np.pi / resolution
    err = 2.0 * float(np.linalg.norm(A, 2)) * h
    return GridResult(float(vals[i, j]), float(vals[k, l]), (t[i], t[j]), (t[k], t[l]), err)
