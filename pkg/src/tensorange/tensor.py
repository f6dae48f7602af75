"""Tensor-structure bookkeeping: partial transposes, symmetrizations, vec, projectors, Choi matrices.

Multi-indices are row-major over the factors in shape order, so for a bipartite
shape ``(m, n)`` the entry ``B[i*n + k, j*n + l]`` is the ``(k, l)`` entry of the
``(i, j)`` block.  Matrices are either dense ``ndarray`` or ``scipy.sparse``;
every operation keeps the storage kind of its input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .validation import (
    SYMMETRY_RTOL,
    SubsystemSet,
    TensorShape,
    as_shape,
    as_subsystems,
    asymmetry,
    check_bipartite,
    check_matrix,
    check_shape,
    check_symmetric,
    max_abs,
)

DEPENDENCE_RTOL = 1e-10


def partial_transpose(B, shape, S=(2,)):
    """Transpose the tensor factors listed in ``S`` (1-based).

    The default ``S = (2,)`` is the usual bipartite partial transpose.
    """
    B = check_matrix(B)
    shape = check_shape(B, shape)
    S = as_subsystems(S)
    S.check(shape)
    if S.mask == 0:
        return B.copy()
    dims = shape.factor_dims
    p = len(dims)
    if sp.issparse(B):
        coo = B.tocoo()
        rows = list(np.unravel_index(coo.row, dims))
        cols = list(np.unravel_index(coo.col, dims))
        for k in S.members:
            rows[k - 1], cols[k - 1] = cols[k - 1], rows[k - 1]
        r = np.ravel_multi_index(rows, dims)
        c = np.ravel_multi_index(cols, dims)
        return sp.csr_array((coo.data, (r, c)), shape=B.shape)
    axes = list(range(2 * p))
    for k in S.members:
        axes[k - 1], axes[p + k - 1] = axes[p + k - 1], axes[k - 1]
    return np.ascontiguousarray(B.reshape(dims + dims).transpose(axes).reshape(B.shape))


def symmetrize(B):
    """``(B + B^T) / 2``, exactly symmetric."""
    B = check_matrix(B)
    S = (B + B.T) / 2
    if sp.issparse(S):
        return sp.csr_array(S)
    # (a + b)/2 == (b + a)/2 in IEEE arithmetic, so this is already exact
    return S


def partial_symmetrize(B, shape, rtol: float = SYMMETRY_RTOL):
    """Split symmetric ``B`` into ``X = (B + B^Γ)/2`` and ``Y = (B - B^Γ)/2``.

    ``X`` equals its own partial transpose, ``Y`` is negated by it, and
    product vectors cannot see ``Y`` at all.
    """
    B = check_symmetric(check_matrix(B), rtol)
    shape = check_shape(B, shape)
    check_bipartite(shape)
    Bg = partial_transpose(B, shape)
    return (B + Bg) / 2, (B - Bg) / 2


def full_symmetrize(B, shape):
    """``(B + B^T + B^Γ + (B^T)^Γ) / 4``: symmetric and invariant under the partial transpose."""
    B = check_matrix(B)
    shape = check_shape(B, shape)
    check_bipartite(shape)
    Bs = symmetrize(B)
    return (Bs + partial_transpose(Bs, shape)) / 2


def vec(Y) -> np.ndarray:
    """Column-by-column vectorization; ``b^T Y a == vec(Y) @ kron(a, b)``."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise ValueError(f"vec expects a matrix, got array of shape {Y.shape}")
    return Y.reshape(-1, order="F").copy()


def unvec(v, m: int, n: int) -> np.ndarray:
    return np.asarray(v, dtype=np.float64).reshape((m, n), order="F")


def orthonormal_basis(vectors: Sequence[np.ndarray], rtol: float = DEPENDENCE_RTOL) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual falls below ``rtol`` times their original norm are
    dropped as dependent.  Returns the basis as columns.
    """
    kept: list[np.ndarray] = []
    for v in vectors:
        v = np.array(v, dtype=np.float64).ravel()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        for _ in range(2):
            for q in kept:
                v -= (q @ v) * q
        norm = np.linalg.norm(v)
        if norm <= rtol * norm0:
            continue
        kept.append(v / norm)
    if not kept:
        return np.zeros((len(np.ravel(vectors[0])) if len(vectors) else 0, 0))
    return np.column_stack(kept)


def projector_onto_subspace(basis: Sequence, rtol: float = DEPENDENCE_RTOL) -> np.ndarray:
    """Orthogonal projector onto ``span{vec(Y) : Y in basis}``.

    For ``m x n`` matrices the projector acts on ``R^n (x) R^m``, i.e. tensor
    shape ``(n, m)``.
    """
    basis = [np.asarray(Y, dtype=np.float64) for Y in basis]
    if not basis:
        raise ValueError("empty basis")
    if len({Y.shape for Y in basis}) != 1:
        raise ValueError("basis matrices must share dimensions")
    Q = orthonormal_basis([vec(Y) for Y in basis], rtol)
    if Q.shape[1] == 0:
        raise ValueError("basis spans the zero subspace")
    P = Q @ Q.T
    return (P + P.T) / 2


@dataclass(frozen=True)
class MapBlocks:
    """A linear map ``M_m -> M_n`` given by its action on matrix units.

    ``blocks[i, j]`` is the ``n x n`` matrix ``Phi(E_ij)``.
    """

    blocks: np.ndarray

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=np.float64)
        if blocks.ndim != 4 or blocks.shape[0] != blocks.shape[1] or blocks.shape[2] != blocks.shape[3]:
            raise ValueError(f"blocks must have shape (m, m, n, n), got {blocks.shape}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def m(self) -> int:
        return self.blocks.shape[0]

    @property
    def n(self) -> int:
        return self.blocks.shape[2]

    @classmethod
    def from_function(cls, phi: Callable[[np.ndarray], np.ndarray], m: int, n: int) -> "MapBlocks":
        blocks = np.zeros((m, m, n, n))
        for i in range(m):
            for j in range(m):
                E = np.zeros((m, m))
                E[i, j] = 1.0
                blocks[i, j] = phi(E)
        return cls(blocks)

    @classmethod
    def from_choi(cls, C, m: int, n: int) -> "MapBlocks":
        C = np.asarray(C.toarray() if sp.issparse(C) else C, dtype=np.float64)
        if C.shape != (m * n, m * n):
            raise ValueError(f"Choi matrix of shape {C.shape} does not match m={m}, n={n}")
        return cls(C.reshape(m, n, m, n).transpose(0, 2, 1, 3))

    def apply(self, X) -> np.ndarray:
        """Evaluate the map on an ``m x m`` matrix."""
        X = np.asarray(X, dtype=np.float64)
        return np.einsum("ij,ijab->ab", X, self.blocks)


def choi_from_blocks(phi: MapBlocks) -> np.ndarray:
    """``C = sum_ij E_ij (x) Phi(E_ij)``; block ``(i, j)`` of ``C`` is ``Phi(E_ij)``."""
    m, n = phi.m, phi.n
    return phi.blocks.transpose(0, 2, 1, 3).reshape(m * n, m * n).copy()


def generalized_choi_map(c: float) -> MapBlocks:
    """The map ``Phi_c`` on ``M_3``; ``c = 0`` is the Choi map.

    Diagonal entries of the image are ``x11 + c x22 + x33``, ``x11 + x22 + c x33``
    and ``c x11 + x22 + x33``; off-diagonal entries are negated.
    """
    c = float(c)
    weights = np.array([[1.0, c, 1.0], [1.0, 1.0, c], [c, 1.0, 1.0]])

    def phi(X):
        out = -X.copy()
        np.fill_diagonal(out, weights @ np.diag(X))
        return out

    return MapBlocks.from_function(phi, 3, 3)


def kraus_map(kraus: Iterable[np.ndarray]) -> MapBlocks:
    """Completely positive map ``X -> sum_j A_j X A_j^T`` with ``A_j`` of size ``n x m``."""
    kraus = [np.asarray(A, dtype=np.float64) for A in kraus]
    n, m = kraus[0].shape
    return MapBlocks.from_function(lambda X: sum(A @ X @ A.T for A in kraus), m, n)


def is_transpose_preserving(C, rtol: float = SYMMETRY_RTOL) -> tuple[bool, float]:
    """A map is transpose-preserving iff its Choi matrix is symmetric."""
    C = check_matrix(C)
    defect = asymmetry(C)
    return defect <= rtol * max(1.0, max_abs(C)), defect


def product_vector(factors: Sequence[np.ndarray]) -> np.ndarray:
    x = np.ones(1)
    for v in factors:
        x = np.kron(x, np.asarray(v, dtype=np.float64))
    return x


def all_subsystem_sets(shape, include_first: bool = False) -> list[SubsystemSet]:
    """Every subset of ``{2, ..., p}`` (or of ``{1, ..., p}`` with ``include_first``)."""
    shape = as_shape(shape)
    p = shape.n_factors
    if include_first:
        return [SubsystemSet(mask) for mask in range(1 << p)]
    return [SubsystemSet(mask << 1) for mask in range(1 << (p - 1))]


def reduce_subsystem_sets(P: Iterable, shape) -> list[SubsystemSet]:
    """Drop complements and duplicates.

    ``Γ_{[p]∖S}(B)`` is the transpose of ``Γ_S(B)``, so for symmetric ``B`` it
    carries the same quadratic form.  Each set is replaced by whichever of
    ``{S, complement}`` leaves factor 1 untransposed.
    """
    shape = as_shape(shape)
    out: list[SubsystemSet] = []
    for S in P:
        S = as_subsystems(S)
        S.check(shape)
        if S.mask & 1:
            S = S.complement(shape)
        if S not in out:
            out.append(S)
    return out


__all__ = [
    "MapBlocks",
    "TensorShape",
    "SubsystemSet",
    "all_subsystem_sets",
    "choi_from_blocks",
    "full_symmetrize",
    "generalized_choi_map",
    "is_transpose_preserving",
    "kraus_map",
    "orthonormal_basis",
    "partial_symmetrize",
    "partial_transpose",
    "product_vector",
    "projector_onto_subspace",
    "reduce_subsystem_sets",
    "symmetrize",
    "unvec",
    "vec",
]
