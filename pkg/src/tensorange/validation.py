"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

SYMMETRY_RTOL = 1e-10


class DimensionMismatchError(ValueError):
    """Raised when a matrix does not match the declared tensor shape."""


class NotSymmetricError(ValueError):
    """Raised when a matrix is not symmetric within tolerance."""


@dataclass(frozen=True)
class TensorShape:
    """Factor dimensions ``(n_1, ..., n_p)`` of a tensor product space."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if len(dims) == 0:
            raise ValueError("a tensor shape needs at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    @property
    def is_bipartite(self) -> bool:
        return len(self.factor_dims) == 2

    @classmethod
    def parse(cls, text: str) -> "TensorShape":
        """Parse ``"3,3"`` or ``"2,2,2"``."""
        try:
            dims = tuple(int(tok) for tok in text.split(",") if tok.strip())
        except ValueError as exc:
            raise ValueError(f"malformed shape {text!r}") from exc
        return cls(dims)

    def __str__(self):
        return ",".join(str(d) for d in self.factor_dims)


@dataclass(frozen=True)
class SubsystemSet:
    """A subset of the factors ``{1, ..., p}``, stored as a bitmask.

    Bit ``k - 1`` set means factor ``k`` (1-based) belongs to the set.
    """

    mask: int

    @classmethod
    def of(cls, members: Iterable[int]) -> "SubsystemSet":
        mask = 0
        for k in members:
            k = int(k)
            if k < 1:
                raise ValueError(f"subsystem indices are 1-based, got {k}")
            mask |= 1 << (k - 1)
        return cls(mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.mask.bit_length()) if self.mask >> k & 1)

    def check(self, shape: TensorShape) -> None:
        if self.mask >> shape.n_factors:
            raise ValueError(
                f"subsystems {self.members} out of range for {shape.n_factors} factors")

    def complement(self, shape: TensorShape) -> "SubsystemSet":
        return SubsystemSet(((1 << shape.n_factors) - 1) & ~self.mask)

    def __xor__(self, other: "SubsystemSet") -> "SubsystemSet":
        return SubsystemSet(self.mask ^ other.mask)

    def __repr__(self):
        return "SubsystemSet({" + ",".join(map(str, self.members)) + "})"


def as_shape(shape) -> TensorShape:
    if isinstance(shape, TensorShape):
        return shape
    if isinstance(shape, str):
        return TensorShape.parse(shape)
    return TensorShape(tuple(shape))


def as_subsystems(S) -> SubsystemSet:
    if isinstance(S, SubsystemSet):
        return S
    if isinstance(S, int):
        return SubsystemSet.of([S])
    return SubsystemSet.of(S)


def check_matrix(B, *, copy: bool = False):
    """Return ``B`` as a float64 ndarray or CSR matrix after checking it is square and finite."""
    if sp.issparse(B):
        B = sp.csr_array(B, dtype=np.float64, copy=copy)
        B.sum_duplicates()
        B.sort_indices()
        data = B.data
    else:
        B = np.array(B, dtype=np.float64, copy=copy)
        data = B
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {B.shape}")
    if not np.all(np.isfinite(data)):
        raise ValueError("matrix contains NaN or Inf entries")
    return B


def check_shape(B, shape) -> TensorShape:
    shape = as_shape(shape)
    if B.shape[0] != shape.total_dim:
        raise DimensionMismatchError(
            f"matrix has dimension {B.shape[0]} but shape {shape} has total dimension "
            f"{shape.total_dim}")
    return shape


def check_bipartite(shape: TensorShape) -> None:
    if not shape.is_bipartite:
        raise ValueError(f"operation requires a bipartite shape, got {shape}")


def max_abs(B) -> float:
    if sp.issparse(B):
        return float(abs(B).max()) if B.nnz else 0.0
    return float(np.max(np.abs(B))) if B.size else 0.0


def asymmetry(B) -> float:
    """``max |B - B^T|`` entrywise."""
    return max_abs(B - B.T)


def is_symmetric(B, rtol: float = SYMMETRY_RTOL) -> bool:
    return asymmetry(B) <= rtol * max(1.0, max_abs(B))


def check_symmetric(B, rtol: float = SYMMETRY_RTOL):
    """Return the exactly symmetric part of ``B``; raise if ``B`` is visibly non-symmetric."""
    defect = asymmetry(B)
    if defect > rtol * max(1.0, max_abs(B)):
        raise NotSymmetricError(f"matrix is not symmetric (max asymmetry {defect:.3e})")
    if defect == 0.0:
        return B
    return (B + B.T) / 2


def check_angles(n_angles: int) -> int:
    n_angles = int(n_angles)
    if n_angles < 3:
        raise ValueError(f"need at least 3 angles, got {n_angles}")
    return n_angles


def same_dims(mats: Sequence) -> int:
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise ValueError(f"matrices have inconsistent shapes {sorted(dims)}")
    return next(iter(dims))[0]
