"""Numerical-range bounds on quadratic forms over unit product vectors.

For symmetric ``B`` with partial transpose ``G``, the numerical range of
``B + iG`` is the set of points ``(x^T B x, x^T G x)``.  Its support function
in the direction ``(cos t, -sin t)`` is ``lambda_max(cos t * B - sin t * G)``,
so every computation here is a real symmetric eigenproblem.  The endpoints of
the diagonal slice ``{c : (c, c) in W}`` bound the product-vector optimum.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .eigen import EigenPair, SolverConfig, eigenvalue_interval, extreme_eigenpair
from .tensor import all_subsystem_sets, partial_transpose, reduce_subsystem_sets, symmetrize
from .validation import (
    TensorShape,
    check_angles,
    check_bipartite,
    check_matrix,
    check_shape,
    check_symmetric,
    is_symmetric,
    max_abs,
    same_dims,
)

Kind = Literal["min", "max"]
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    """Tolerances for the endpoint searches.

    ``value_tol`` is relative to the largest absolute entry of the input.
    """

    angle_tol: float = 1e-12
    value_tol: float = 1e-9
    p_rtol: float = 1e-12
    p_limit: float = 1e6
    max_steps: int = 200
    subgradient_iters: int = 500
    solver: SolverConfig = field(default_factory=SolverConfig)


@dataclass(frozen=True)
class SupportEvaluation:
    theta: float
    support_value: float
    witness: np.ndarray
    point: tuple[float, float]
    converged: bool = True


@dataclass
class DiagonalBound:
    """A certified endpoint of the diagonal slice of a (joint) numerical range.

    ``outer`` is the certificate (``mu_max <= outer`` for ``kind="max"``,
    ``mu_min >= outer`` for ``kind="min"``); ``inner`` is a value known to lie
    in the slice, or ``None`` when no such value was produced.
    """

    kind: Kind
    outer: float
    inner: float | None
    evaluations: int
    method: str
    converged: bool = True
    weights: tuple[float, ...] | None = None
    witness: np.ndarray | None = field(default=None, repr=False)
    notes: list[str] = field(default_factory=list)

    @property
    def gap(self) -> float | None:
        if self.inner is None:
            return None
        return self.outer - self.inner if self.kind == "max" else self.inner - self.outer

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "outer": self.outer,
            "inner": self.inner,
            "gap": self.gap,
            "evaluations": self.evaluations,
            "method": self.method,
            "converged": self.converged,
            "weights": list(self.weights) if self.weights is not None else None,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class AffineFamily:
    """Matrices ``A_1..A_k`` with weights summing to one; ``matrix()`` is their combination."""

    matrices: tuple
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.matrices) != len(self.weights) or not self.matrices:
            raise ValueError("need as many weights as matrices, and at least one")
        same_dims(self.matrices)
        if abs(sum(self.weights) - 1.0) > 1e-14 * max(1.0, sum(abs(w) for w in self.weights)):
            raise ValueError(f"weights sum to {sum(self.weights)!r}, not 1")

    def matrix(self):
        return _combine(self.matrices, self.weights)


def _combine(mats, coefs):
    out = None
    for A, c in zip(mats, coefs):
        if c == 0.0:
            continue
        out = c * A if out is None else out + c * A
    if out is None:
        out = 0.0 * mats[0]
    return sp.csr_array(out) if sp.issparse(out) else out


class _Support:
    """Support-function evaluator for a pair of symmetric matrices, with warm starts."""

    def __init__(self, A1, A2, solver: SolverConfig):
        self.A1, self.A2, self.solver = A1, A2, solver
        self.count = 0
        self.converged = True
        self._last: np.ndarray | None = None

    def __call__(self, u1: float, u2: float) -> tuple[EigenPair, tuple[float, float]]:
        M = _combine((self.A1, self.A2), (u1, u2))
        pair = extreme_eigenpair(M, "max", self.solver, v0=self._last, assume_symmetric=True)
        self.count += 1
        self.converged &= pair.converged
        self._last = pair.vector
        x = pair.vector
        return pair, (float(x @ (self.A1 @ x)), float(x @ (self.A2 @ x)))


def _prepare_pair(B, shape):
    B = check_matrix(B)
    shape = check_shape(B, shape)
    check_bipartite(shape)
    B = check_symmetric(B)
    return B, partial_transpose(B, shape), shape


def support_point(B, Bg, theta: float, cfg: SearchConfig | None = None) -> SupportEvaluation:
    """Boundary point of ``W(B + i Bg)`` whose outward normal is ``(cos theta, -sin theta)``."""
    cfg = cfg or SearchConfig()
    B = check_symmetric(check_matrix(B))
    Bg = check_symmetric(check_matrix(Bg))
    same_dims((B, Bg))
    pair, point = _Support(B, Bg, cfg.solver)(math.cos(theta), -math.sin(theta))
    return SupportEvaluation(float(theta), pair.value, pair.vector, point, pair.converged)


@dataclass
class Boundary:
    evaluations: list[SupportEvaluation]
    inner_polygon: np.ndarray
    outer_polygon: np.ndarray

    @property
    def inner_area(self) -> float:
        return polygon_area(self.inner_polygon)

    @property
    def outer_area(self) -> float:
        return polygon_area(self.outer_polygon)

    def rows(self):
        for e in self.evaluations:
            yield e.theta, e.support_value, e.point[0], e.point[1]


def polygon_area(vertices: np.ndarray) -> float:
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def boundary(B, shape, n_angles: int = 360, cfg: SearchConfig | None = None,
             threads: int = 1) -> Boundary:
    """Sample the boundary of ``W(B + i B^Γ)`` at evenly spaced normal angles.

    The sampled points form an inner polygon; the supporting lines at those
    angles intersect in an outer polygon.
    """
    cfg = cfg or SearchConfig()
    n_angles = check_angles(n_angles)
    B, G, _ = _prepare_pair(B, shape)
    thetas = 2 * np.pi * np.arange(n_angles) / n_angles

    def one(t):
        return support_point(B, G, float(t), cfg)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            evals = list(pool.map(one, thetas))
    else:
        evals = [one(t) for t in thetas]
    inner = np.array([e.point for e in evals])
    h = np.array([e.support_value for e in evals])
    c, s = np.cos(thetas), -np.sin(thetas)
    outer = np.empty((n_angles, 2))
    for i in range(n_angles):
        j = (i + 1) % n_angles
        outer[i] = np.linalg.solve([[c[i], s[i]], [c[j], s[j]]], [h[i], h[j]])
    return Boundary(evals, inner, outer)


# -- endpoint searches ---------------------------------------------------------


class _Slice:
    """Bookkeeping for the line ``{c * d}``: side tests, chord crossings, best points."""

    def __init__(self, d: tuple[float, float]):
        self.d = np.asarray(d, dtype=np.float64)
        self.dd = float(self.d @ self.d)
        self.left = None   # (side, point), side >= 0, closest to the line so far
        self.right = None  # side <= 0
        self.inner = -math.inf
        self.witness = None

    def side(self, z) -> float:
        return float(self.d[0] * z[1] - self.d[1] * z[0])

    def value(self, z) -> float:
        return float(self.d @ np.asarray(z)) / self.dd

    def add(self, z, x=None) -> float:
        s = self.side(z)
        if s == 0.0:
            self._offer(self.value(z), x)
        if s >= 0.0 and (self.left is None or s <= self.left[0]):
            self.left = (s, z, x)
        if s <= 0.0 and (self.right is None or s >= self.right[0]):
            self.right = (s, z, x)
        if self.left is not None and self.right is not None:
            self._offer(self._chord())
        return s

    def _offer(self, c: float, x=None):
        if c > self.inner:
            self.inner = c
            if x is not None:
                self.witness = x

    def _chord(self) -> float:
        sl, zl, _ = self.left
        sr, zr, _ = self.right
        if sl == sr:
            return max(self.value(zl), self.value(zr))
        t = sl / (sl - sr)
        z = (1 - t) * np.asarray(zl) + t * np.asarray(zr)
        return self.value(z)


def _angle_search(A1, A2, d: tuple[float, float], scale: float, cfg: SearchConfig) -> DiagonalBound:
    """Largest ``c`` with ``c * d`` in ``W(A1 + i A2)`` by bisection on the normal angle."""
    alpha = math.atan2(d[1], d[0])
    t_left, t_right = -alpha - math.pi / 2, -alpha + math.pi / 2
    support = _Support(A1, A2, cfg.solver)
    line = _Slice(d)
    dn = math.hypot(*d)
    outer = math.inf
    tol = cfg.value_tol * scale
    for t in (t_left, t_right):
        _, z = support(math.cos(t), -math.sin(t))
        line.add(z)
    steps = 0
    while t_right - t_left > cfg.angle_tol and steps < cfg.max_steps:
        steps += 1
        t = 0.5 * (t_left + t_right)
        u = (math.cos(t), -math.sin(t))
        pair, z = support(*u)
        ud = u[0] * d[0] + u[1] * d[1]
        if ud > 1e-15 * dn:
            outer = min(outer, pair.value / ud)
        s = line.add(z, pair.vector)
        if s >= 0.0:
            t_left = t
        else:
            t_right = t
        if outer - line.inner <= tol:
            break
    if not math.isfinite(outer):
        # bracket collapsed before any usable normal: W meets the line in one point
        outer = line.inner
    return DiagonalBound("max", outer, line.inner, support.count, "angle", support.converged,
                         witness=line.witness)


def _golden_search(A1, A2, scale: float, cfg: SearchConfig, method: str) -> DiagonalBound:
    """Minimize the convex function ``p -> lambda_max(p A1 + (1 - p) A2)``.

    The bracket starts at ``[-1, 2]`` and doubles outward until the
    subgradients at its ends point inward, then golden-section search narrows it.
    """
    support = _Support(A1, A2, cfg.solver)
    line = _Slice((1.0, 1.0))
    best = [math.inf, None]
    tol = cfg.value_tol * scale
    notes: list[str] = []

    def f(p):
        pair, z = support(p, 1.0 - p)
        line.add(z, pair.vector)
        if pair.value < best[0]:
            best[0], best[1] = pair.value, p
        return pair.value, z[0] - z[1]

    a, b = -1.0, 2.0
    fa, ga = f(a)
    fb, gb = f(b)
    while ga > 0.0 or gb < 0.0:
        width = b - a
        if ga > 0.0:
            a -= width
            fa, ga = f(a)
        if gb < 0.0:
            b += width
            fb, gb = f(b)
        if max(abs(a), abs(b)) > cfg.p_limit:
            notes.append(f"bracket exceeded p_limit={cfg.p_limit:g}; optimum may lie further out")
            break
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, _ = f(x1)
    f2, _ = f(x2)
    steps = 0
    while (b - a) > cfg.p_rtol * max(1.0, abs(a), abs(b)) and steps < cfg.max_steps:
        steps += 1
        if best[0] - line.inner <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1, _ = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2, _ = f(x2)
    p = best[1]
    return DiagonalBound("max", best[0], line.inner, support.count, method, support.converged,
                         weights=(p, 1.0 - p), witness=line.witness, notes=notes)


def _mirror(bound: DiagonalBound, kind: Kind) -> DiagonalBound:
    """Map a max-endpoint result computed on negated data back to ``kind``."""
    if kind == "max":
        return bound
    return replace(bound, kind="min", outer=-bound.outer,
                   inner=None if bound.inner is None else -bound.inner)


def _scale(*mats) -> float:
    return max([1e-300] + [max_abs(M) for M in mats])


def _check_kind(kind: str) -> None:
    if kind not in ("min", "max"):
        raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")


def w_diag_angle(B, shape, kind: Kind = "max", cfg: SearchConfig | None = None) -> DiagonalBound:
    """Endpoint of ``{c : c(1+i) in W(B + i B^Γ)}`` by bisection over tangent angles."""
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    B, G, _ = _prepare_pair(B, shape)
    d = (1.0, 1.0) if kind == "max" else (-1.0, -1.0)
    return _mirror(_angle_search(B, G, d, _scale(B), cfg), kind)


def w_diag_ternary(B, shape, kind: Kind = "max", cfg: SearchConfig | None = None) -> DiagonalBound:
    """Same endpoint as :func:`w_diag_angle`, via ``min_p lambda_max(pB + (1-p)B^Γ)``."""
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    B, G, _ = _prepare_pair(B, shape)
    if kind == "min":
        B, G = -B, -G
    return _mirror(_golden_search(B, G, _scale(B), cfg, "ternary"), kind)


def w_diag_scaled(B, shape, kind: Kind = "max", y: float = 1.0, z: float = 1.0,
                  cfg: SearchConfig | None = None) -> DiagonalBound:
    """Endpoint of ``{c : c(y + iz) in W(yB + izB^Γ)}``; equal to the ``1 + i`` endpoint."""
    _check_kind(kind)
    if y == 0 or z == 0:
        raise ValueError("y and z must both be non-zero (zero collapses to the eigenvalue bounds)")
    cfg = cfg or SearchConfig()
    B, G, _ = _prepare_pair(B, shape)
    d = (float(y), float(z)) if kind == "max" else (-float(y), -float(z))
    bound = _angle_search(y * B, z * G, d, _scale(B), cfg)
    bound.method = "scaled-angle"
    return _mirror(bound, kind)


# -- multipartite ---------------------------------------------------------------


def _subgradient_then_cuts(mats, scale: float, cfg: SearchConfig):
    """Minimize ``lambda_max(sum_j p_j A_j)`` subject to ``sum_j p_j = 1`` for ``k >= 3``.

    Projected subgradient steps with a Polyak step length and an adaptive
    target warm-start a Kelley cutting-plane refinement; the cutting-plane
    model also yields a lower bound on the optimum, used as the stopping test.
    Weights are parametrized as ``p = e_k + sum_{j<k} q_j (e_j - e_k)``.
    """
    k = len(mats)
    diffs = [A - mats[-1] for A in mats[:-1]]
    last = [None]
    evals = [0]
    converged = [True]

    def evaluate(q):
        M = _combine([mats[-1]] + diffs, [1.0] + list(q))
        pair = extreme_eigenpair(M, "max", cfg.solver, v0=last[0], assume_symmetric=True)
        last[0] = pair.vector
        evals[0] += 1
        converged[0] &= pair.converged
        x = pair.vector
        forms = np.array([float(x @ (A @ x)) for A in mats])
        return pair.value, forms[:-1] - forms[-1], forms, x

    tol = cfg.value_tol * scale
    q = np.full(k - 1, 1.0 / k)
    f, g, forms, x = evaluate(q)
    cuts = [(q.copy(), f, g.copy())]
    best = (f, q.copy(), forms, x)
    delta = max(abs(f), scale) * 0.1
    stall = 0
    for _ in range(cfg.subgradient_iters * k):
        gg = float(g @ g)
        if gg <= (tol / max(1.0, np.linalg.norm(q))) ** 2:
            break
        target = best[0] - delta
        q = q - (f - target) / gg * g
        f, g, forms, x = evaluate(q)
        cuts.append((q.copy(), f, g.copy()))
        if f < best[0] - 1e-3 * delta:
            best = (f, q.copy(), forms, x)
            stall = 0
        else:
            stall += 1
            if stall >= 10:
                delta *= 0.5
                stall = 0
        if delta <= tol:
            break

    radius = max(1.0, 2.0 * float(np.max(np.abs(best[1]))))
    lower = -math.inf
    for _ in range(cfg.max_steps):
        center = best[1]
        A_ub = np.array([np.append(gi, -1.0) for _, _, gi in cuts])
        b_ub = np.array([float(gi @ qi) - fi for qi, fi, gi in cuts])
        bounds = [(c - radius, c + radius) for c in center] + [(None, None)]
        res = linprog(np.append(np.zeros(k - 1), 1.0), A_ub=A_ub, b_ub=b_ub, bounds=bounds,
                      method="highs")
        if res.status != 0:
            break
        qn, lower = res.x[:-1], float(res.x[-1])
        on_edge = np.any(np.abs(np.abs(qn - center) - radius) <= 1e-9 * radius)
        if best[0] - lower <= tol and not on_edge:
            break
        if on_edge and radius < cfg.p_limit:
            radius *= 2.0
        f, g, forms, x = evaluate(qn)
        cuts.append((qn.copy(), f, g.copy()))
        if f < best[0]:
            best = (f, qn.copy(), forms, x)
    f, q, forms, x = best
    weights = tuple(float(v) for v in np.append(q, 1.0 - q.sum()))
    return f, weights, forms, x, evals[0], converged[0], lower


def w_joint_diag(B, shape, P: Sequence, kind: Kind = "max",
                 cfg: SearchConfig | None = None) -> DiagonalBound:
    """Endpoint of ``{c : (c,...,c) in W(Γ_S1(B), ..., Γ_Sk(B))}`` over the sets in ``P``.

    Computed as ``min lambda_max(sum_j p_j Γ_Sj(B))`` over weights summing to
    one (``max lambda_min`` for ``kind="min"``).  ``P`` is first reduced so
    that no set appears together with its complement.
    """
    _check_kind(kind)
    cfg = cfg or SearchConfig()
    B = check_matrix(B)
    shape = check_shape(B, shape)
    B = check_symmetric(B)
    P = list(P)
    if not P:
        raise ValueError("P must contain at least one subsystem set")
    sets = reduce_subsystem_sets(P, shape)
    notes = []
    if len(sets) < len(P):
        notes.append(f"reduced P from {len(P)} to {len(sets)} sets (complements/duplicates)")
    sign = 1.0 if kind == "max" else -1.0
    mats = [sign * partial_transpose(B, shape, S) for S in sets]
    scale = _scale(B)
    labels = [S.members for S in sets]
    if len(mats) == 1:
        pair = extreme_eigenpair(mats[0], "max", cfg.solver, assume_symmetric=True)
        bound = DiagonalBound("max", pair.value, pair.value, 1, "joint", pair.converged,
                              weights=(1.0,), witness=pair.vector)
    elif len(mats) == 2:
        bound = _golden_search(mats[0], mats[1], scale, cfg, "joint")
    else:
        f, weights, forms, x, count, ok, lower = _subgradient_then_cuts(mats, scale, cfg)
        agree = float(np.ptp(forms)) <= AGREEMENT_TOL * max(1.0, scale)
        inner = float(np.mean(forms)) if agree else None
        bound = DiagonalBound("max", f, inner, count, "joint", ok, weights=weights, witness=x)
        if math.isfinite(lower):
            notes.append(f"cutting-plane lower bound on the eigenvalue optimum: {sign * lower!r}")
        if inner is None:
            notes.append("quadratic forms disagree at the witness; no inner value recorded")
    bound.notes = notes + bound.notes + [f"sets: {labels}"]
    return _mirror(bound, kind)


# -- baselines and one-stop entry point ------------------------------------------------


@dataclass
class TrivialBounds:
    """Eigenvalue intervals of ``B`` and of each single-factor partial transpose."""

    intervals: dict[str, tuple[float, float]]

    @property
    def best_min(self) -> float:
        return max(lo for lo, _ in self.intervals.values())

    @property
    def best_max(self) -> float:
        return min(hi for _, hi in self.intervals.values())

    def to_dict(self) -> dict:
        return {name: {"lambda_min": lo, "lambda_max": hi} for name, (lo, hi) in self.intervals.items()}


def trivial_bounds(B, shape, cfg: SearchConfig | None = None) -> TrivialBounds:
    cfg = cfg or SearchConfig()
    B = check_matrix(B)
    shape = check_shape(B, shape)
    B = check_symmetric(B)
    intervals = {"B": eigenvalue_interval(B, cfg.solver)}
    for j in range(1, shape.n_factors + 1):
        intervals[f"PT{{{j}}}"] = eigenvalue_interval(partial_transpose(B, shape, (j,)), cfg.solver)
    return TrivialBounds(intervals)


@dataclass
class BoundReport:
    shape: TensorShape
    method: str
    min: DiagonalBound
    max: DiagonalBound
    trivial: TrivialBounds
    notes: list[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.min.converged and self.max.converged

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape.factor_dims),
            "method": self.method,
            "outer_min": self.min.outer,
            "outer_max": self.max.outer,
            "inner_min": self.min.inner,
            "inner_max": self.max.inner,
            "min": self.min.to_dict(),
            "max": self.max.to_dict(),
            "trivial": self.trivial.to_dict(),
            "converged": self.converged,
            "notes": list(self.notes),
        }


def bound(B, shape, method: str = "auto", P: Sequence | None = None,
          cfg: SearchConfig | None = None) -> BoundReport:
    """Both endpoints plus the trivial bounds.

    Non-symmetric input is replaced by ``(B + B^T)/2``, which has the same
    product-vector quadratic form; a note records it.
    """
    cfg = cfg or SearchConfig()
    B = check_matrix(B)
    shape = check_shape(B, shape)
    notes = []
    if not is_symmetric(B):
        B = symmetrize(B)
        notes.append("input was not symmetric; bounded (B + B^T)/2 instead")
    else:
        B = check_symmetric(B)
    if method == "auto":
        method = "angle" if shape.is_bipartite and P is None else "joint"
    if method == "joint":
        if P is None:
            P = all_subsystem_sets(shape)
        lo = w_joint_diag(B, shape, P, "min", cfg)
        hi = w_joint_diag(B, shape, P, "max", cfg)
    elif method in ("angle", "ternary"):
        if P is not None:
            raise ValueError("P is only used with the joint method")
        fn = w_diag_angle if method == "angle" else w_diag_ternary
        lo, hi = fn(B, shape, "min", cfg), fn(B, shape, "max", cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BoundReport(shape, method, lo, hi, trivial_bounds(B, shape, cfg), notes)
