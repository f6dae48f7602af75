"""Certificate-producing checks built on the numerical-range bounds."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .eigen import eigenvalue_interval
from .numrange import SearchConfig, w_diag_angle, w_diag_ternary
from .tensor import (
    full_symmetrize,
    is_transpose_preserving,
    partial_transpose,
    projector_onto_subspace,
    symmetrize,
    unvec,
)
from .validation import check_bipartite, check_matrix, check_shape, is_symmetric

DEFAULT_MARGIN = 1e-8

CERTIFIED = "certified"
CERTIFIED_POSITIVE = "certified-positive"
INCONCLUSIVE = "inconclusive"


def json_safe(value):
    """Recursively convert numpy scalars to Python and non-finite floats to ``None``."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return json_safe(value.item())
    return value


def digest(*arrays) -> dict:
    """Dimensions and a SHA-256 of the inputs, for report provenance."""
    h = hashlib.sha256()
    dims = []
    for A in arrays:
        if sp.issparse(A):
            A = sp.csr_array(A)
            A.sum_duplicates()
            A.sort_indices()
            for part in (A.indptr, A.indices, A.data):
                h.update(np.ascontiguousarray(part).tobytes())
        else:
            A = np.ascontiguousarray(A, dtype=np.float64)
            h.update(A.tobytes())
        dims.append(list(A.shape))
    return {"dims": dims, "sha256": h.hexdigest()}


@dataclass
class CertificateReport:
    """Outcome of one certification check.

    The JSON field names (``verdict``, ``headline_value``, ``baselines``,
    ``details``, ``inputs_digest``) are stable.
    """

    verdict: str
    headline_value: float
    baselines: dict
    details: dict
    inputs_digest: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self) -> dict:
        return json_safe(asdict(self))

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)


def _endpoint(B, shape, kind, cfg, method):
    fn = w_diag_ternary if method == "ternary" else w_diag_angle
    return fn(B, shape, kind, cfg)


def certify_rank_one_avoiding(basis: Sequence, cfg: SearchConfig | None = None,
                              margin: float = DEFAULT_MARGIN, method: str = "angle") -> CertificateReport:
    """Show that ``span(basis)`` (``m x n`` matrices) contains no rank-one matrix.

    The largest squared operator norm over unit-Frobenius members of the span
    equals the product-vector maximum of the projector onto ``vec(span)``, so an
    upper bound below one certifies the subspace.
    """
    cfg = cfg or SearchConfig()
    basis = [np.asarray(Y, dtype=np.float64) for Y in basis]
    if not basis:
        raise ValueError("empty basis")
    m, n = basis[0].shape
    P = projector_onto_subspace(basis)
    shape = (n, m)
    w = _endpoint(P, shape, "max", cfg, method)
    lam_pg = eigenvalue_interval(partial_transpose(P, shape), cfg.solver)[1]
    verdict = CERTIFIED if w.outer < 1.0 - margin else INCONCLUSIVE
    return CertificateReport(
        verdict=verdict,
        headline_value=w.outer,
        baselines={"lambda_max_P": eigenvalue_interval(P, cfg.solver)[1], "lambda_max_P_pt": lam_pg},
        details={
            "certifies": "rank-one-avoiding",
            "m": m,
            "n": n,
            "subspace_dim": int(round(np.trace(P))),
            "d_S_upper_bound": math.sqrt(max(w.outer, 0.0)),
            "threshold": 1.0 - margin,
            "margin": margin,
            "bound": w.to_dict(),
        },
        inputs_digest=digest(*basis),
    )


def certify_positive_map(choi, m: int, n: int, cfg: SearchConfig | None = None,
                         margin: float = DEFAULT_MARGIN, method: str = "angle") -> CertificateReport:
    """Certify that the map with Choi matrix ``choi`` (``mn x mn``) is positive.

    A non-negative lower endpoint means the map splits into a completely
    positive part plus a part vanishing on symmetric matrices.
    """
    cfg = cfg or SearchConfig()
    C = check_matrix(choi)
    shape = check_shape(C, (m, n))
    ok, defect = is_transpose_preserving(C)
    if not ok:
        raise ValueError(f"Choi matrix is not symmetric (defect {defect:.3e}); "
                         "the map is not transpose-preserving")
    C = symmetrize(C)
    w = _endpoint(C, shape, "min", cfg, method)
    lam_c = eigenvalue_interval(C, cfg.solver)[0]
    lam_cg = eigenvalue_interval(partial_transpose(C, shape), cfg.solver)[0]
    verdict = CERTIFIED_POSITIVE if w.outer >= -margin else INCONCLUSIVE
    return CertificateReport(
        verdict=verdict,
        headline_value=w.outer,
        baselines={"lambda_min_C": lam_c, "lambda_min_C_pt": lam_cg},
        details={
            "certifies": "decomposable",
            "m": m,
            "n": n,
            "transpose_defect": defect,
            "threshold": -margin,
            "margin": margin,
            "bound": w.to_dict(),
        },
        inputs_digest=digest(C),
    )


def certify_entanglement_witness(B, shape, cfg: SearchConfig | None = None,
                                 margin: float = DEFAULT_MARGIN, method: str = "angle") -> CertificateReport:
    """Decide whether ``X = (B + B^T + B^Γ + (B^T)^Γ)/4`` is certified as an entanglement witness.

    ``X`` is certified when the lower endpoint for ``B`` is non-negative while
    ``X`` itself has a negative eigenvalue.  ``c_star`` is the smallest shift
    for which ``X + cI`` passes the first test.
    """
    cfg = cfg or SearchConfig()
    B = check_matrix(B)
    shape = check_shape(B, shape)
    check_bipartite(shape)
    notes = []
    Bs = B
    if not is_symmetric(B):
        Bs = symmetrize(B)
        notes.append("input was not symmetric; bounded (B + B^T)/2 instead")
    X = full_symmetrize(B, shape)
    w = _endpoint(Bs, shape, "min", cfg, method)
    lam_x = eigenvalue_interval(X, cfg.solver)[0]
    witness = w.outer >= -margin and lam_x < -margin
    return CertificateReport(
        verdict=CERTIFIED if witness else INCONCLUSIVE,
        headline_value=w.outer,
        baselines={"lambda_min_X": lam_x, "c_eigen": -lam_x},
        details={
            "certifies": "witness",
            "shape": list(shape.factor_dims),
            "c_star": -w.outer,
            "c_star_beats_eigen": -w.outer < -lam_x,
            "margin": margin,
            "bound": w.to_dict(),
            "notes": notes,
        },
        inputs_digest=digest(B),
    )


@dataclass
class StudyResult:
    m: int
    n: int
    k: int
    trials: int
    seed: int
    probability: float
    values: list[float]
    certified: list[bool]

    def to_dict(self) -> dict:
        return json_safe(asdict(self))


def random_subspace(m: int, n: int, k: int, rng) -> list[np.ndarray]:
    """Basis of a Haar-random ``k``-dimensional subspace of ``m x n`` matrices."""
    Q, _ = np.linalg.qr(rng.standard_normal((m * n, k)))
    return [unvec(Q[:, j], m, n) for j in range(k)]


def random_subspace_study(m: int, n: int, k: int, trials: int = 1000, seed: int = 0,
                          cfg: SearchConfig | None = None, margin: float = DEFAULT_MARGIN,
                          method: str = "angle", threads: int = 1) -> StudyResult:
    """Fraction of random ``k``-dimensional subspaces certified rank-one-avoiding.

    Trial ``i`` draws from its own stream spawned off ``seed``, so results do
    not depend on ``threads``.
    """
    if not 1 <= k <= m * n:
        raise ValueError(f"k must lie in [1, {m * n}], got {k}")
    cfg = cfg or SearchConfig()
    streams = np.random.SeedSequence(seed).spawn(trials)

    def trial(ss):
        basis = random_subspace(m, n, k, np.random.default_rng(ss))
        r = certify_rank_one_avoiding(basis, cfg, margin, method)
        return r.headline_value, r.certified

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(trial, streams))
    else:
        results = [trial(ss) for ss in streams]
    values = [v for v, _ in results]
    flags = [c for _, c in results]
    prob = sum(flags) / trials if trials else math.nan
    return StudyResult(m, n, k, trials, seed, prob, values, flags)
