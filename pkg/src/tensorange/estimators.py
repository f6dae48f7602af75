"""scikit-learn style wrappers around the functional API.

The estimators hold their settings as constructor parameters (so ``get_params``
and ``clone`` work) and store results in trailing-underscore attributes after
``fit``.  Nothing here adds numerics.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .applications import (
    DEFAULT_MARGIN,
    certify_entanglement_witness,
    certify_positive_map,
    certify_rank_one_avoiding,
)
from .eigen import SolverConfig
from .numrange import SearchConfig, bound
from .validation import as_shape


class _Configured(BaseEstimator):
    def _search_config(self) -> SearchConfig:
        solver = SolverConfig(method=self.eig_method, tolerance=self.eig_tol, seed=self.seed)
        return SearchConfig(angle_tol=self.angle_tol, value_tol=self.value_tol, solver=solver)


class NumericalRangeBound(_Configured):
    """Certified interval ``[min_, max_]`` containing every product-vector value of ``B``.

    >>> est = NumericalRangeBound(shape=(2, 2)).fit(np.eye(4))
    >>> round(est.min_, 12), round(est.max_, 12)
    (1.0, 1.0)
    """

    def __init__(self, shape=(2, 2), method="auto", p_sets=None, angle_tol=1e-12,
                 value_tol=1e-9, eig_tol=1e-10, eig_method="auto", seed=0):
        self.shape = shape
        self.method = method
        self.p_sets = p_sets
        self.angle_tol = angle_tol
        self.value_tol = value_tol
        self.eig_tol = eig_tol
        self.eig_method = eig_method
        self.seed = seed

    def fit(self, B, y=None):
        report = bound(B, as_shape(self.shape), self.method, self.p_sets, self._search_config())
        self.report_ = report
        self.min_ = report.min.outer
        self.max_ = report.max.outer
        self.inner_min_ = report.min.inner
        self.inner_max_ = report.max.inner
        self.trivial_ = report.trivial
        self.converged_ = report.converged
        return self

    def contains(self, values, atol=0.0) -> np.ndarray:
        """Elementwise test that candidate values lie in the certified interval."""
        check_is_fitted(self, "min_")
        v = np.asarray(values, dtype=np.float64)
        return (v >= self.min_ - atol) & (v <= self.max_ + atol)


class JointNumericalRangeBound(NumericalRangeBound):
    """Multipartite variant; ``p_sets`` lists the partial-transpose sets (default: all)."""

    def __init__(self, shape=(2, 2, 2), p_sets=None, angle_tol=1e-12, value_tol=1e-9,
                 eig_tol=1e-10, eig_method="auto", seed=0):
        super().__init__(shape=shape, method="joint", p_sets=p_sets, angle_tol=angle_tol,
                         value_tol=value_tol, eig_tol=eig_tol, eig_method=eig_method, seed=seed)


class _Certifier(_Configured):
    def _store(self, report):
        self.report_ = report
        self.verdict_ = report.verdict
        self.headline_value_ = report.headline_value
        self.certified_ = report.certified
        return self

    def predict(self, X=None) -> bool:
        check_is_fitted(self, "verdict_")
        return self.certified_


class RankOneAvoidingCertifier(_Certifier):
    """``fit`` takes a list of equally sized basis matrices."""

    def __init__(self, margin=DEFAULT_MARGIN, method="angle", angle_tol=1e-12, value_tol=1e-9,
                 eig_tol=1e-10, eig_method="auto", seed=0):
        self.margin = margin
        self.method = method
        self.angle_tol = angle_tol
        self.value_tol = value_tol
        self.eig_tol = eig_tol
        self.eig_method = eig_method
        self.seed = seed

    def fit(self, basis, y=None):
        return self._store(certify_rank_one_avoiding(basis, self._search_config(), self.margin,
                                                     self.method))


class PositiveMapCertifier(_Certifier):
    def __init__(self, m=3, n=3, margin=DEFAULT_MARGIN, method="angle", angle_tol=1e-12,
                 value_tol=1e-9, eig_tol=1e-10, eig_method="auto", seed=0):
        self.m = m
        self.n = n
        self.margin = margin
        self.method = method
        self.angle_tol = angle_tol
        self.value_tol = value_tol
        self.eig_tol = eig_tol
        self.eig_method = eig_method
        self.seed = seed

    def fit(self, choi, y=None):
        return self._store(certify_positive_map(choi, self.m, self.n, self._search_config(),
                                                self.margin, self.method))


class WitnessCertifier(_Certifier):
    def __init__(self, shape=(3, 3), margin=DEFAULT_MARGIN, method="angle", angle_tol=1e-12,
                 value_tol=1e-9, eig_tol=1e-10, eig_method="auto", seed=0):
        self.shape = shape
        self.margin = margin
        self.method = method
        self.angle_tol = angle_tol
        self.value_tol = value_tol
        self.eig_tol = eig_tol
        self.eig_method = eig_method
        self.seed = seed

    def fit(self, B, y=None):
        report = certify_entanglement_witness(B, as_shape(self.shape), self._search_config(),
                                              self.margin, self.method)
        self.c_star_ = report.details["c_star"]
        return self._store(report)
