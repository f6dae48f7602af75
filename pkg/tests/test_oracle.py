import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ONE_MINUS_TWO_OVER_ROOT3, random_symmetric
from tensorange.numrange import w_diag_angle
from tensorange.oracle import ProductVector, alternating_ascent, grid_mu_2x2, sample_mu
from tensorange.tensor import product_vector


def test_sample_identity():
    s = sample_mu(np.eye(6), (2, 3), 200)
    assert s.best_min == pytest.approx(1.0) and s.best_max == pytest.approx(1.0)
    assert s.samples == 200


def test_sample_antisymmetric_is_zero(antisym_pt):
    s = sample_mu(antisym_pt, (2, 2))
    assert abs(s.best_min) < 1e-15 and abs(s.best_max) < 1e-15


def test_sample_diagonal_attains_product_basis_max():
    rng = np.random.default_rng(3)
    d = rng.standard_normal(6)
    s = sample_mu(np.diag(d), (2, 3), 20000, seed=1)
    # the optimum is attained at a product of standard basis vectors
    assert s.best_max <= d.max() + 1e-12
    assert s.best_max >= d.max() - 0.05


def test_sample_witness_reproduces_value(rng):
    B = random_symmetric(12, rng)
    s = sample_mu(B, (3, 4), 300, seed=4)
    x = s.argmax.vector()
    assert x @ B @ x == pytest.approx(s.best_max, abs=1e-12)
    assert s.argmin.evaluate(B).value == pytest.approx(s.best_min, abs=1e-12)


def test_sample_sparse_matches_dense(rng):
    B = random_symmetric(8, rng)
    a = sample_mu(B, (2, 2, 2), 500, seed=9)
    b = sample_mu(sp.csr_array(B), (2, 2, 2), 500, seed=9)
    assert a.best_max == pytest.approx(b.best_max, abs=1e-13)


def test_sample_deterministic_for_seed(rng):
    B = random_symmetric(9, rng)
    a = sample_mu(B, (3, 3), 1000, seed=2, chunk=7)
    b = sample_mu(B, (3, 3), 1000, seed=2, chunk=7)
    assert a.best_max == b.best_max and a.best_min == b.best_min
    assert a.argmax.evaluate(B).value == pytest.approx(a.best_max, abs=1e-12)
    with pytest.raises(ValueError):
        sample_mu(B, (3, 3), 0)


def test_product_vector_validation():
    with pytest.raises(ValueError):
        ProductVector((np.array([1.0, 1.0]), np.array([1.0, 0.0])))
    pv = ProductVector.random((2, 3), np.random.default_rng(0))
    assert pv.vector().shape == (6,)
    assert np.isnan(pv.value)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["min", "max"]))
def test_ascent_monotone_and_sandwiched(seed, direction):
    rng = np.random.default_rng(seed)
    B = random_symmetric(9, rng)
    pv, hist = alternating_ascent(B, (3, 3), direction=direction, seed=seed % 97)
    steps = np.diff(hist)
    if direction == "max":
        assert np.all(steps >= -1e-12)
        assert pv.value <= w_diag_angle(B, (3, 3), "max").outer + 1e-8
    else:
        assert np.all(steps <= 1e-12)
        assert pv.value >= w_diag_angle(B, (3, 3), "min").outer - 1e-8
    assert pv.value == pytest.approx(pv.evaluate(B).value, abs=1e-12)


def test_ascent_plane_projector(plane_projector):
    for seed in range(10):
        pv, _ = alternating_ascent(plane_projector, (2, 2), seed=seed)
        assert pv.value <= 0.5 + 1e-12


def test_ascent_choi_map_min(choi0):
    best = min(alternating_ascent(choi0, (3, 3), direction="min", seed=s)[0].value for s in range(50))
    assert best >= ONE_MINUS_TWO_OVER_ROOT3 - 1e-6


def test_ascent_fixed_point():
    B = np.diag([1.0, 2.0, 3.0, 4.0])
    start = ProductVector((np.array([0.0, 1.0]), np.array([0.0, 1.0])))
    pv, hist = alternating_ascent(B, (2, 2), start=start)
    assert pv.value == 4.0 and hist[0] == 4.0
    np.testing.assert_array_equal(np.abs(pv.factors[0]), [0.0, 1.0])


def test_ascent_tripartite(rng):
    B = random_symmetric(12, rng)
    pv, _ = alternating_ascent(B, (2, 3, 2), seed=3)
    assert len(pv.factors) == 3
    x = product_vector(pv.factors)
    assert x @ B @ x == pytest.approx(pv.value)


def test_ascent_rejects_mismatched_start():
    with pytest.raises(ValueError):
        alternating_ascent(np.eye(4), (2, 2), start=ProductVector((np.ones(3) / np.sqrt(3), np.array([1.0, 0]))))
    with pytest.raises(ValueError):
        alternating_ascent(np.eye(4), (2, 2), direction="up")


def test_sign_invariance(rng):
    B = random_symmetric(9, rng)
    f = ProductVector.random((3, 3), rng)
    g = ProductVector((-f.factors[0], f.factors[1]))
    assert f.evaluate(B).value == pytest.approx(g.evaluate(B).value, abs=1e-14)


def test_grid_diagonal():
    g = grid_mu_2x2(np.diag([1.0, 2.0, 3.0, 4.0]), 64)
    assert g.mu_max == 4.0 and g.mu_min == 1.0
    assert g.argmax == pytest.approx((np.pi / 2, np.pi / 2))


def test_grid_antisymmetric(antisym_pt):
    g = grid_mu_2x2(antisym_pt)
    assert abs(g.mu_min) <= 1e-15 and abs(g.mu_max) <= 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_grid_within_certified_interval(seed):
    B = random_symmetric(4, np.random.default_rng(seed))
    g = grid_mu_2x2(B, 128)
    lo, hi = w_diag_angle(B, (2, 2), "min").outer, w_diag_angle(B, (2, 2), "max").outer
    assert lo - 1e-8 <= g.mu_min and g.mu_max <= hi + 1e-8


def test_grid_errors():
    with pytest.raises(ValueError):
        grid_mu_2x2(np.eye(9))
    with pytest.raises(ValueError):
        grid_mu_2x2(np.eye(4), 4)
