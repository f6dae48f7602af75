import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorange.tensor import (
    MapBlocks,
    all_subsystem_sets,
    choi_from_blocks,
    full_symmetrize,
    generalized_choi_map,
    is_transpose_preserving,
    kraus_map,
    orthonormal_basis,
    partial_symmetrize,
    partial_transpose,
    product_vector,
    projector_onto_subspace,
    reduce_subsystem_sets,
    unvec,
    vec,
)
from tensorange.validation import SubsystemSet

shapes = st.lists(st.integers(1, 3), min_size=2, max_size=3).map(tuple)


def _sym(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return A + A.T


def test_partial_transpose_2x2_blocks():
    B = np.arange(16.0).reshape(4, 4)
    G = partial_transpose(B, (2, 2))
    for i in range(2):
        for j in range(2):
            np.testing.assert_array_equal(G[2 * i:2 * i + 2, 2 * j:2 * j + 2],
                                          B[2 * i:2 * i + 2, 2 * j:2 * j + 2].T)


def test_partial_transpose_first_factor_swaps_blocks():
    B = np.arange(16.0).reshape(4, 4)
    G = partial_transpose(B, (2, 2), (1,))
    np.testing.assert_array_equal(G[0:2, 2:4], B[2:4, 0:2])


@settings(max_examples=60, deadline=None)
@given(shapes, st.integers(0, 2**31 - 1), st.data())
def test_sparse_matches_dense(shape, seed, data):
    n = int(np.prod(shape))
    S = data.draw(st.sets(st.integers(1, len(shape))))
    B = np.random.default_rng(seed).standard_normal((n, n))
    B[np.abs(B) < 0.7] = 0.0
    dense = partial_transpose(B, shape, S)
    sparse = partial_transpose(sp.csr_array(B), shape, S)
    assert sp.issparse(sparse)
    np.testing.assert_array_equal(sparse.toarray(), dense)


@settings(max_examples=60, deadline=None)
@given(shapes, st.integers(0, 2**31 - 1), st.data())
def test_composition_is_symmetric_difference(shape, seed, data):
    p = len(shape)
    S1 = SubsystemSet.of(data.draw(st.sets(st.integers(1, p))))
    S2 = SubsystemSet.of(data.draw(st.sets(st.integers(1, p))))
    B = np.random.default_rng(seed).standard_normal((int(np.prod(shape)),) * 2)
    lhs = partial_transpose(partial_transpose(B, shape, S2), shape, S1)
    np.testing.assert_array_equal(lhs, partial_transpose(B, shape, S1 ^ S2))


def test_full_transpose_is_all_factors():
    B = np.random.default_rng(1).standard_normal((12, 12))
    np.testing.assert_array_equal(partial_transpose(B, (2, 3, 2), (1, 2, 3)), B.T)


def test_partial_symmetrize_parts():
    B = _sym(9, 3)
    X, Y = partial_symmetrize(B, (3, 3))
    np.testing.assert_allclose(X + Y, B, atol=1e-15)
    np.testing.assert_array_equal(partial_transpose(Y, (3, 3)), -Y)
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = product_vector([rng.standard_normal(3), rng.standard_normal(3)])
        assert abs(x @ Y @ x) <= 1e-12 * np.linalg.norm(Y) * (x @ x)


def test_full_symmetrize_invariances():
    B = np.random.default_rng(5).standard_normal((6, 6))
    X = full_symmetrize(B, (2, 3))
    np.testing.assert_array_equal(X, X.T)
    np.testing.assert_allclose(partial_transpose(X, (2, 3)), X, atol=1e-15)


def test_vec_identity():
    rng = np.random.default_rng(6)
    Y = rng.standard_normal((3, 4))
    a, b = rng.standard_normal(4), rng.standard_normal(3)
    assert np.isclose(b @ Y @ a, vec(Y) @ np.kron(a, b))
    np.testing.assert_array_equal(unvec(vec(Y), 3, 4), Y)
    # vec only permutes entries, so the norms agree up to summation order
    np.testing.assert_array_equal(np.sort(vec(Y)), np.sort(Y.ravel()))
    assert np.isclose(np.linalg.norm(vec(Y)), np.linalg.norm(Y, "fro"), rtol=1e-15)


def test_plane_projector(plane_basis, plane_projector):
    np.testing.assert_allclose(projector_onto_subspace(plane_basis), plane_projector, atol=1e-15)


def test_orthonormal_basis_drops_dependent():
    v = np.array([1.0, 2.0, 3.0])
    Q = orthonormal_basis([v, 2 * v, np.array([0.0, 1.0, 0.0]), np.zeros(3)])
    assert Q.shape == (3, 2)
    np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-15)


def test_projector_errors():
    with pytest.raises(ValueError):
        projector_onto_subspace([])
    with pytest.raises(ValueError):
        projector_onto_subspace([np.zeros((2, 2))])
    with pytest.raises(ValueError):
        projector_onto_subspace([np.eye(2), np.eye(3)])


def test_choi_map_blocks():
    phi = generalized_choi_map(0.0)
    X = np.arange(9.0).reshape(3, 3)
    out = phi.apply(X)
    np.testing.assert_array_equal(np.diag(out), [0 + 0 + 8, 0 + 4 + 0, 0 + 4 + 8])
    assert out[0, 1] == -1.0 and out[2, 0] == -6.0
    C = choi_from_blocks(phi)
    np.testing.assert_array_equal(C[0:3, 0:3], np.diag([1.0, 1.0, 0.0]))
    np.testing.assert_array_equal(C[0:3, 3:6], -np.array([[0, 1.0, 0], [0, 0, 0], [0, 0, 0]]))
    assert is_transpose_preserving(C)[0]


@pytest.mark.parametrize("c", [0.0, 0.25, 1.0])
def test_generalized_choi_spectrum(c):
    C = choi_from_blocks(generalized_choi_map(c))
    assert np.isclose(np.linalg.eigvalsh(C)[0], -1.0)


def test_choi_roundtrip():
    rng = np.random.default_rng(7)
    phi = kraus_map([rng.standard_normal((2, 3)) for _ in range(2)])
    assert (phi.m, phi.n) == (3, 2)
    C = choi_from_blocks(phi)
    assert np.linalg.eigvalsh(C)[0] >= -1e-12
    again = MapBlocks.from_choi(C, 3, 2)
    np.testing.assert_array_equal(again.blocks, phi.blocks)
    with pytest.raises(ValueError):
        MapBlocks.from_choi(C, 2, 2)


def test_full_symmetrized_choi_reference(choi0):
    # reference written with the tensor factors in the opposite order
    reference = np.zeros((9, 9))
    np.fill_diagonal(reference, [2, 0, 2, 2, 2, 0, 0, 2, 2])
    for i, j in [(0, 4), (0, 8), (1, 3), (2, 6), (4, 8), (5, 7)]:
        reference[i, j] = reference[j, i] = -1
    reference /= 2
    X = full_symmetrize(choi0, (3, 3))
    swap = X.reshape(3, 3, 3, 3).transpose(1, 0, 3, 2).reshape(9, 9)
    np.testing.assert_array_equal(swap, reference)
    assert np.isclose(np.linalg.eigvalsh(X)[0], -(np.sqrt(2) - 1) / 2)


def test_subsystem_set_enumeration():
    sets = all_subsystem_sets((2, 2, 2))
    assert [S.members for S in sets] == [(), (2,), (3,), (2, 3)]
    assert reduce_subsystem_sets([(), (1, 2, 3), (1,), (2, 3), (2,)], (2, 2, 2)) == [
        SubsystemSet(0), SubsystemSet.of([2, 3]), SubsystemSet.of([2])]
