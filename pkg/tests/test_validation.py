import numpy as np
import pytest
import scipy.sparse as sp

from tensorange.validation import (
    DimensionMismatchError,
    NotSymmetricError,
    SubsystemSet,
    TensorShape,
    as_subsystems,
    check_matrix,
    check_shape,
    check_symmetric,
    is_symmetric,
)


@pytest.mark.parametrize("text, dims", [("3,3", (3, 3)), ("2,2,2", (2, 2, 2)), (" 4 , 5 ", (4, 5))])
def test_shape_parse(text, dims):
    s = TensorShape.parse(text)
    assert s.factor_dims == dims
    assert s.total_dim == int(np.prod(dims))
    assert str(TensorShape.parse(str(s))) == str(s)


@pytest.mark.parametrize("text", ["", "3,x", "0,2", "-1,3"])
def test_shape_parse_rejects(text):
    with pytest.raises(ValueError):
        TensorShape.parse(text)


def test_subsystem_set_roundtrip():
    S = SubsystemSet.of([2, 3])
    assert S.members == (2, 3)
    assert S.mask == 0b110
    assert (S ^ SubsystemSet.of([3])).members == (2,)
    assert S.complement(TensorShape((2, 2, 2))).members == (1,)
    assert as_subsystems(2) == SubsystemSet.of([2])
    with pytest.raises(ValueError):
        SubsystemSet.of([0])
    with pytest.raises(ValueError):
        SubsystemSet.of([3]).check(TensorShape((2, 2)))


def test_check_matrix_rejects_bad_input():
    with pytest.raises(ValueError, match="square"):
        check_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="NaN"):
        check_matrix(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(DimensionMismatchError):
        check_shape(np.eye(6), (2, 2))


def test_check_matrix_normalizes_sparse():
    A = sp.coo_array(([1.0, 2.0], ([0, 0], [1, 1])), shape=(2, 2))
    B = check_matrix(A)
    assert isinstance(B, sp.csr_array)
    assert B.nnz == 1 and B[0, 1] == 3.0


def test_symmetry_tolerance():
    B = np.array([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
    assert is_symmetric(B)
    S = check_symmetric(B)
    assert np.array_equal(S, S.T)
    with pytest.raises(NotSymmetricError):
        check_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))
