import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transdirac import ValidationError, build_clifford, chirality_grading, clifford_vector
from transdirac.clifford import PAULI, anticommutator_table


@pytest.mark.parametrize("n", range(1, 9))
def test_anticommutators_exact(n):
    rep = build_clifford(n)
    assert rep.generators[0].shape == (2 ** (n // 2),) * 2
    assert anticommutator_table(rep).max() == 0.0


def test_n3_is_pauli():
    for c, p in zip(build_clifford(3).generators, PAULI):
        assert np.array_equal(c, p)


@pytest.mark.parametrize("n", [0, 13, -1])
def test_dimension_bounds(n):
    with pytest.raises(ValidationError):
        build_clifford(n)


def test_dimension_bound_is_configurable():
    assert build_clifford(13, max_dimension=13).n == 13


@pytest.mark.parametrize("n", [2, 4, 6])
def test_chirality_even(n):
    rep = build_clifford(n)
    gr = chirality_grading(rep)
    I = np.eye(gr.gamma.shape[0])
    assert np.allclose(gr.gamma @ gr.gamma, I)
    assert np.allclose(gr.gamma, gr.gamma.conj().T)
    for c in rep.generators:
        assert np.allclose(gr.gamma @ c + c @ gr.gamma, 0)
    assert gr.basis(1).shape[1] == gr.basis(-1).shape[1] == I.shape[0] // 2


def test_chirality_n2_diagonal():
    assert np.allclose(chirality_grading(build_clifford(2)).gamma, np.diag([1, -1]))


def test_chirality_odd_rejected():
    with pytest.raises(ValidationError):
        chirality_grading(build_clifford(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.data())
def test_vector_squares_to_minus_norm(n, data):
    v = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=n, max_size=n)))
    c = clifford_vector(build_clifford(n), v)
    assert np.allclose(c @ c, -np.dot(v, v) * np.eye(c.shape[0]), atol=1e-12)
