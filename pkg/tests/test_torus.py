from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transdirac import ValidationError, build_clifford
from transdirac import torus


@pytest.mark.parametrize("M", [1, 4, 8])
def test_hodge_t2(M):
    assert tuple(torus.harmonic_dims(2, M, r) for r in range(3)) == (1, 2, 1)


def test_hodge_t3():
    assert tuple(torus.harmonic_dims(3, 2, r) for r in range(4)) == (1, 3, 3, 1)


@pytest.mark.parametrize("n,r", [(2, 0), (3, 0), (3, 1), (4, 1), (4, 2)])
def test_d_squared_exact(n, r):
    assert torus.d_squared_residual(n, 2, r) == 0.0


@pytest.mark.parametrize("n,r", [(2, 1), (3, 1), (3, 2)])
def test_codifferential_two_ways(n, r):
    assert torus.codifferential_agreement(n, 2, r) <= 1e-10


def test_laplacian_is_symbol_norm():
    L = torus.laplacian(2, 2, 0)
    modes = np.array(list(product(range(-2, 3), repeat=2)))
    expected = sorted((2 * np.pi) ** 2 * (modes ** 2).sum(axis=1))
    assert np.allclose(sorted(np.linalg.eigvalsh(L)), expected)


def test_circle_dirac_integers():
    rep = torus.circle_dirac(20)
    assert rep.eigenvalues == tuple(range(-20, 21))
    assert set(rep.multiplicities) == {1}


def test_dirac_t2_spectrum():
    rep = torus.dirac_t2(5)
    expected = sorted(s * 2 * np.pi * np.hypot(a, b) for a, b in product(range(-5, 6), repeat=2) for s in (1, -1))
    assert np.abs(rep.expanded() - expected).max() < 1e-9
    assert tuple(rep.metadata["kernel_by_chirality"]) == (1, 1)


def test_symbol_limit_decays_like_inverse_t():
    c1 = build_clifford(2).generators[0]
    res = torus.symbol_limit_residuals(torus.dirac_t2_operator(), np.array([1.0, 0.0]), 1j * c1)
    assert res[0] > res[1] > res[2]
    assert all(8 < a / b < 12 for a, b in zip(res, res[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_heat_supertrace_is_index(rows, cols, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(0, min(rows, cols) + 1))
    D = rng.normal(size=(rows, rank)) @ rng.normal(size=(rank, cols))
    for t in (0.1, 1.0, 10.0):
        assert abs(torus.heat_supertrace_index(D, t) - (cols - rows)) < 1e-8


def test_fourier_field_roundtrip(rng):
    vec = rng.normal(size=9 * 2) + 0j
    f = torus.FourierFormField.from_vector(2, 1, 1, vec)
    assert np.array_equal(f.to_vector(), vec)
    with pytest.raises(ValidationError):
        torus.FourierFormField.from_vector(2, 1, 1, vec[:-1])


def test_flip_check_t2():
    S = torus.dirac_t2_operator().assemble(2)
    gamma = np.kron(np.eye(S.shape[0] // 2), np.diag([1.0, -1.0]))
    rep = torus.anticommuting_flip_check(S, gamma)
    assert rep.ok
    assert all(a == b for a, b in rep.eigenspace_dims.values())


def test_flip_check_rejects_commuting_pair():
    S = np.diag([1.0, 2.0])
    with pytest.raises(ValidationError):
        torus.anticommuting_flip_check(S, np.eye(2))
