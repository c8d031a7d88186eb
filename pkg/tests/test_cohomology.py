from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transdirac import ContractViolation, ValidationError
from transdirac import cohomology as co
from transdirac.fourier import TrigSeries

GOLDEN = (3 + 5 ** 0.5) / 2


@pytest.fixture(scope="module")
def carriere():
    return co.carriere_model(GOLDEN, 32)


def test_carriere_betti(carriere):
    assert co.validate_complex(carriere).valid
    assert co.cohomology_dims(carriere, twisted=True).betti == (0, 0, 0)
    assert co.cohomology_dims(carriere, twisted=False).betti == (1, 1, 0)
    assert not co.is_taut(carriere)


def test_carriere_duality(carriere):
    check = co.poincare_check(carriere)
    assert check["ok"] and check["spectral_gap"] < 1e-8


def test_carriere_parameter_guards():
    with pytest.raises(ValidationError):
        co.carriere_model(1.0, 32)
    with pytest.raises(ValidationError):
        co.carriere_model(GOLDEN, 4)


def test_conformal_shift_invariance():
    h = TrigSeries(0.0, (), (0.3,), period=1.0)
    residuals = []
    for N in (16, 32, 64):
        shift = co.conformal_shift(GOLDEN, N, h)
        assert co.validate_complex(shift.complex).valid
        assert co.cohomology_dims(shift.complex, True).betti == (0, 0, 0)
        assert co.cohomology_dims(shift.complex, False).betti == (1, 1, 0)
        residuals.append(shift.residual)
    assert residuals[0] > residuals[1] > residuals[2]


@pytest.mark.parametrize("c,expected", [(0.0, (1, 1)), (0.5, (0, 0)), (1.0, (0, 0))])
def test_circle_model(c, expected):
    m = co.circle_model(c, 8)
    rep = co.cohomology_dims(m, twisted=True)
    assert rep.betti == expected and rep.euler == 0


@pytest.mark.parametrize("q", [1, 2, 3])
def test_flat_torus(q):
    plain = co.cohomology_dims(co.flat_torus_model(q, 2, np.zeros(q)), True).betti
    assert plain == tuple(comb(q, k) for k in range(q + 1))
    kappa = 0.7 * np.arange(1, q + 1)
    twisted = co.flat_torus_model(q, 2, kappa)
    assert co.validate_complex(twisted).residuals["twisted_d_squared"] == 0.0
    assert co.cohomology_dims(twisted, True).betti == (0,) * (q + 1)


def test_octahedron_is_taut_sphere():
    m = co.octahedron_z4_model()
    assert m.dims == (3, 3, 2)
    assert co.cohomology_dims(m).betti == (1, 0, 1)
    assert co.is_taut(m)


def test_koszul_twisted_square():
    m = co.koszul_complex([1, 0, 2], [0, 2, 0])
    assert co.validate_complex(m).valid
    assert co.cohomology_dims(m).euler == 0


def test_non_closed_kappa_rejected():
    # kappa maps that fail d K + K d = 0
    d = (np.array([[1.0], [0.0]]), np.array([[0.0, 1.0]]))
    K = (np.array([[0.0], [1.0]]), np.zeros((1, 2)))
    m = co.TwistedComplex(2, d, K)
    with pytest.raises(ContractViolation) as exc:
        co.validate_complex(m)
    assert exc.value.residual in {"kappa_closed", "twisted_d_squared"}


def test_shape_mismatch_rejected():
    with pytest.raises(ValidationError):
        co.TwistedComplex(1, (np.ones((2, 3)),), (np.ones((3, 2)),))


def test_poincare_needs_orientation(rng):
    m = co.random_complex([1, 0, 1], [1, 1], rng)
    with pytest.raises(ValidationError):
        co.poincare_check(m)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=5), st.integers(0, 2 ** 32 - 1))
def test_random_complex_recovers_betti(betti, seed):
    rng = np.random.default_rng(seed)
    ranks = [int(r) for r in rng.integers(0, 3, size=len(betti) - 1)]
    m = co.random_complex(betti, ranks, rng)
    assert co.validate_complex(m).residuals["d_squared"] == 0.0
    assert co.cohomology_dims(m, twisted=False).betti == tuple(betti)


def test_exact_matmul_matches_numpy(rng):
    A = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
    B = rng.normal(size=(5, 3))
    assert np.allclose(co.exact_matmul(A, B), A @ B)
