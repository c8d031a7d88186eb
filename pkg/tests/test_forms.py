from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transdirac import Form, MetricPoint, ValidationError, bigstar, hodge_star
from transdirac import forms


def random_metric(rng, n):
    B = rng.normal(size=(n, n))
    return MetricPoint(B @ B.T / n + 0.5 * np.eye(n), int(rng.choice([-1, 1])))


def random_form(rng, n, r):
    vec = rng.normal(size=comb(n, r)) + 1j * rng.normal(size=comb(n, r))
    return Form.from_vector(n, r, vec)


def test_euclidean_star_examples():
    m = MetricPoint.euclidean(3)
    assert hodge_star(m, Form.basis_form(3, (0,))).allclose(Form.basis_form(3, (1, 2)))
    assert hodge_star(m, Form.scalar(3)).allclose(forms.volume_form(m))
    m2 = MetricPoint.euclidean(2)
    assert hodge_star(m2, Form.basis_form(2, (1,))).allclose(Form.basis_form(2, (0,), -1))


def test_orientation_flips_star():
    a = Form.basis_form(2, (0,))
    plus = hodge_star(MetricPoint.euclidean(2, 1), a)
    minus = hodge_star(MetricPoint.euclidean(2, -1), a)
    assert (plus + minus).max_abs() == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_star_squared_sign(n, seed):
    rng = np.random.default_rng(seed)
    m = random_metric(rng, n)
    r = int(rng.integers(0, n + 1))
    a = random_form(rng, n, r)
    twice = hodge_star(m, hodge_star(m, a))
    assert (twice - (-1) ** (r * (n - r)) * a).max_abs() < 1e-11


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 4, 6]), st.integers(0, 2 ** 32 - 1))
def test_bigstar_involution(n, seed):
    rng = np.random.default_rng(seed)
    m = random_metric(rng, n)
    a = random_form(rng, n, int(rng.integers(0, n + 1)))
    assert (bigstar(m, bigstar(m, a)) - a).max_abs() < 1e-11


@pytest.mark.parametrize("n", [1, 3, 5])
def test_bigstar_odd_rejected(n):
    with pytest.raises(ValidationError):
        bigstar(MetricPoint.euclidean(n), Form.scalar(n))


def test_star_defining_identity(rng):
    n = 4
    m = random_metric(rng, n)
    vol = forms.volume_form(m)
    for r in range(n + 1):
        a, b = random_form(rng, n, r), random_form(rng, n, r)
        lhs = forms.wedge(a, hodge_star(m, b))
        rhs = forms.form_pairing(m, a, b) * vol
        assert (lhs - rhs).max_abs() < 1e-11


def test_wedge_and_interior_operators(rng):
    n = 4
    xi = rng.normal(size=n)
    W1, W2 = forms.wedge_operator(xi, 1), forms.wedge_operator(xi, 2)
    assert np.abs(W2 @ W1).max() < 1e-14
    I1 = forms.interior_operator(xi, 2)
    # Cartan: wedge(xi) interior(xi) + interior(xi) wedge(xi) = |xi|^2 on 1-forms
    total = forms.wedge_operator(xi, 0) @ forms.interior_operator(xi, 1) + I1 @ W1
    assert np.allclose(total, np.dot(xi, xi) * np.eye(n))


@pytest.mark.parametrize("bad", [np.array([[1.0, 2.0], [0.0, 1.0]]), -np.eye(2), np.ones((2, 3))])
def test_bad_metric_rejected(bad):
    with pytest.raises(ValidationError):
        MetricPoint(bad)


def test_bad_multi_index_rejected():
    with pytest.raises(ValidationError):
        Form(3, {(1, 0): 1.0})
    with pytest.raises(ValidationError):
        Form(3, {(3,): 1.0})
