import numpy as np
import pytest

from transdirac import ValidationError
from transdirac import transversal as tv
from transdirac.fourier import TrigSeries

SIN = TrigSeries(0.0, (), (1.0,))


def test_warped_DL_integer_spectrum():
    rep = tv.warped_torus_DL(SIN, 256)
    ev = np.array(rep.eigenvalues)
    assert np.abs(ev - np.round(ev)).max() < 1e-6
    assert rep.eigenvalues[0] <= -60 and rep.eigenvalues[-1] >= 60


def test_warped_DL_accepts_samples_and_callables():
    y = 2 * np.pi * np.arange(64) / 64
    a = tv.warped_torus_DL(np.sin(y), 128)
    b = tv.warped_torus_DL(np.sin, 128)
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-8)


def test_warped_DL_x_modes_scale_multiplicity():
    one = tv.warped_torus_DL(SIN, 128)
    three = tv.warped_torus_DL(SIN, 128, x_modes=1)
    assert three.multiplicities == tuple(3 * m for m in one.multiplicities)


def test_conjugation_residual_small():
    assert tv.warped_conjugation_residual(SIN, 128) < 1e-10


@pytest.mark.parametrize("n", [-2, -1, 1, 3])
def test_warped_DQ_band(n):
    rep = tv.warped_torus_DQ(SIN, n, 256)
    scaled = np.array(rep.eigenvalues) / (-n)
    assert scaled.min() >= 1 / np.e - 1e-9 and scaled.max() <= np.e + 1e-9
    lo, hi = rep.metadata["band"]
    assert lo <= rep.eigenvalues[0] and rep.eigenvalues[-1] <= hi


def test_warped_DQ_scales_with_mode():
    one = tv.warped_torus_DQ(SIN, 1, 128).expanded()
    two = tv.warped_torus_DQ(SIN, 2, 128).expanded()
    assert np.allclose(np.sort(2 * one), two)


def test_aliasing_guard():
    with pytest.raises(ValidationError):
        tv.warped_torus_DL(TrigSeries(0.0, (), (0.0,) * 19 + (1.0,)), 64)
    with pytest.raises(ValidationError):
        tv.warped_torus_DL(SIN, 32)


def test_warped_mean_curvature():
    frame = tv.warped_torus_frame(SIN)
    ys = np.linspace(0, 2 * np.pi, 9)
    pts = np.column_stack([np.zeros_like(ys), ys])
    HQ = tv.mean_curvature(frame, "HQ", pts)
    assert np.abs(HQ.values - np.column_stack([0 * ys, -np.cos(ys)])).max() < 1e-4
    assert tv.mean_curvature(frame, "HL", pts).max_norm() < 1e-6


def test_heisenberg_curvatures():
    frame = tv.heisenberg_frame()
    pts = np.array([[0.3, -0.5, 0.1], [1.2, 0.4, -2.0], [0.0, 0.0, 0.0]])
    HL = tv.mean_curvature(frame, "HL", pts)
    exact = np.array([tv.heisenberg_HL_exact(p) for p in pts])
    assert np.abs(HL.values - exact).max() < 1e-6
    assert tv.mean_curvature(frame, "HQ", pts).max_norm() < 1e-6


def test_heisenberg_against_integral_curves():
    frame = tv.heisenberg_frame()
    p = np.array([0.7, -0.2, 0.4])
    acc = tv.integral_curve_acceleration(lambda x: frame.frame(x)[:, 2], p)
    assert np.abs(acc - tv.heisenberg_HL_exact(p)).max() < 1e-5


def test_slope_distribution_gaps():
    rational = tv.slope_distribution_DQ(1.0, 4)
    irrational = tv.slope_distribution_DQ(2 ** 0.5, 4)
    assert rational.metadata["min_gap"] > 10 * irrational.metadata["min_gap"]
    ev = np.array(irrational.eigenvalues)
    assert np.allclose(ev, -ev[::-1])


@pytest.mark.parametrize("dist", ["L", "Q"])
def test_adjoint_defect_converges(dist):
    defects = [tv.adjoint_defect(SIN, N, dist) for N in (64, 128, 256)]
    assert all(d.resolved < 1e-10 for d in defects)
    assert all(d.hermitian < 1e-10 for d in defects)
    fulls = [d.full for d in defects]
    assert fulls[0] >= fulls[1] >= fulls[2]


def test_frame_validation():
    frame = tv.warped_torus_frame(SIN)
    frame.check(np.array([[0.0, 1.0], [2.0, 3.0]]))
    bad = tv.DistributionFrame(2, 1, lambda p: 2 * np.eye(2), lambda p: np.eye(2))
    with pytest.raises(ValidationError):
        bad.check(np.zeros((1, 2)))
