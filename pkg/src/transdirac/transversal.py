"""Transversal Dirac operators on explicit distributions.

A distribution is given by an orthonormal frame ``f_1..f_n`` whose first
``q`` fields span ``Q`` and the rest span ``L = Q^perp``.  Covariant
derivatives use Christoffel symbols of the supplied metric, obtained by
central differences.

The warped torus ``(R/2piZ)^2`` with metric ``e^{2g(y)} dx^2 + dy^2`` is the
worked family.  Its operators are discretized in the Fourier basis
``e^{iky}``, ``|k| <= K`` with ``K = N // 2``, and multiplication operators
are Galerkin sections.  Truncating a product of multiplication and
differentiation operators perturbs the modes near ``|k| = K``, so spectra and
identities are reported on the resolved band ``|k| <= K/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ContractViolation, ValidationError
from .fourier import TrigSeries, band_mask, mode_indices, multiplication_matrix, sobolev_weights, torus_modes
from .spectrum import SpectrumReport, spectrum_from_eigenvalues

__all__ = [
    "DistributionFrame",
    "MeanCurvatureField",
    "christoffel",
    "covariant_derivative",
    "mean_curvature",
    "warped_torus_frame",
    "heisenberg_frame",
    "heisenberg_HL_exact",
    "integral_curve_acceleration",
    "warped_torus_DL",
    "warped_conjugation_residual",
    "warped_torus_DQ",
    "slope_distribution_DQ",
    "AdjointDefect",
    "adjoint_defect",
]

FD_STEP = 1e-5
FRAME_TOL = 1e-8
TANGENCY_TOL = 1e-6


@dataclass(frozen=True)
class DistributionFrame:
    """Orthonormal frame adapted to ``TM = Q + L``.

    ``frame(x)`` returns an ``n x n`` matrix whose columns are ``f_1..f_n``;
    ``metric(x)`` returns ``g_ij``.
    """

    dim: int
    q: int
    frame: Callable[[np.ndarray], np.ndarray]
    metric: Callable[[np.ndarray], np.ndarray]
    label: str = "distribution"

    def __post_init__(self):
        if not 0 < self.q < self.dim:
            raise ValidationError("rank of Q must lie strictly between 0 and the dimension")

    def orthonormality_residual(self, x) -> float:
        f = self.frame(np.asarray(x, dtype=float))
        return float(np.abs(f.T @ self.metric(x) @ f - np.eye(self.dim)).max())

    def check(self, points) -> None:
        for x in np.atleast_2d(points):
            res = self.orthonormality_residual(x)
            if res > FRAME_TOL:
                raise ValidationError(f"frame is not orthonormal at {x} (residual {res:.3g})")

    def project(self, x, v, onto: str) -> np.ndarray:
        """Metric-orthogonal projection of ``v`` onto ``Q`` or ``L``."""
        f = self.frame(x)
        cols = f[:, :self.q] if onto == "Q" else f[:, self.q:]
        return cols @ (cols.T @ self.metric(x) @ v)


@dataclass(frozen=True)
class MeanCurvatureField:
    label: str
    points: np.ndarray
    values: np.ndarray
    tangency_residual: float = 0.0

    def max_norm(self) -> float:
        return float(np.abs(self.values).max(initial=0.0))


def _check_step(h: float) -> None:
    if not 0 < h <= 1e-2:
        raise ValidationError(f"finite-difference step {h} outside (0, 1e-2]")


def christoffel(metric, x, h: float = FD_STEP) -> np.ndarray:
    """``Gamma[k, i, j]`` of the Levi-Civita connection at ``x``."""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    n = x.size
    dg = np.empty((n, n, n))  # dg[l, i, j] = d_l g_ij
    for l in range(n):
        e = np.zeros(n)
        e[l] = h
        dg[l] = (metric(x + e) - metric(x - e)) / (2 * h)
    ginv = np.linalg.inv(metric(x))
    # Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("kl,lij->kij", ginv, lower)


def covariant_derivative(frame: DistributionFrame, x, a: int, b: int, h: float = FD_STEP) -> np.ndarray:
    """``nabla_{f_a} f_b`` at ``x`` in coordinates."""
    x = np.asarray(x, dtype=float)
    fa = frame.frame(x)[:, a]
    fb = lambda p: frame.frame(p)[:, b]
    directional = (fb(x + h * fa) - fb(x - h * fa)) / (2 * h)
    gamma = christoffel(frame.metric, x, h)
    return directional + np.einsum("kij,i,j->k", gamma, fa, fb(x))


def mean_curvature(frame: DistributionFrame, which: str, points, h: float = FD_STEP) -> MeanCurvatureField:
    """``H^L = sum_{j>q} pi_Q nabla_{f_j} f_j`` or ``H^Q = sum_{j<=q} pi_L nabla_{f_j} f_j``."""
    _check_step(h)
    if which not in ("HL", "HQ"):
        raise ValidationError("which must be 'HL' or 'HQ'")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    frame.check(points)
    idx = range(frame.q, frame.dim) if which == "HL" else range(frame.q)
    target = "Q" if which == "HL" else "L"
    other = "L" if which == "HL" else "Q"
    values, worst = [], 0.0
    for x in points:
        v = sum(covariant_derivative(frame, x, j, j, h) for j in idx)
        pv = frame.project(x, v, target)
        worst = max(worst, float(np.abs(frame.project(x, pv, other)).max()))
        values.append(pv)
    if worst > TANGENCY_TOL:
        raise ContractViolation(f"{which} is not tangent to {target}", residual="tangency", value=worst)
    return MeanCurvatureField(which, points, np.array(values), worst)


def _as_function(g) -> Callable:
    """Accept a callable, a TrigSeries field dict, or samples on a uniform 2pi grid."""
    if callable(g):
        return g
    if isinstance(g, dict):
        return TrigSeries(**g)
    samples = np.asarray(g, dtype=float)
    if samples.ndim != 1 or samples.size < 4:
        raise ValidationError("g must be a callable or a 1-d array of periodic samples")
    coef = np.fft.fft(samples) / samples.size
    k = np.fft.fftfreq(samples.size, 1.0 / samples.size)

    def interp(t):
        t = np.asarray(t, dtype=float)
        return np.real(np.exp(1j * np.multiply.outer(t, k)) @ coef)

    return interp


def warped_torus_frame(g) -> DistributionFrame:
    """Coordinates ``(x, y)``, metric ``diag(e^{2g}, 1)``, ``Q = span(d_x)``, ``L = span(d_y)``."""
    g = _as_function(g)

    def metric(p):
        return np.diag([np.exp(2 * g(p[1])), 1.0])

    def frame(p):
        return np.array([[np.exp(-g(p[1])), 0.0], [0.0, 1.0]])

    return DistributionFrame(2, 1, frame, metric, "warped_torus")


def heisenberg_frame() -> DistributionFrame:
    """``Q = ker(dz - (x dy - y dx)/2)`` in Euclidean ``R^3``.

    ``Q`` is spanned by Gram-Schmidt of ``X = d_x - (y/2) d_z`` and
    ``Y = d_y + (x/2) d_z``; ``L`` by the unit normal along ``(y/2, -x/2, 1)``.
    """

    def frame(p):
        x, y, _ = p
        X = np.array([1.0, 0.0, -y / 2])
        Y = np.array([0.0, 1.0, x / 2])
        f1 = X / np.linalg.norm(X)
        Y = Y - (Y @ f1) * f1
        f2 = Y / np.linalg.norm(Y)
        nrm = np.array([y / 2, -x / 2, 1.0])
        return np.column_stack([f1, f2, nrm / np.linalg.norm(nrm)])

    return DistributionFrame(3, 2, frame, lambda p: np.eye(3), "heisenberg")


def heisenberg_HL_exact(point) -> np.ndarray:
    """Closed form ``-(x, y, 0) / (4 + x^2 + y^2)`` of the normal line field's curvature."""
    x, y, _ = point
    return -np.array([x, y, 0.0]) / (4 + x * x + y * y)


def integral_curve_acceleration(field_fn: Callable, x0, s: float = 1e-3, substeps: int = 20) -> np.ndarray:
    """Second derivative at ``x0`` of the integral curve of a unit vector field.

    The curve is traced both ways with RK4 and differenced:
    ``(c(s) - 2 c(0) + c(-s)) / s^2``.
    """

    def trace(sign):
        p = np.asarray(x0, dtype=float).copy()
        dt = sign * s / substeps
        for _ in range(substeps):
            k1 = field_fn(p)
            k2 = field_fn(p + dt / 2 * k1)
            k3 = field_fn(p + dt / 2 * k2)
            k4 = field_fn(p + dt * k3)
            p = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        return p

    x0 = np.asarray(x0, dtype=float)
    return (trace(1) - 2 * x0 + trace(-1)) / s ** 2


def _bandwidth(g, period: float = 2 * np.pi, samples: int = 1024) -> int:
    if isinstance(g, TrigSeries):
        return g.bandwidth
    coef = np.abs(np.fft.rfft(g(period * np.arange(samples) / samples))) / samples
    big = np.nonzero(coef > 1e-13 * max(coef.max(), 1.0))[0]
    return int(big.max()) if big.size else 0


def _validate_grid(g, N: int) -> None:
    if N < 64:
        raise ValidationError("grid size N must be at least 64")
    bw = _bandwidth(g)
    if N < 4 * bw:
        raise ValidationError(f"aliasing guard: N = {N} is below 4 x bandwidth ({bw}) of g'")


def _derivative_fn(g) -> Callable:
    if isinstance(g, TrigSeries):
        return g.derivative()
    # spectral derivative of a sampled periodic callable
    samples = 1024
    y = 2 * np.pi * np.arange(samples) / samples
    coef = np.fft.fft(g(y))
    k = np.fft.fftfreq(samples, 1.0 / samples)
    dcoef = 1j * k * coef / samples

    def dg(t):
        t = np.asarray(t, dtype=float)
        return np.real(np.exp(1j * np.multiply.outer(t, k)) @ dcoef)

    return dg


def _DL_matrix(g, K: int) -> np.ndarray:
    dg = _derivative_fn(g)
    # i (d/dy + g'/2); d/dy is diag(i k)
    return np.diag(-mode_indices(K).astype(complex)) + 0.5j * multiplication_matrix(dg, K)


def warped_torus_DL(g, N: int, x_modes: int = 0) -> SpectrumReport:
    """Spectrum of ``D_L = i(d_y + g'(y)/2)`` on the resolved band.

    ``D_L`` does not involve ``x``, so each of the ``2 x_modes + 1`` x-modes
    carries the same spectrum and multiplicities are scaled accordingly.
    """
    g = _as_function(g)
    _validate_grid(g, N)
    K = N // 2
    window = K / 2
    eigs = np.linalg.eigvals(_DL_matrix(g, K))
    keep = np.abs(eigs.real) <= window + 0.5
    core = spectrum_from_eigenvalues(eigs[keep], N, "warped_DL", cluster_tol=1e-6, imag_tol=1e-6)
    copies = 2 * x_modes + 1
    return SpectrumReport(
        core.eigenvalues,
        tuple(m * copies for m in core.multiplicities),
        N,
        "warped_DL",
        {"window": window, "discarded": int((~keep).sum()), "x_modes": x_modes,
         "per_x_mode_multiplicities": list(core.multiplicities)},
    )


def _band_block(A: np.ndarray, K: int) -> np.ndarray:
    mask = band_mask(K)
    return A[np.ix_(mask, mask)]


def warped_conjugation_residual(g, N: int) -> float:
    """Band-restricted gap between ``e^{-g/2} (i d_y) e^{g/2}`` and ``D_L``."""
    g = _as_function(g)
    _validate_grid(g, N)
    K = N // 2
    # conjugate on a wider basis so the band block is free of truncation effects
    wide = 2 * K
    lhs = (multiplication_matrix(lambda y: np.exp(-g(y) / 2), wide)
           @ np.diag(-mode_indices(wide).astype(complex))
           @ multiplication_matrix(lambda y: np.exp(g(y) / 2), wide))
    lhs = lhs[K:K + 2 * K + 1, K:K + 2 * K + 1]
    return float(np.abs(_band_block(lhs - _DL_matrix(g, K), K)).max())


def warped_torus_DQ(g, n: int, N: int) -> SpectrumReport:
    """``D_Q = i e^{-g} d_x`` on the x-mode ``e^{inx}``: multiplication by ``-n e^{-g(y)}``.

    Collocation on ``N`` equispaced points, so the weighted matrix is exactly
    Hermitian.  ``metadata["band"]`` holds the interval ``-n [min e^-g, max e^-g]``.
    """
    g = _as_function(g)
    _validate_grid(g, N)
    y = 2 * np.pi * np.arange(N) / N
    vals = -n * np.exp(-g(y))
    fine = np.exp(-g(np.linspace(0, 2 * np.pi, 20001)))
    lo, hi = sorted((-n * fine.min(), -n * fine.max()))
    return spectrum_from_eigenvalues(vals, N, "warped_DQ", metadata={"x_mode": n, "band": [lo, hi]})


def slope_distribution_DQ(r: float, M: int) -> SpectrumReport:
    """``D_Q = i (d_x + r d_y) / sqrt(1 + r^2)`` on scalar modes of ``T^2``.

    On ``e^{2 pi i (m x + n y)}`` this is ``-2 pi (m + r n) / sqrt(1 + r^2)``;
    the spectrum is symmetric so it equals the set ``2 pi (m + r n) / sqrt(1 + r^2)``.
    ``metadata["min_gap"]`` is the smallest gap between distinct eigenvalues.
    """
    if M < 1:
        raise ValidationError("truncation must be at least 1")
    modes = torus_modes(2, M)
    vals = -2 * np.pi * (modes[:, 0] + r * modes[:, 1]) / np.sqrt(1 + r * r)
    rep = spectrum_from_eigenvalues(vals, M, "slope_DQ", cluster_tol=1e-9)
    gaps = np.diff(rep.eigenvalues)
    return SpectrumReport(rep.eigenvalues, rep.multiplicities, M, "slope_DQ",
                          {"r": r, "min_gap": float(gaps.min()) if gaps.size else float("inf")})


@dataclass(frozen=True)
class AdjointDefect:
    """``|| A* - (A - c(H)) ||`` for a warped-torus operator.

    ``full`` is measured from ``H^1`` to ``L^2`` (columns scaled by
    ``(1 + k^2)^(-1/2)``) over the whole truncation; ``resolved`` is the
    spectral norm on the band ``|k| <= K/2``; ``hermitian`` is the band
    residual of ``D - D*`` for the symmetrized operator.
    """

    full: float
    resolved: float
    hermitian: float
    N: int
    extras: dict = field(default_factory=dict)


def adjoint_defect(g, N: int, distribution: str = "L", x_mode: int = 1) -> AdjointDefect:
    """Weighted adjoint check ``A* = A - c(H)`` on the warped torus.

    The volume weight is ``sqrt(det g) = e^{g(y)}``, so the adjoint of a
    matrix ``A`` is ``W^{-1} A^H W`` with ``W`` the Galerkin Gram matrix of
    the weighted inner product.  For ``L``
    the operator is ``A_L = i d_y`` and ``c(H^Q) = -i g'``; for ``Q`` it is
    ``A_Q = -n e^{-g}`` on x-mode ``n`` with ``H^L = 0``.
    """
    g = _as_function(g)
    _validate_grid(g, N)
    K = N // 2
    W = multiplication_matrix(lambda y: np.exp(g(y)), K)
    if distribution == "L":
        dg = _derivative_fn(g)
        A = np.diag(-mode_indices(K).astype(complex))
        cH = -1j * multiplication_matrix(dg, K)
    elif distribution == "Q":
        A = multiplication_matrix(lambda y: -x_mode * np.exp(-g(y)), K)
        cH = np.zeros_like(A)
    else:
        raise ValidationError("unsupported distribution for the warped torus family")
    adj = np.linalg.solve(W, A.conj().T @ W)
    gap = adj - (A - cH)
    full = float(np.linalg.norm(gap * sobolev_weights(K)[None, :], 2))
    resolved = float(np.linalg.norm(_band_block(gap, K), 2))
    D = A - 0.5 * cH
    herm = float(np.linalg.norm(_band_block(np.linalg.solve(W, D.conj().T @ W) - D, K), 2))
    return AdjointDefect(full=full, resolved=resolved, hermitian=herm, N=N)
