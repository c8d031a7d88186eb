"""Trigonometric polynomials and truncated Fourier-Galerkin operators.

Coefficient vectors are indexed by modes ``-K..K`` in increasing order.
Multiplication operators are built by sampling the function on an
oversampled grid, taking its FFT, and keeping the Toeplitz section.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "TrigSeries",
    "mode_indices",
    "torus_modes",
    "derivative_matrix",
    "multiplication_matrix",
    "band_mask",
    "sobolev_weights",
]


@dataclass(frozen=True)
class TrigSeries:
    """``a0 + sum_k a_k cos(k w t) + b_k sin(k w t)`` with ``w = 2 pi / period``."""

    a0: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()
    period: float = 2 * np.pi

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        if self.period <= 0:
            raise ValidationError("period must be positive")

    @property
    def omega(self) -> float:
        return 2 * np.pi / self.period

    @property
    def bandwidth(self) -> int:
        nz = [k + 1 for k, c in enumerate(self.cos) if c] + [k + 1 for k, s in enumerate(self.sin) if s]
        return max(nz, default=0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.a0, dtype=float)
        for k, c in enumerate(self.cos, start=1):
            out += c * np.cos(k * self.omega * t)
        for k, s in enumerate(self.sin, start=1):
            out += s * np.sin(k * self.omega * t)
        return out

    def derivative(self) -> "TrigSeries":
        w = self.omega
        n = max(len(self.cos), len(self.sin))
        cos = list(self.cos) + [0.0] * (n - len(self.cos))
        sin = list(self.sin) + [0.0] * (n - len(self.sin))
        return TrigSeries(
            0.0,
            tuple(k * w * sin[k - 1] for k in range(1, n + 1)),
            tuple(-k * w * cos[k - 1] for k in range(1, n + 1)),
            self.period,
        )

    def is_zero(self) -> bool:
        return self.a0 == 0 and not any(self.cos) and not any(self.sin)

    def to_dict(self) -> dict:
        return {"a0": self.a0, "cos": list(self.cos), "sin": list(self.sin), "period": self.period}


def mode_indices(K: int) -> np.ndarray:
    return np.arange(-K, K + 1)


def torus_modes(n: int, M: int) -> np.ndarray:
    """All ``m`` in ``Z^n`` with ``|m|_inf <= M``, lexicographic order, shape ``(count, n)``."""
    if M < 0:
        raise ValidationError("truncation must be nonnegative")
    return np.array(list(product(range(-M, M + 1), repeat=n)), dtype=int).reshape(-1, n)


def derivative_matrix(K: int, period: float = 2 * np.pi) -> np.ndarray:
    """Diagonal matrix of ``d/dt`` on modes ``exp(2 pi i k t / period)``."""
    return np.diag(2j * np.pi * mode_indices(K) / period)


def multiplication_matrix(fun, K: int, period: float = 2 * np.pi, oversample: int = 8) -> np.ndarray:
    """Galerkin matrix ``P M_f P`` of multiplication by ``fun`` on modes ``-K..K``."""
    n = 2 * K + 1
    grid = max(oversample * n, 64)
    t = period * np.arange(grid) / grid
    coef = np.fft.fft(fun(t)) / grid
    # drop FFT roundoff so constant functions give exact multiples of the identity
    coef[np.abs(coef) < 4 * np.finfo(float).eps * np.abs(coef).max(initial=0.0)] = 0
    ks = mode_indices(K)
    return coef[(ks[:, None] - ks[None, :]) % grid]


def band_mask(K: int, fraction: float = 0.5) -> np.ndarray:
    """Boolean mask of the resolved modes ``|k| <= fraction * K``."""
    return np.abs(mode_indices(K)) <= fraction * K


def sobolev_weights(K: int, period: float = 2 * np.pi) -> np.ndarray:
    """``(1 + |2 pi k / period|^2)^(-1/2)``: right-scaling that turns an L2->L2 norm into H1->L2."""
    k = 2 * np.pi * mode_indices(K) / period
    return 1.0 / np.sqrt(1.0 + k ** 2)
