"""Complex Clifford algebra representations.

Generators are built by a recursive doubling of the Pauli triple

    c1 = [[0, i], [i, 0]],  c2 = [[0, 1], [-1, 0]],  c3 = [[i, 0], [0, -i]]

so every entry lies in {0, +-1, +-i} and all relations hold exactly in
floating point.  Odd ``n = 2m + 1`` gets ``k = 2**m``; even ``n`` reuses the
first ``n`` generators of ``n + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "MAX_DIMENSION",
    "PAULI",
    "CliffordRep",
    "ChiralityGrading",
    "build_clifford",
    "clifford_vector",
    "chirality_grading",
    "anticommutator_table",
]

MAX_DIMENSION = 12

PAULI = (
    np.array([[0, 1j], [1j, 0]]),
    np.array([[0, 1], [-1, 0]], dtype=complex),
    np.array([[1j, 0], [0, -1j]]),
)

_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class CliffordRep:
    """Matrices ``c_1..c_n`` acting on ``C^k`` with ``c_i c_j + c_j c_i = -2 delta_ij``."""

    n: int
    generators: tuple[np.ndarray, ...]

    @property
    def k(self) -> int:
        return self.generators[0].shape[0]

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, j):
        return self.generators[j]


@dataclass(frozen=True)
class ChiralityGrading:
    """Chirality operator and the projectors onto its +-1 eigenspaces."""

    gamma: np.ndarray
    projector_plus: np.ndarray
    projector_minus: np.ndarray

    def basis(self, sign: int) -> np.ndarray:
        """Orthonormal basis (columns) of the ``sign`` eigenspace of gamma."""
        proj = self.projector_plus if sign > 0 else self.projector_minus
        u, s, _ = np.linalg.svd(proj)
        return u[:, s > 0.5]


@lru_cache(maxsize=None)
def _odd_generators(m: int) -> tuple[np.ndarray, ...]:
    # generators for n = 2m + 1 on C^(2^m)
    if m == 0:
        return (np.array([[1j]]),)
    prev = _odd_generators(m - 1)
    eye = np.eye(prev[0].shape[0], dtype=complex)
    new = (np.kron(eye, PAULI[0]), np.kron(eye, PAULI[1]))
    return new + tuple(np.kron(c, _SIGMA_Z) for c in prev)


def build_clifford(n: int, max_dimension: int = MAX_DIMENSION) -> CliffordRep:
    """Return a minimal complex representation of ``Cl(R^n)``.

    For ``n = 3`` the generators are exactly the Pauli matrices listed in
    the module docstring, and ``n = 2`` uses the first two of them.
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"Clifford dimension must be a positive integer, got {n!r}")
    if n > max_dimension:
        raise ValidationError(f"Clifford dimension {n} exceeds the configured maximum {max_dimension}")
    n = int(n)
    # odd n = 2m + 1 and even n = 2m both come from the m-th doubling
    gens = _odd_generators(n // 2)[:n]
    return CliffordRep(n=n, generators=tuple(g.copy() for g in gens))


def clifford_vector(rep: CliffordRep, v) -> np.ndarray:
    """Clifford multiplication ``c(v) = sum_j v_j c_j``."""
    v = np.asarray(v)
    if v.shape != (rep.n,):
        raise ValidationError(f"vector of length {rep.n} expected, got shape {v.shape}")
    return np.tensordot(v, np.stack(rep.generators), axes=1)


def chirality_grading(rep: CliffordRep) -> ChiralityGrading:
    """``gamma = i^(n/2) c_1 c_2 ... c_n`` for even ``n``."""
    if rep.n % 2:
        raise ValidationError("chirality grading needs an even dimension")
    prod = np.eye(rep.k, dtype=complex)
    for c in rep.generators:
        prod = prod @ c
    gamma = (1j ** (rep.n // 2)) * prod
    # the sign of gamma^2 is fixed by n; this guards the normalization anyway
    if np.allclose(gamma @ gamma, -np.eye(rep.k)):
        gamma = 1j * gamma
    eye = np.eye(rep.k, dtype=complex)
    return ChiralityGrading(gamma=gamma, projector_plus=(eye + gamma) / 2, projector_minus=(eye - gamma) / 2)


def anticommutator_table(rep: CliffordRep) -> np.ndarray:
    """Array ``T[i, j] = max |c_i c_j + c_j c_i + 2 delta_ij I|`` (zero when exact)."""
    n, eye = rep.n, np.eye(rep.k)
    out = np.zeros((n, n))
    for i, ci in enumerate(rep.generators):
        for j, cj in enumerate(rep.generators):
            resid = ci @ cj + cj @ ci + (2.0 * eye if i == j else 0.0)
            out[i, j] = np.abs(resid).max()
    return out
