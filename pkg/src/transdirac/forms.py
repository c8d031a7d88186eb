"""Pointwise exterior algebra on ``R^n`` with a constant metric.

Multi-indices are strictly increasing tuples of 0-based coordinate indices,
enumerated lexicographically within each grade (``itertools.combinations``
order).  Orientation ``+1`` means ``dx_1 ^ ... ^ dx_n`` is positive.

The metric pairing used by :func:`hodge_star` is complex *bilinear*, so the
star is C-linear; :func:`form_inner` is the Hermitian version.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "MetricPoint",
    "Form",
    "basis",
    "full_basis",
    "inverse_metric",
    "wedge",
    "interior",
    "flat",
    "sharp",
    "volume_form",
    "form_pairing",
    "form_inner",
    "hodge_star",
    "bigstar",
    "clifford_form_action",
    "operator_matrix",
    "wedge_operator",
    "interior_operator",
    "hodge_star_matrix",
]

TOL = 1e-12


@dataclass(frozen=True)
class MetricPoint:
    """Metric ``g_ij`` at a point together with an orientation sign."""

    g: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError(f"metric must be a square matrix, got shape {g.shape}")
        if not np.allclose(g, g.T, atol=TOL, rtol=0):
            raise ValidationError("metric is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise ValidationError("metric is not positive definite")
        if self.orientation not in (1, -1):
            raise ValidationError("orientation must be +1 or -1")
        object.__setattr__(self, "g", g)

    @classmethod
    def euclidean(cls, n: int, orientation: int = 1) -> "MetricPoint":
        return cls(np.eye(n), orientation)

    @property
    def n(self) -> int:
        return self.g.shape[0]


@lru_cache(maxsize=None)
def basis(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of grade ``r`` in ``R^n``."""
    if not 0 <= r <= n:
        raise ValidationError(f"grade {r} out of range for dimension {n}")
    return tuple(combinations(range(n), r))


@lru_cache(maxsize=None)
def full_basis(n: int) -> tuple[tuple[int, ...], ...]:
    """All ``2^n`` multi-indices ordered by grade, then lexicographically."""
    return tuple(idx for r in range(n + 1) for idx in basis(n, r))


@dataclass(frozen=True)
class Form:
    """A (possibly inhomogeneous) form with constant complex coefficients."""

    n: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, val in dict(self.coeffs).items():
            idx = tuple(int(i) for i in idx)
            if any(b <= a for a, b in zip(idx, idx[1:])) or any(i < 0 or i >= self.n for i in idx):
                raise ValidationError(f"multi-index {idx} is not strictly increasing in range({self.n})")
            if val != 0:
                clean[idx] = complex(val)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def basis_form(cls, n: int, idx, value=1.0) -> "Form":
        return cls(n, {tuple(idx): value})

    @classmethod
    def scalar(cls, n: int, value=1.0) -> "Form":
        return cls(n, {(): value})

    @classmethod
    def from_vector(cls, n: int, r: int, vec) -> "Form":
        vec = np.asarray(vec)
        idxs = basis(n, r)
        if vec.shape != (len(idxs),):
            raise ValidationError(f"grade-{r} vector needs {len(idxs)} entries")
        return cls(n, dict(zip(idxs, vec)))

    @classmethod
    def from_full_vector(cls, n: int, vec) -> "Form":
        return cls(n, dict(zip(full_basis(n), np.asarray(vec))))

    @property
    def grades(self) -> set[int]:
        return {len(idx) for idx in self.coeffs}

    @property
    def grade(self) -> int | None:
        """The single grade of a homogeneous nonzero form, else ``None``."""
        g = self.grades
        return g.pop() if len(g) == 1 else None

    def to_vector(self, r: int) -> np.ndarray:
        return np.array([self.coeffs.get(idx, 0.0) for idx in basis(self.n, r)], dtype=complex)

    def to_full_vector(self) -> np.ndarray:
        return np.array([self.coeffs.get(idx, 0.0) for idx in full_basis(self.n)], dtype=complex)

    def part(self, r: int) -> "Form":
        return Form(self.n, {k: v for k, v in self.coeffs.items() if len(k) == r})

    def __add__(self, other: "Form") -> "Form":
        _check_same_n(self, other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Form(self.n, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "Form":
        return Form(self.n, {k: scalar * v for k, v in self.coeffs.items()})

    def __mul__(self, scalar) -> "Form":
        return self.__rmul__(scalar)

    def __neg__(self) -> "Form":
        return (-1) * self

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def allclose(self, other: "Form", atol: float = TOL) -> bool:
        return (self - other).max_abs() <= atol


def _check_same_n(a: Form, b: Form) -> None:
    if a.n != b.n:
        raise ValidationError(f"dimension mismatch: {a.n} vs {b.n}")


def _merge_sign(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Sign of the shuffle sorting ``a + b`` and the sorted index, or ``(0, ())``."""
    if set(a) & set(b):
        return 0, ()
    # each pair (i in a, j in b) with i > j is one transposition
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1) ** inversions, tuple(sorted(a + b))


def inverse_metric(m: MetricPoint) -> np.ndarray:
    """The matrix ``g^ij`` of the induced metric on covectors."""
    ginv = np.linalg.inv(m.g)
    return (ginv + ginv.T) / 2


def wedge(a: Form, b: Form) -> Form:
    _check_same_n(a, b)
    out: dict = {}
    for ia, va in a.coeffs.items():
        for ib, vb in b.coeffs.items():
            sign, idx = _merge_sign(ia, ib)
            if sign:
                out[idx] = out.get(idx, 0) + sign * va * vb
    return Form(a.n, out)


def interior(v, a: Form) -> Form:
    """Contraction of ``v`` into the first slot: ``i(v) dx_I = sum_k (-1)^k v_{I_k} dx_{I without I_k}``."""
    v = np.asarray(v)
    if v.shape != (a.n,):
        raise ValidationError(f"vector of length {a.n} expected")
    out: dict = {}
    for idx, val in a.coeffs.items():
        for pos, i in enumerate(idx):
            if v[i] != 0:
                rest = idx[:pos] + idx[pos + 1:]
                out[rest] = out.get(rest, 0) + (-1) ** pos * v[i] * val
    return Form(a.n, out)


def flat(m: MetricPoint, v) -> Form:
    v = np.asarray(v)
    if v.shape != (m.n,):
        raise ValidationError(f"vector of length {m.n} expected")
    return Form(m.n, {(i,): c for i, c in enumerate(m.g @ v)})


def sharp(m: MetricPoint, a: Form) -> np.ndarray:
    if a.grades - {1}:
        raise ValidationError("sharp expects a one-form")
    return inverse_metric(m) @ a.to_vector(1)


def volume_form(m: MetricPoint) -> Form:
    return Form(m.n, {tuple(range(m.n)): m.orientation * np.sqrt(np.linalg.det(m.g))})


def _gram(m: MetricPoint, r: int) -> np.ndarray:
    """Gram matrix ``(dx_I, dx_J) = det(g^{I J})`` on grade-``r`` forms."""
    ginv = inverse_metric(m)
    idxs = basis(m.n, r)
    if r == 0:
        return np.ones((1, 1))
    return np.array([[np.linalg.det(ginv[np.ix_(I, J)]) for J in idxs] for I in idxs])


def form_pairing(m: MetricPoint, a: Form, b: Form) -> complex:
    """Bilinear induced pairing of two forms (grades paired separately)."""
    _check_same_n(a, b)
    total = 0j
    for r in a.grades & b.grades:
        total += a.to_vector(r) @ _gram(m, r) @ b.to_vector(r)
    return total


def form_inner(m: MetricPoint, a: Form, b: Form) -> complex:
    """Hermitian inner product, conjugate-linear in ``a``."""
    conj_a = Form(a.n, {k: np.conj(v) for k, v in a.coeffs.items()})
    return form_pairing(m, conj_a, b)


def hodge_star(m: MetricPoint, a: Form) -> Form:
    """Solve ``b ^ *a = (b, a) dvol`` over all grade-``r`` basis forms ``b``.

    Inhomogeneous forms are starred grade by grade.
    """
    if a.n != m.n:
        raise ValidationError("form and metric dimensions differ")
    n = m.n
    dvol = volume_form(m).coeffs[tuple(range(n))]
    top = tuple(range(n))
    out = Form(n)
    for r in sorted(a.grades):
        rows, cols = basis(n, r), basis(n, n - r)
        # W[I, J] = coefficient of dx_top in dx_I ^ dx_J
        system = np.zeros((len(rows), len(cols)))
        for i, I in enumerate(rows):
            for j, J in enumerate(cols):
                sign, idx = _merge_sign(I, J)
                if sign and idx == top:
                    system[i, j] = sign
        rhs = dvol * (_gram(m, r) @ a.to_vector(r))
        out = out + Form.from_vector(n, n - r, np.linalg.solve(system, rhs))
    return out


def bigstar(m: MetricPoint, a: Form) -> Form:
    """``i^(r(r-1) + n/2) *`` on grade-``r`` parts; even ``n`` only."""
    if m.n % 2:
        raise ValidationError("the normalized star needs an even dimension")
    out = Form(m.n)
    for r in sorted(a.grades):
        phase = 1j ** ((r * (r - 1) + m.n // 2) % 4)
        out = out + phase * hodge_star(m, a.part(r))
    return out


def clifford_form_action(m: MetricPoint, v, a: Form) -> Form:
    """``c(v) a = v^flat ^ a - i(v) a``."""
    return wedge(flat(m, v), a) - interior(v, a)


def operator_matrix(op, n: int, r_in: int | None = None, r_out: int | None = None) -> np.ndarray:
    """Matrix of a linear map on forms, in the grade basis or the full ``2^n`` basis."""
    cols_idx = full_basis(n) if r_in is None else basis(n, r_in)
    cols = []
    for idx in cols_idx:
        image = op(Form.basis_form(n, idx))
        cols.append(image.to_full_vector() if r_out is None else image.to_vector(r_out))
    return np.array(cols, dtype=complex).T


def wedge_operator(covector, r: int) -> np.ndarray:
    """Matrix of ``xi ^`` from grade ``r`` to grade ``r + 1``; ``xi`` may be complex."""
    xi = np.asarray(covector)
    n = xi.shape[0]
    rows = {idx: i for i, idx in enumerate(basis(n, r + 1))} if r < n else {}
    out = np.zeros((len(rows), comb(n, r)), dtype=complex)
    for j, idx in enumerate(basis(n, r)):
        for k in range(n):
            sign, new = _merge_sign((k,), idx)
            if sign:
                out[rows[new], j] += sign * xi[k]
    return out


def interior_operator(vector, r: int) -> np.ndarray:
    """Matrix of ``i(v)`` from grade ``r`` to grade ``r - 1``."""
    v = np.asarray(vector)
    n = v.shape[0]
    rows = {idx: i for i, idx in enumerate(basis(n, r - 1))} if r > 0 else {}
    out = np.zeros((len(rows), comb(n, r)), dtype=complex)
    for j, idx in enumerate(basis(n, r)):
        for pos, i in enumerate(idx):
            out[rows[idx[:pos] + idx[pos + 1:]], j] += (-1) ** pos * v[i]
    return out


def hodge_star_matrix(m: MetricPoint, r: int) -> np.ndarray:
    """Matrix of ``*`` from grade ``r`` to grade ``n - r``."""
    return operator_matrix(lambda f: hodge_star(m, f), m.n, r, m.n - r)
