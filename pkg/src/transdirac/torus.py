"""Fourier-spectral operators on flat tori ``T^n = R^n / Z^n`` and the circle.

Every operator here is a Fourier multiplier: on the mode ``exp(2 pi i m.x)``
it acts by a small matrix ``symbol(2 pi m)``.  Assembled matrices are block
diagonal with modes in lexicographic order and, inside a block, the
grade-``r`` multi-index basis.  Coefficients carry the Parseval inner
product (unit volume), so adjoints are conjugate transposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np
from scipy.linalg import block_diag

from .clifford import build_clifford, chirality_grading
from .exceptions import ContractViolation, ValidationError
from .forms import Form, MetricPoint, hodge_star_matrix, wedge_operator
from .fourier import torus_modes
from .spectrum import SpectrumReport, kernel_dim, numerical_rank, spectrum_from_eigenvalues

__all__ = [
    "FourierOperator",
    "FourierFormField",
    "d_operator",
    "codifferential_operator",
    "laplace_operator",
    "dirac_t2_operator",
    "exterior_d",
    "exterior_d_integer",
    "d_squared_residual",
    "codifferential",
    "codifferential_agreement",
    "laplacian",
    "harmonic_dims",
    "dirac_t2",
    "circle_dirac",
    "principal_symbol_limit",
    "symbol_limit_residuals",
    "heat_supertrace_index",
    "FlipReport",
    "anticommuting_flip_check",
]


@dataclass(frozen=True)
class FourierOperator:
    """Translation-invariant operator given by its matrix-valued symbol.

    ``symbol`` takes a real frequency vector ``k`` (for the mode ``m`` this is
    ``2 pi m``) and returns the block acting on that mode.
    """

    n: int
    order: int
    symbol: Callable[[np.ndarray], np.ndarray]
    label: str

    def block(self, m) -> np.ndarray:
        return np.asarray(self.symbol(2 * np.pi * np.asarray(m, dtype=float)), dtype=complex)

    def blocks(self, M: int) -> list[np.ndarray]:
        return [self.block(m) for m in torus_modes(self.n, M)]

    def assemble(self, M: int) -> np.ndarray:
        blocks = self.blocks(M)
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        if rows == 0 or cols == 0:
            return np.zeros((rows, cols), dtype=complex)
        return block_diag(*blocks)

    def __matmul__(self, other: "FourierOperator") -> "FourierOperator":
        return FourierOperator(
            self.n, self.order + other.order,
            lambda k, a=self.symbol, b=other.symbol: a(k) @ b(k),
            f"{self.label}*{other.label}",
        )


@dataclass
class FourierFormField:
    """Grade-``r`` form field on ``T^n`` as truncated Fourier coefficients."""

    n: int
    M: int
    r: int
    coeffs: dict[tuple[int, ...], Form] = field(default_factory=dict)

    def __post_init__(self):
        for m, form in self.coeffs.items():
            if len(m) != self.n or max((abs(x) for x in m), default=0) > self.M:
                raise ValidationError(f"mode {m} outside the truncation |m| <= {self.M}")
            if form.n != self.n:
                raise ValidationError("coefficient forms must share the ambient dimension")

    @classmethod
    def from_vector(cls, n: int, M: int, r: int, vec) -> "FourierFormField":
        vec = np.asarray(vec, dtype=complex)
        width = comb(n, r)
        modes = torus_modes(n, M)
        if vec.shape != (len(modes) * width,):
            raise ValidationError("coefficient vector has the wrong length")
        coeffs = {}
        for i, m in enumerate(modes):
            chunk = vec[i * width:(i + 1) * width]
            if np.any(chunk):
                coeffs[tuple(int(x) for x in m)] = Form.from_vector(n, r, chunk)
        return cls(n, M, r, coeffs)

    def to_vector(self) -> np.ndarray:
        width = comb(self.n, self.r)
        out = np.zeros(len(torus_modes(self.n, self.M)) * width, dtype=complex)
        for i, m in enumerate(torus_modes(self.n, self.M)):
            form = self.coeffs.get(tuple(int(x) for x in m))
            if form is not None:
                out[i * width:(i + 1) * width] = form.to_vector(self.r)
        return out

    def evaluate(self, x) -> Form:
        """Pointwise value at ``x`` in ``[0, 1)^n``."""
        x = np.asarray(x, dtype=float)
        total = np.zeros(comb(self.n, self.r), dtype=complex)
        for m, form in self.coeffs.items():
            total += np.exp(2j * np.pi * np.dot(m, x)) * form.to_vector(self.r)
        return Form.from_vector(self.n, self.r, total)


def _check_grade(n: int, r: int) -> None:
    if not 0 <= r <= n:
        raise ValidationError(f"grade {r} outside 0..{n}")


def d_operator(n: int, r: int) -> FourierOperator:
    """``d`` on grade ``r``: multiplication by ``i k ^`` on each mode."""
    _check_grade(n, r)
    return FourierOperator(n, 1, lambda k: wedge_operator(1j * k, r), f"d{r}")


def _codiff_adjoint(n: int, r: int) -> FourierOperator:
    return FourierOperator(n, 1, lambda k: wedge_operator(1j * k, r - 1).conj().T, f"delta{r}")


def _codiff_star(n: int, r: int) -> FourierOperator:
    # delta^r = (-1)^(nr+n+1) * d *
    euclid = MetricPoint.euclidean(n)
    star_in = hodge_star_matrix(euclid, r)
    star_out = hodge_star_matrix(euclid, n - r + 1)
    sign = (-1) ** (n * r + n + 1)
    return FourierOperator(
        n, 1,
        lambda k: sign * star_out @ wedge_operator(1j * k, n - r) @ star_in,
        f"delta{r}",
    )


def codifferential_operator(n: int, r: int, method: str = "adjoint") -> FourierOperator:
    """``delta`` from grade ``r`` to ``r - 1`` (zero map when ``r = 0``)."""
    _check_grade(n, r)
    if r == 0:
        return FourierOperator(n, 1, lambda k: np.zeros((0, 1), dtype=complex), "delta0")
    if method == "adjoint":
        return _codiff_adjoint(n, r)
    if method == "star":
        return _codiff_star(n, r)
    raise ValidationError(f"unknown codifferential method {method!r}")


def laplace_operator(n: int, r: int) -> FourierOperator:
    """``d delta + delta d`` on grade ``r``."""
    _check_grade(n, r)
    d_r = d_operator(n, r)
    parts = [codifferential_operator(n, r + 1) @ d_r] if r < n else []
    if r > 0:
        parts.append(d_operator(n, r - 1) @ codifferential_operator(n, r))
    width = comb(n, r)

    def symbol(k):
        return sum((p.symbol(k) for p in parts), np.zeros((width, width), dtype=complex))

    return FourierOperator(n, 2, symbol, f"laplacian{r}")


def dirac_t2_operator() -> FourierOperator:
    """``sum_j c_j d/dx_j`` on ``T^2`` with spinors ``C^2``; block ``i c(k)``."""
    c1, c2 = build_clifford(2).generators
    return FourierOperator(2, 1, lambda k: 1j * (k[0] * c1 + k[1] * c2), "dirac_t2")


def exterior_d(n: int, M: int, r: int) -> np.ndarray:
    return d_operator(n, r).assemble(M)


def _integer_blocks(n: int, M: int, r: int) -> list[np.ndarray]:
    return [np.rint(wedge_operator(m.astype(float), r).real).astype(np.int64) for m in torus_modes(n, M)]


def exterior_d_integer(n: int, M: int, r: int) -> np.ndarray:
    """Integer matrix ``W`` with ``exterior_d(n, M, r) = 2 pi i W``."""
    _check_grade(n, r)
    blocks = _integer_blocks(n, M, r)
    if r == n:
        return np.zeros((0, len(blocks)), dtype=np.int64)
    return block_diag(*blocks)


def d_squared_residual(n: int, M: int, r: int) -> float:
    """``max |d_(r+1) d_r|`` evaluated exactly through the integer factor of ``d``.

    Floating matmul with fused multiply-add leaves ~1e-15 residue even though
    every term cancels, so the identity is checked on ``W_(r+1) W_r`` block by block.
    """
    _check_grade(n, r)
    if r >= n - 1:
        return 0.0
    worst = 0
    for a, b in zip(_integer_blocks(n, M, r + 1), _integer_blocks(n, M, r)):
        worst = max(worst, int(np.abs(a @ b).max(initial=0)))
    return float(4 * np.pi ** 2 * worst)


def codifferential(n: int, M: int, r: int, method: str = "adjoint") -> np.ndarray:
    return codifferential_operator(n, r, method).assemble(M)


def codifferential_agreement(n: int, M: int, r: int, tol: float = 1e-10) -> float:
    """Max entry gap between the adjoint and the ``*d*`` constructions of ``delta``."""
    gap = np.abs(codifferential(n, M, r, "adjoint") - codifferential(n, M, r, "star")).max(initial=0.0)
    if gap > tol:
        raise ContractViolation(f"codifferential constructions disagree by {gap:.3g}", residual="codifferential", value=gap)
    return float(gap)


def laplacian(n: int, M: int, r: int) -> np.ndarray:
    return laplace_operator(n, r).assemble(M)


def harmonic_dims(n: int, M: int, r: int) -> int:
    """Kernel dimension of the grade-``r`` Laplacian truncated at ``M``.

    The operator is block diagonal, so the kernel is the sum of blockwise
    kernels, each found by SVD.
    """
    if M < 1:
        raise ValidationError("harmonic_dims needs M >= 1")
    return int(sum(kernel_dim(b) for b in laplace_operator(n, r).blocks(M)))


def dirac_t2(M: int) -> SpectrumReport:
    """Spectrum of the ``T^2`` Dirac operator with kernel split by chirality.

    Chirality is ``gamma = i c1 c2 = diag(1, -1)``; the kernel dimensions in its
    ``+1`` and ``-1`` eigenspaces are stored as ``metadata["kernel_by_chirality"]``.
    """
    if M < 0:
        raise ValidationError("truncation must be nonnegative")
    op = dirac_t2_operator()
    eigs = []
    kernel_plus = kernel_minus = 0
    grading = chirality_grading(build_clifford(2))
    for block in op.blocks(M):
        eigs.extend(np.linalg.eigvalsh(block))
        if numerical_rank(block) < block.shape[0]:
            _, s, vh = np.linalg.svd(block)
            tol = 1e-9 * max(s[0], 1.0)
            null = vh[s <= tol].conj().T
            kernel_plus += numerical_rank(grading.projector_plus @ null)
            kernel_minus += numerical_rank(grading.projector_minus @ null)
    return spectrum_from_eigenvalues(
        eigs, M, "dirac_t2",
        metadata={"kernel_by_chirality": [kernel_plus, kernel_minus], "chirality": "i*c1*c2"},
    )


def circle_dirac(M: int) -> SpectrumReport:
    """``-i d/dtheta`` on ``span{exp(i n theta) : |n| <= M}``."""
    if M < 0:
        raise ValidationError("truncation must be nonnegative")
    modes = np.arange(-M, M + 1)
    # -i * (i n) on the diagonal, which is exactly n
    mat = np.diag((-1j * (1j * modes)).astype(complex))
    if not np.array_equal(mat, mat.conj().T):
        raise ContractViolation("circle Dirac matrix is not Hermitian", residual="hermitian")
    return spectrum_from_eigenvalues(np.diag(mat).real, M, "circle_dirac", cluster_tol=0.0)


def principal_symbol_limit(op: FourierOperator, xi, t: float, mode=None) -> np.ndarray:
    """``t^-order exp(-i t f) P exp(i t f)`` on one Fourier mode, with ``df = xi``.

    Conjugating by ``exp(i t xi.x)`` shifts the frequency ``2 pi m`` to
    ``2 pi m + t xi``.  The default mode is ``(1, ..., 1)`` so that the lower
    order terms are visible.
    """
    if t <= 0:
        raise ValidationError("t must be positive")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (op.n,):
        raise ValidationError(f"covector of length {op.n} expected")
    if not np.any(xi):
        raise ValidationError("the symbol is taken at a nonzero covector")
    m = np.ones(op.n) if mode is None else np.asarray(mode, dtype=float)
    return np.asarray(op.symbol(2 * np.pi * m + t * xi), dtype=complex) / t ** op.order


def symbol_limit_residuals(op: FourierOperator, xi, expected: np.ndarray,
                           ts=(1e2, 1e3, 1e4), mode=None) -> list[float]:
    """Spectral-norm distance to ``expected`` at each ``t``."""
    return [float(np.linalg.norm(principal_symbol_limit(op, xi, t, mode) - expected, 2)) for t in ts]


def heat_supertrace_index(D, t: float) -> float:
    """``tr exp(-t D*D) - tr exp(-t D D*)`` via Hermitian eigendecomposition."""
    if t <= 0:
        raise ValidationError("t must be positive")
    D = np.asarray(D, dtype=complex)
    if D.ndim != 2:
        raise ValidationError("a matrix is required")
    rows, cols = D.shape
    left = np.linalg.eigvalsh(D.conj().T @ D) if cols else np.zeros(0)
    right = np.linalg.eigvalsh(D @ D.conj().T) if rows else np.zeros(0)
    return float(np.exp(-t * left).sum() - np.exp(-t * right).sum())


@dataclass(frozen=True)
class FlipReport:
    max_residual: float
    eigenspace_dims: dict[float, tuple[int, int]]

    @property
    def ok(self) -> bool:
        return self.max_residual < 1e-10


def anticommuting_flip_check(S, T, tol: float = 1e-10) -> FlipReport:
    """Check that ``T`` carries each ``lambda``-eigenspace of ``S`` into the ``-lambda`` one.

    ``eigenspace_dims`` maps each eigenvalue ``lambda`` (rounded to 12 digits)
    to ``(dim E_lambda, dim E_-lambda)``.
    """
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    if S.shape != T.shape or S.shape[0] != S.shape[1]:
        raise ValidationError("S and T must be square matrices of the same size")
    scale = max(1.0, np.linalg.norm(S, 2) * np.linalg.norm(T, 2))
    anti = np.linalg.norm(S @ T + T @ S, 2)
    if anti > tol * scale:
        raise ValidationError(f"S and T do not anticommute (residual {anti:.3g})")
    vals, vecs = np.linalg.eig(S)
    worst = 0.0
    for lam, v in zip(vals, vecs.T):
        tv = T @ v
        worst = max(worst, float(np.linalg.norm(S @ tv + lam * tv)))
    dims: dict[float, tuple[int, int]] = {}
    rounded = np.round(vals.real, 12) + 0.0
    for lam in sorted(set(rounded)):
        dims[float(lam)] = (int(np.sum(rounded == lam)), int(np.sum(rounded == -lam)))
    return FlipReport(max_residual=worst, eigenspace_dims=dims)
