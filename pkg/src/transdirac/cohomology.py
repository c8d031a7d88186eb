"""Twisted basic cohomology of finite cochain-complex models.

A model is a cochain complex ``C^0 -> ... -> C^q`` with differentials ``d_k``,
the wedge-by-``kappa`` maps ``K_k`` and Gram matrices ``G_k`` of the inner
product.  The twisted differential is ``d~ = d - K/2`` and its adjoint is
``delta~_k = G_k^{-1} d~_k^H G_(k+1)``.

Identities such as ``d~^2 = 0`` are checked with an FMA-free product
(elementwise multiply, then sum).  All builders produce complexes whose
products cancel term by term, so the residuals come out exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import block_diag

from .exceptions import ContractViolation, ValidationError
from .forms import wedge_operator
from .fourier import TrigSeries, derivative_matrix, mode_indices, multiplication_matrix, sobolev_weights, torus_modes
from .spectrum import RANK_RTOL, numerical_rank, rank_margin

__all__ = [
    "TwistedComplex",
    "ValidityReport",
    "CohomologyReport",
    "exact_matmul",
    "validate_complex",
    "twisted_differential",
    "twisted_codifferential",
    "twisted_laplacian",
    "cohomology_dims",
    "is_taut",
    "poincare_check",
    "carriere_model",
    "circle_model",
    "flat_torus_model",
    "koszul_complex",
    "random_complex",
    "random_conjugate",
    "octahedron_z4_model",
    "ConformalShift",
    "conformal_shift",
]


@dataclass(frozen=True)
class TwistedComplex:
    """Cochain complex with a closed one-form acting by wedge.

    ``spectral`` marks models whose inner products come from a transversal
    metric, so that Poincare duality extends to the ``Delta~`` spectra.
    """

    q: int
    differentials: tuple[np.ndarray, ...]
    kappa_wedge: tuple[np.ndarray, ...]
    inner_products: tuple[np.ndarray, ...] | None = None
    labels: tuple[tuple[str, ...], ...] | None = None
    oriented: bool = True
    spectral: bool = False
    name: str = "complex"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        q = self.q
        if q < 0:
            raise ValidationError("codimension must be nonnegative")
        d = tuple(np.asarray(x) for x in self.differentials)
        K = tuple(np.asarray(x) for x in self.kappa_wedge)
        object.__setattr__(self, "differentials", d)
        object.__setattr__(self, "kappa_wedge", K)
        if len(d) != q or len(K) != q:
            raise ValidationError(f"expected {q} differentials and {q} kappa maps")
        if q == 0:
            if self.inner_products is None:
                raise ValidationError("a codimension-0 complex needs its inner product to fix the dimension")
        dims = self._infer_dims(d)
        for k, (a, b) in enumerate(zip(d, K)):
            if a.shape != (dims[k + 1], dims[k]) or b.shape != a.shape:
                raise ValidationError(f"degree {k} maps have inconsistent shapes {a.shape}, {b.shape}")
        if self.inner_products is None:
            object.__setattr__(self, "inner_products", tuple(np.eye(n) for n in dims))
        else:
            G = tuple(np.asarray(g) for g in self.inner_products)
            if len(G) != q + 1 or any(g.shape != (n, n) for g, n in zip(G, dims)):
                raise ValidationError("inner product matrices do not match the degree dimensions")
            object.__setattr__(self, "inner_products", G)
        if self.labels is not None and [len(x) for x in self.labels] != list(dims):
            raise ValidationError("labels do not match the degree dimensions")

    def _infer_dims(self, d) -> tuple[int, ...]:
        if not d:
            return (np.asarray(self.inner_products[0]).shape[0],)
        for k in range(len(d) - 1):
            if d[k].shape[0] != d[k + 1].shape[1]:
                raise ValidationError(f"d_{k} and d_{k + 1} are not composable")
        return tuple([d[0].shape[1]] + [x.shape[0] for x in d])

    @property
    def dims(self) -> tuple[int, ...]:
        return self._infer_dims(self.differentials)


@dataclass(frozen=True)
class ValidityReport:
    residuals: dict[str, float]
    tol: float

    @property
    def valid(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())


@dataclass(frozen=True)
class CohomologyReport:
    betti: tuple[int, ...]
    twisted: bool
    euler: int
    flags: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.euler != sum((-1) ** k * b for k, b in enumerate(self.betti)):
            raise ContractViolation("euler characteristic does not match the betti numbers")

    def to_dict(self) -> dict:
        return {"betti": list(self.betti), "twisted": self.twisted, "euler": self.euler,
                "flags": list(self.flags), "metadata": self.metadata}


def exact_matmul(A, B) -> np.ndarray:
    """Matrix product from elementwise products and plain sums (no fused multiply-add)."""
    A = np.asarray(A)
    B = np.asarray(B)
    if np.iscomplexobj(A) or np.iscomplexobj(B):
        # complex multiply may fuse internally, so work on real parts
        Ar, Ai, Br, Bi = A.real, A.imag, B.real, B.imag
        real = exact_matmul(Ar, Br) - exact_matmul(Ai, Bi)
        imag = exact_matmul(Ar, Bi) + exact_matmul(Ai, Br)
        return real + 1j * imag
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.result_type(A, B))
    for i in range(A.shape[0]):
        nz = np.nonzero(A[i])[0]
        if nz.size:
            out[i] = (A[i, nz][:, None] * B[nz]).sum(axis=0)
    return out


def _max_abs(x) -> float:
    return float(np.abs(x).max(initial=0.0))


def validate_complex(c: TwistedComplex, tol: float = 0.0, *, raise_on_failure: bool = True) -> ValidityReport:
    """Check ``d^2 = 0``, ``K^2 = 0``, ``dK + Kd = 0`` and ``d~^2 = 0`` with exact products."""
    d, K = c.differentials, c.kappa_wedge
    res = {"d_squared": 0.0, "kappa_squared": 0.0, "kappa_closed": 0.0, "twisted_d_squared": 0.0}
    dt = twisted_differential(c)
    for k in range(c.q - 1):
        res["twisted_d_squared"] = max(res["twisted_d_squared"], _max_abs(exact_matmul(dt[k + 1], dt[k])))
        res["d_squared"] = max(res["d_squared"], _max_abs(exact_matmul(d[k + 1], d[k])))
        res["kappa_squared"] = max(res["kappa_squared"], _max_abs(exact_matmul(K[k + 1], K[k])))
        anti = exact_matmul(d[k + 1], K[k]) + exact_matmul(K[k + 1], d[k])
        res["kappa_closed"] = max(res["kappa_closed"], _max_abs(anti))
    report = ValidityReport(res, tol)
    if raise_on_failure and not report.valid:
        worst = max(res, key=res.get)
        raise ContractViolation(f"complex {c.name!r} rejected: {worst} residual {res[worst]:.3g}",
                                residual=worst, value=res[worst])
    return report


def twisted_differential(c: TwistedComplex, twisted: bool = True) -> list[np.ndarray]:
    if not twisted:
        return list(c.differentials)
    return [d - 0.5 * K for d, K in zip(c.differentials, c.kappa_wedge)]


def twisted_codifferential(c: TwistedComplex, twisted: bool = True) -> list[np.ndarray]:
    """``delta~_k : C^(k+1) -> C^k`` adjoint to ``d~_k`` for the Gram matrices."""
    G = c.inner_products
    return [np.linalg.solve(G[k], dk.conj().T @ G[k + 1])
            for k, dk in enumerate(twisted_differential(c, twisted))]


def twisted_laplacian(c: TwistedComplex, k: int, twisted: bool = True) -> np.ndarray:
    d = twisted_differential(c, twisted)
    delta = twisted_codifferential(c, twisted)
    n = c.dims[k]
    out = np.zeros((n, n), dtype=complex)
    if k < c.q:
        out += delta[k] @ d[k]
    if k > 0:
        out += d[k - 1] @ delta[k - 1]
    return out


def cohomology_dims(c: TwistedComplex, twisted: bool = True, rtol: float = RANK_RTOL) -> CohomologyReport:
    """Betti numbers from SVD ranks, cross-checked against ``ker Delta~``."""
    d = twisted_differential(c, twisted)
    dims = c.dims
    ranks = [numerical_rank(x, rtol) for x in d]
    flags = []
    for k, x in enumerate(d):
        if x.size and rank_margin(x, rtol) < 1.0:
            flags.append(f"rank_unstable_d{k}")
    betti, harmonic = [], []
    for k in range(c.q + 1):
        kernel = dims[k] - (ranks[k] if k < c.q else 0)
        betti.append(kernel - (ranks[k - 1] if k > 0 else 0))
        lap = twisted_laplacian(c, k, twisted)
        harmonic.append(lap.shape[0] - numerical_rank(lap, rtol))
    if betti != harmonic:
        raise ContractViolation(f"Hodge mismatch: ranks give {betti}, harmonic kernels give {harmonic}",
                                residual="hodge")
    return CohomologyReport(
        tuple(betti), twisted, sum((-1) ** k * b for k, b in enumerate(betti)), tuple(flags),
        {"model": c.name, "dims": list(dims), **c.metadata},
    )


def is_taut(c: TwistedComplex) -> bool:
    """Taut exactly when the twisted ``H^0`` is nonzero."""
    return cohomology_dims(c, twisted=True).betti[0] > 0


def poincare_check(c: TwistedComplex, rtol: float = 1e-8) -> dict:
    """Symmetry ``b_k = b_(q-k)`` of twisted betti numbers, plus spectra for spectral models."""
    if not c.oriented:
        raise ValidationError("Poincare duality needs a transversally oriented model")
    rep = cohomology_dims(c, twisted=True)
    out = {"betti": list(rep.betti), "symmetric": rep.betti == rep.betti[::-1], "spectral_gap": None}
    if c.spectral:
        worst = 0.0
        for k in range(c.q // 2 + 1):
            a = _nonzero_spectrum(twisted_laplacian(c, k))
            b = _nonzero_spectrum(twisted_laplacian(c, c.q - k))
            if a.size != b.size:
                worst = np.inf
                break
            if a.size:
                worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a)))))
        out["spectral_gap"] = worst
        out["spectral_match"] = worst <= rtol
    out["ok"] = out["symmetric"] and out.get("spectral_match", True)
    return out


def _nonzero_spectrum(lap: np.ndarray) -> np.ndarray:
    ev = np.sort(np.linalg.eigvals(lap).real)
    scale = max(1.0, np.abs(ev).max(initial=0.0))
    return ev[np.abs(ev) > RANK_RTOL * scale]


# model builders


def _stack(top, bottom) -> np.ndarray:
    return np.vstack([top, bottom])


def carriere_model(lam: float, N: int, h: TrigSeries | None = None) -> TwistedComplex:
    """Basic complex of the Carriere flow on functions of ``t`` (period 1).

    Degree 1 is ``{f dt} + {g eta}`` and degree 2 is ``{h dt^eta}``, with
    ``eta`` the invariant unit transverse form, ``d eta = log(lam) dt^eta``.
    Modes ``|k| <= N``.  With ``h`` the mean curvature is ``log(lam) dt + dh``.
    """
    if lam <= 1:
        raise ValidationError("the Carriere model needs lambda > 1")
    if N < 8:
        raise ValidationError("the Carriere model needs N >= 8")
    L = float(np.log(lam))
    n = 2 * N + 1
    D = derivative_matrix(N, period=1.0)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    kappa = L * eye
    if h is not None:
        _check_model_function(h)
        kappa = kappa + multiplication_matrix(h.derivative(), N, period=1.0)
    d0 = _stack(D, zero)
    d1 = np.hstack([zero, D + L * eye])
    K0 = _stack(kappa, zero)
    K1 = np.hstack([zero, kappa])
    ks = mode_indices(N)
    labels = (
        tuple(f"f[{k}]" for k in ks),
        tuple(f"dt:f[{k}]" for k in ks) + tuple(f"eta:g[{k}]" for k in ks),
        tuple(f"dt^eta:h[{k}]" for k in ks),
    )
    return TwistedComplex(
        2, (d0, d1), (K0, K1), labels=labels, spectral=h is None, name="carriere",
        metadata={"lambda": lam, "N": N, "log_lambda": L, "shift": None if h is None else h.to_dict()},
    )


def circle_model(c: float, N: int) -> TwistedComplex:
    """Codimension-one model on the circle (period 1) with ``kappa = c dt``."""
    if N < 1:
        raise ValidationError("truncation must be at least 1")
    n = 2 * N + 1
    return TwistedComplex(1, (derivative_matrix(N, period=1.0),), (c * np.eye(n),),
                          spectral=True, name="circle", metadata={"kappa": c, "N": N})


def flat_torus_model(q: int, M: int, kappa) -> TwistedComplex:
    """Forms on ``T^q`` with a constant ``kappa``; spectral in every degree."""
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (q,):
        raise ValidationError(f"kappa must have {q} components")
    modes = torus_modes(q, M)
    d, K = [], []
    for r in range(q):
        d.append(block_diag(*[wedge_operator(2j * np.pi * m, r) for m in modes]))
        K.append(block_diag(*[wedge_operator(kappa.astype(complex), r) for _ in modes]))
    return TwistedComplex(q, tuple(d), tuple(K), spectral=True, name="flat_torus",
                          metadata={"M": M, "kappa": kappa.tolist()})


def koszul_complex(a, b) -> TwistedComplex:
    """Exterior algebra of ``R^q`` with ``d = a^`` and ``K = b^`` for integer vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = a.size
    d = tuple(wedge_operator(a, r).real for r in range(q))
    K = tuple(wedge_operator(b, r).real for r in range(q))
    return TwistedComplex(q, d, K, spectral=True, name="koszul", metadata={"a": a.tolist(), "b": b.tolist()})


def random_complex(betti, ranks, rng: np.random.Generator) -> TwistedComplex:
    """Integer complex with prescribed cohomology and ranks, in scrambled coordinates.

    Degree ``k`` splits as image (``ranks[k-1]``), harmonic (``betti[k]``) and
    a complement mapped isomorphically onto the next image part.  ``K = 0``.
    """
    q = len(betti) - 1
    if len(ranks) != q:
        raise ValidationError("need one rank per differential")
    parts = [((ranks[k - 1] if k else 0), betti[k], (ranks[k] if k < q else 0)) for k in range(q + 1)]
    d = []
    for k in range(q):
        src, dst = parts[k], parts[k + 1]
        mat = np.zeros((sum(dst), sum(src)))
        mat[:ranks[k], src[0] + src[1]:] = np.eye(ranks[k])
        d.append(mat)
    K = tuple(np.zeros_like(x) for x in d)
    # no duality is built in, so the model is not treated as oriented
    std = TwistedComplex(q, tuple(d), K, inner_products=tuple(np.eye(sum(p)) for p in parts),
                         oriented=False, spectral=False, name="random")
    return random_conjugate(std, rng)


def _unimodular(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    low = np.tril(rng.integers(-1, 2, size=(n, n)), -1).astype(float) + np.eye(n)
    perm = np.eye(n)[rng.permutation(n)]
    U = perm @ low
    return U, np.rint(np.linalg.inv(U))


def random_conjugate(c: TwistedComplex, rng: np.random.Generator) -> TwistedComplex:
    """Change basis in every degree by a random unimodular integer matrix.

    Integer inputs stay integer, so ``d^2 = 0`` survives exactly; the Gram
    matrices transform so that adjoints and cohomology are unchanged.
    """
    pairs = [_unimodular(n, rng) for n in c.dims]
    d = tuple(pairs[k + 1][0] @ x @ pairs[k][1] for k, x in enumerate(c.differentials))
    K = tuple(pairs[k + 1][0] @ x @ pairs[k][1] for k, x in enumerate(c.kappa_wedge))
    G = tuple(Ui.T @ g @ Ui for (_, Ui), g in zip(pairs, c.inner_products))
    return TwistedComplex(c.q, d, K, inner_products=G, oriented=c.oriented, spectral=c.spectral,
                          name=f"{c.name}_conjugated", metadata=dict(c.metadata))


def octahedron_z4_model() -> TwistedComplex:
    """Rotation-invariant simplicial cochains on the octahedron (a 2-sphere).

    This is the transversal complex of a taut suspension: ``kappa = 0`` and
    the quarter-turn about the vertical axis acts on the leaf space.  Basis
    elements are signed orbit sums; the Gram matrix records orbit sizes.
    """
    # vertices: +e1, +e2, -e1, -e2, +e3, -e3; the quarter turn cycles the first four
    rot = np.array([1, 2, 3, 0, 4, 5])
    antipodal = {frozenset((0, 2)), frozenset((1, 3)), frozenset((4, 5))}
    simplices = [[(v,) for v in range(6)]]
    simplices.append([s for s in combinations(range(6), 2) if frozenset(s) not in antipodal])
    simplices.append([s for s in combinations(range(6), 3)
                      if not any(frozenset(p) in antipodal for p in combinations(s, 2))])
    index = [{s: i for i, s in enumerate(level)} for level in simplices]

    def act(s):
        image = [int(rot[v]) for v in s]
        order = np.argsort(image)
        sign = int(round(np.linalg.det(np.eye(len(s))[order]))) if len(s) > 1 else 1
        return tuple(sorted(image)), sign

    orbit_vectors, reps = [], []
    for level, idx in zip(simplices, index):
        seen, vecs, rp = set(), [], []
        for s in level:
            if s in seen:
                continue
            vec = np.zeros(len(level))
            cur, sign = s, 1
            for _ in range(4):
                seen.add(cur)
                vec[idx[cur]] += sign
                cur, step = act(cur)
                sign *= step
            if np.any(vec):
                vecs.append(vec)
                rp.append(idx[s])
        orbit_vectors.append(np.array(vecs).T)
        reps.append(rp)

    def coboundary(k):
        rows, cols = simplices[k + 1], index[k]
        mat = np.zeros((len(rows), len(simplices[k])))
        for i, s in enumerate(rows):
            for j in range(len(s)):
                mat[i, cols[s[:j] + s[j + 1:]]] += (-1) ** j
        return mat

    d = []
    for k in range(2):
        full = coboundary(k) @ orbit_vectors[k]
        d.append(full[reps[k + 1]])
    G = tuple(B.T @ B for B in orbit_vectors)
    K = tuple(np.zeros_like(x) for x in d)
    return TwistedComplex(2, tuple(d), K, inner_products=G, spectral=False, name="octahedron_z4",
                          metadata={"dims_full": [len(s) for s in simplices]})


# conformal shift


def _check_model_function(h) -> None:
    if not isinstance(h, TrigSeries):
        raise ValidationError("h must be a trigonometric polynomial (TrigSeries) in the model space")
    if h.period != 1.0:
        raise ValidationError("h must have period 1 to live on the Carriere base circle")


@dataclass(frozen=True)
class ConformalShift:
    complex: TwistedComplex
    intertwiners: tuple[np.ndarray, ...]
    residual: float


def conformal_shift(lam: float, N: int, h: TrigSeries) -> ConformalShift:
    """Carriere model with ``kappa -> kappa + dh`` and the ``e^{h/2}`` intertwiner.

    The residual is ``max_k || d~'_k E_k - E_(k+1) d~_k ||`` measured from
    ``H^1`` to ``L^2`` (columns weighted by ``(1 + (2 pi k)^2)^(-1/2)``).  The
    plain operator norm stalls because truncation perturbs the top modes.
    """
    _check_model_function(h)
    base = carriere_model(lam, N)
    shifted = carriere_model(lam, N, h)
    E = multiplication_matrix(lambda t: np.exp(h(t) / 2), N, period=1.0)
    Es = (E, block_diag(E, E), E)
    d = twisted_differential(base)
    ds = twisted_differential(shifted)
    w0 = sobolev_weights(N, period=1.0)
    weights = (w0, np.concatenate([w0, w0]))
    residual = 0.0
    for k in range(2):
        gap = ds[k] @ Es[k] - Es[k + 1] @ d[k]
        residual = max(residual, float(np.linalg.norm(gap * weights[k][None, :], 2)))
    return ConformalShift(shifted, Es, residual)
