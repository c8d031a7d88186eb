"""Equivariant and basic Euler characteristics.

Two independent routes for finite abelian group actions:

* the stratified sum over isotropy strata, fed with per-stratum integers
  (``strata_euler``), and
* a character average of ``det(I - A_g)`` for linear actions on flat tori,
  where harmonic forms are the constant-coefficient ones (``lefschetz_euler``);
  ``sphere_lefschetz_euler`` is the analogue for orthogonal actions on spheres.

``basic_gauss_bonnet`` sums quotient Euler characteristics against
leaf-closure terms for Riemannian foliations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path

import numpy as np

from .exceptions import ContractViolation, ValidationError

__all__ = [
    "FiniteGroup",
    "Character",
    "irreducible_characters",
    "character_inner",
    "LinearTorusAction",
    "z4_rotation_action",
    "negation_action",
    "lefschetz_euler",
    "sphere_lefschetz_euler",
    "StratumRecord",
    "StrataDataset",
    "strata_euler",
    "open_euler",
    "FoliationStratumRecord",
    "FoliationDataset",
    "basic_gauss_bonnet",
    "parse_dataset",
    "load_dataset",
    "dataset_names",
]

INTEGRALITY_TOL = 1e-9


@dataclass(frozen=True)
class FiniteGroup:
    """Finite abelian group ``Z_n1 x ... x Z_nr``; elements are exponent tuples."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if not self.moduli or any(int(m) != m or m < 1 for m in self.moduli):
            raise ValidationError("group moduli must be positive integers")
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls((n,))

    @classmethod
    def product(cls, *ns: int) -> "FiniteGroup":
        return cls(tuple(ns))

    @property
    def order(self) -> int:
        return int(np.prod(self.moduli))

    @property
    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*(range(m) for m in self.moduli)))

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    def multiply(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inverse(self, a) -> tuple[int, ...]:
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def multiplication_table(self) -> np.ndarray:
        idx = {g: i for i, g in enumerate(self.elements)}
        return np.array([[idx[self.multiply(a, b)] for b in self.elements] for a in self.elements])

    def element_label(self, g) -> str:
        return str(g[0]) if len(g) == 1 else "(" + ",".join(map(str, g)) + ")"


@dataclass(frozen=True)
class Character:
    """One-dimensional character ``g -> exp(2 pi i sum_k j_k g_k / n_k)``."""

    group: FiniteGroup
    index: tuple[int, ...]

    @property
    def label(self) -> str:
        if len(self.index) == 1:
            return f"rho{self.index[0]}"
        return "rho" + "_".join(map(str, self.index))

    @property
    def aliases(self) -> tuple[str, ...]:
        out = [self.label]
        if not any(self.index):
            out += ["1", "trivial"]
        if self.group.moduli == (2,) and self.index == (1,):
            out.append("xi")
        if all(m == 2 for m in self.group.moduli):
            out.append("(" + ",".join("-1" if j else "1" for j in self.index) + ")")
        return tuple(out)

    def __call__(self, g) -> complex:
        phase = sum(j * x / m for j, x, m in zip(self.index, g, self.group.moduli))
        return _root_of_unity(phase)

    def values(self) -> np.ndarray:
        return np.array([self(g) for g in self.group.elements])


def _root_of_unity(phase: float) -> complex:
    # exact values at multiples of a quarter turn keep averages integral
    frac = phase % 1.0
    quarter = {0.0: 1.0 + 0j, 0.25: 1j, 0.5: -1.0 + 0j, 0.75: -1j}
    if frac in quarter:
        return quarter[frac]
    return complex(np.exp(2j * np.pi * frac))


def irreducible_characters(group: FiniteGroup) -> list[Character]:
    return [Character(group, j) for j in group.elements]


def character_inner(a: Character, b: Character) -> complex:
    """``(1/|G|) sum_g a(g) conj(b(g))``."""
    return complex(np.sum(a.values() * np.conj(b.values())) / a.group.order)


def _find_character(group: FiniteGroup, label) -> Character:
    if isinstance(label, Character):
        return label
    for ch in irreducible_characters(group):
        if str(label) in ch.aliases:
            return ch
    raise ValidationError(f"unknown representation label {label!r}")


def _round_integral(value: complex, what: str) -> int:
    nearest = round(value.real)
    err = abs(value - nearest)
    if err > INTEGRALITY_TOL:
        raise ContractViolation(f"{what} = {value} is not an integer (off by {err:.3g})",
                                residual="integrality", value=err)
    return int(nearest)


@dataclass(frozen=True)
class LinearTorusAction:
    """Action of a finite abelian group on ``T^n`` by integer matrices."""

    group: FiniteGroup
    matrices: dict

    def __post_init__(self):
        mats = {tuple(g): np.asarray(a) for g, a in self.matrices.items()}
        object.__setattr__(self, "matrices", mats)
        if set(mats) != set(self.group.elements):
            raise ValidationError("a matrix is required for every group element")
        n = mats[self.group.identity].shape[0]
        for g, a in mats.items():
            if a.shape != (n, n) or not np.array_equal(a, np.rint(a)):
                raise ValidationError(f"matrix for {g} must be an integer {n}x{n} matrix")
            if abs(round(np.linalg.det(a))) != 1:
                raise ValidationError(f"matrix for {g} is not invertible over the integers")
        if not np.array_equal(mats[self.group.identity], np.eye(n)):
            raise ValidationError("the identity must act trivially")
        for g in self.group.elements:
            for h in self.group.elements:
                if not np.array_equal(mats[g] @ mats[h], mats[self.group.multiply(g, h)]):
                    raise ValidationError(f"not a homomorphism at ({g}, {h})")

    @property
    def dim(self) -> int:
        return self.matrices[self.group.identity].shape[0]


def z4_rotation_action() -> LinearTorusAction:
    """``Z_4`` on ``T^2`` generated by the quarter turn ``[[0, -1], [1, 0]]``."""
    group = FiniteGroup.cyclic(4)
    R = np.array([[0, -1], [1, 0]])
    return LinearTorusAction(group, {(k,): np.linalg.matrix_power(R, k) for k in range(4)})


def negation_action(n: int = 2) -> LinearTorusAction:
    """``Z_2`` acting on ``T^n`` by ``-I``."""
    group = FiniteGroup.cyclic(2)
    return LinearTorusAction(group, {(0,): np.eye(n, dtype=int), (1,): -np.eye(n, dtype=int)})


def lefschetz_euler(action: LinearTorusAction, rho) -> int:
    """``(1/|G|) sum_g det(I - A_g) conj(rho(g))``."""
    ch = _find_character(action.group, rho)
    n = action.dim
    total = 0j
    for g in action.group.elements:
        lef = round(np.linalg.det(np.eye(n) - action.matrices[g]))
        total += lef * np.conj(ch(g))
    return _round_integral(total / action.group.order, f"chi^{ch.label}")


def sphere_lefschetz_euler(group: FiniteGroup, matrices: dict, rho) -> int:
    """Orthogonal action on ``S^n`` in ``R^(n+1)``: average ``1 + (-1)^n det B_g`` against ``rho``.

    Harmonic forms on the round sphere are the constants and the volume
    form, on which ``g`` acts by ``det B_g``.
    """
    ch = _find_character(group, rho)
    mats = {tuple(g): np.asarray(b, dtype=float) for g, b in matrices.items()}
    if set(mats) != set(group.elements):
        raise ValidationError("a matrix is required for every group element")
    dim = mats[group.identity].shape[0]
    for g, b in mats.items():
        if not np.allclose(b @ b.T, np.eye(dim), atol=1e-12):
            raise ValidationError(f"matrix for {g} is not orthogonal")
    n = dim - 1
    total = sum((1 + (-1) ** n * round(np.linalg.det(mats[g]))) * np.conj(ch(g)) for g in group.elements)
    return _round_integral(total / group.order, f"chi^{ch.label}")


@dataclass(frozen=True)
class StratumRecord:
    """Per-stratum data: relative Euler characteristic of its quotient and orbit multiplicities."""

    label: str
    principal: bool
    chi_rel: int
    chi_rho_orbit: dict[str, int]

    def __post_init__(self):
        if int(self.chi_rel) != self.chi_rel:
            raise ValidationError(f"stratum {self.label}: chi_rel must be an integer")
        for k, v in self.chi_rho_orbit.items():
            if int(v) != v:
                raise ValidationError(f"stratum {self.label}: chi_rho_orbit[{k}] must be an integer")

    def to_dict(self) -> dict:
        return {"label": self.label, "principal": self.principal, "chi_rel": self.chi_rel,
                "chi_rho_orbit": dict(self.chi_rho_orbit)}


@dataclass(frozen=True)
class StrataDataset:
    name: str
    group: dict
    representations: tuple[str, ...]
    records: tuple[StratumRecord, ...]
    description: str = ""
    metadata: dict = field(default_factory=dict)

    def abelian_group(self) -> FiniteGroup | None:
        if "moduli" in self.group:
            return FiniteGroup(tuple(self.group["moduli"]))
        return None


def _canonical_rho(records, rho: str, group: FiniteGroup | None) -> str:
    keys = set().union(*(r.chi_rho_orbit for r in records)) if records else set()
    if rho in keys or group is None:
        return rho
    ch = _find_character(group, rho)
    for alias in ch.aliases:
        if alias in keys:
            return alias
    return rho


def strata_euler(records, rho: str, group: FiniteGroup | None = None) -> int:
    """``sum_j chi_rho_orbit[rho] * chi_rel`` over all strata."""
    records = list(records)
    if sum(1 for r in records if r.principal) != 1:
        raise ValidationError("exactly one principal stratum is required")
    key = _canonical_rho(records, str(rho), group)
    total = 0
    for r in records:
        if key not in r.chi_rho_orbit:
            raise ValidationError(f"stratum {r.label!r} has no entry for representation {rho!r}")
        total += int(r.chi_rho_orbit[key]) * int(r.chi_rel)
    return total


def open_euler(chi_compactified: int, open: bool) -> int:
    """Euler characteristic with the open-manifold convention (one-point compactification minus one)."""
    return int(chi_compactified) - 1 if open else int(chi_compactified)


@dataclass(frozen=True)
class FoliationStratumRecord:
    """``chi_quotient`` is an integer or ``{"chi_compactified": int, "open": bool}``."""

    label: str
    chi_quotient: int | dict
    chi_leaf_closure: int

    @property
    def quotient_euler(self) -> int:
        if isinstance(self.chi_quotient, dict):
            return open_euler(self.chi_quotient["chi_compactified"], self.chi_quotient["open"])
        return int(self.chi_quotient)

    def to_dict(self) -> dict:
        return {"label": self.label, "chi_quotient": self.chi_quotient, "chi_leaf_closure": self.chi_leaf_closure}


@dataclass(frozen=True)
class FoliationDataset:
    name: str
    records: tuple[FoliationStratumRecord, ...]
    description: str = ""
    metadata: dict = field(default_factory=dict)


def basic_gauss_bonnet(records) -> int:
    """``chi(M, F) = sum_j chi(M_j / closure F) * chi(L_j, F, O_j)``."""
    records = list(records)
    if not records:
        raise ValidationError("at least one stratum is required")
    return sum(r.quotient_euler * int(r.chi_leaf_closure) for r in records)


# datasets


def _data_dir():
    return resources.files("transdirac") / "data"


def dataset_names() -> list[str]:
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".json"))


def _parse_strata(name: str, raw: dict) -> StrataDataset:
    for key in ("group", "strata"):
        if key not in raw:
            raise ValidationError(f"dataset {name}: missing key {key!r}")
    records = []
    for s in raw["strata"]:
        missing = {"label", "principal", "chi_rel", "chi_rho_orbit"} - set(s)
        if missing:
            raise ValidationError(f"dataset {name}: stratum missing {sorted(missing)}")
        records.append(StratumRecord(s["label"], bool(s["principal"]), s["chi_rel"], dict(s["chi_rho_orbit"])))
    if sum(r.principal for r in records) != 1:
        raise ValidationError(f"dataset {name}: exactly one principal stratum is required")
    reps = tuple(raw["group"].get("representations") or sorted(records[0].chi_rho_orbit))
    return StrataDataset(name, raw["group"], reps, tuple(records), raw.get("description", ""), raw.get("metadata", {}))


def _parse_foliation(name: str, raw: dict) -> FoliationDataset:
    if "strata" not in raw:
        raise ValidationError(f"dataset {name}: missing key 'strata'")
    records = []
    for s in raw["strata"]:
        missing = {"label", "chi_quotient", "chi_leaf_closure"} - set(s)
        if missing:
            raise ValidationError(f"dataset {name}: stratum missing {sorted(missing)}")
        q = s["chi_quotient"]
        if isinstance(q, dict) and set(q) != {"chi_compactified", "open"}:
            raise ValidationError(f"dataset {name}: chi_quotient needs chi_compactified and open")
        records.append(FoliationStratumRecord(s["label"], q, s["chi_leaf_closure"]))
    return FoliationDataset(name, tuple(records), raw.get("description", ""), raw.get("metadata", {}))


def parse_dataset(name: str, raw: dict):
    kind = raw.get("kind", "strata")
    if kind == "strata":
        return _parse_strata(name, raw)
    if kind == "foliation":
        return _parse_foliation(name, raw)
    raise ValidationError(f"dataset {name}: unknown kind {kind!r}")


def load_dataset(name_or_path: str | Path):
    """Load a shipped dataset by name, or any dataset file by path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        raw = json.loads(path.read_text())
        name = path.stem
    else:
        name = path.stem if path.suffix == ".json" and path.parent == Path(".") else str(name_or_path)
        res = _data_dir() / f"{name}.json"
        if not res.is_file():
            raise ValidationError(f"unknown dataset {name_or_path!r}; shipped: {', '.join(dataset_names())}")
        raw = json.loads(res.read_text())
    return parse_dataset(name, raw)
