"""Spectra with multiplicities and SVD-based rank utilities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolation

__all__ = [
    "RANK_RTOL",
    "SpectrumReport",
    "spectrum_from_eigenvalues",
    "numerical_rank",
    "kernel_dim",
    "rank_margin",
]

RANK_RTOL = 1e-9


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    truncation: int
    operator_label: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = self.eigenvalues
        if len(ev) != len(self.multiplicities):
            raise ContractViolation("eigenvalue and multiplicity lists differ in length")
        if any(b <= a for a, b in zip(ev, ev[1:])):
            raise ContractViolation("eigenvalues must be strictly increasing", residual="ordering")
        if any(m < 1 for m in self.multiplicities):
            raise ContractViolation("multiplicities must be positive", residual="multiplicity")

    @property
    def total_multiplicity(self) -> int:
        return int(sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(np.array(self.eigenvalues, dtype=float), self.multiplicities)

    def multiplicity_of(self, value: float, atol: float = 1e-9) -> int:
        for ev, mult in zip(self.eigenvalues, self.multiplicities):
            if abs(ev - value) <= atol:
                return mult
        return 0

    def to_dict(self) -> dict:
        return {
            "operator_label": self.operator_label,
            "truncation": self.truncation,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "multiplicities": [int(m) for m in self.multiplicities],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumReport":
        return cls(
            eigenvalues=tuple(data["eigenvalues"]),
            multiplicities=tuple(data["multiplicities"]),
            truncation=data["truncation"],
            operator_label=data["operator_label"],
            metadata=data.get("metadata", {}),
        )


def spectrum_from_eigenvalues(values, truncation: int, label: str, *, cluster_tol: float = 1e-9,
                              imag_tol: float | None = 1e-8, metadata: dict | None = None) -> SpectrumReport:
    """Group (real) eigenvalues into distinct values with multiplicities.

    Consecutive sorted values closer than ``cluster_tol * max(1, |x|)`` are
    merged; the representative is the cluster mean.  With ``imag_tol`` set,
    an imaginary part larger than that is a contract violation.
    """
    vals = np.asarray(values)
    if np.iscomplexobj(vals):
        worst = float(np.abs(vals.imag).max(initial=0.0))
        if imag_tol is not None and worst > imag_tol:
            raise ContractViolation(f"spectrum is not real (max |Im| = {worst:.3g})", residual="imaginary_part", value=worst)
        vals = vals.real
    vals = np.sort(vals.astype(float))
    eigs: list[float] = []
    mults: list[int] = []
    cluster: list[float] = []
    for x in vals:
        if cluster and abs(x - cluster[-1]) > cluster_tol * max(1.0, abs(x)):
            eigs.append(float(np.mean(cluster)))
            mults.append(len(cluster))
            cluster = []
        cluster.append(float(x))
    if cluster:
        eigs.append(float(np.mean(cluster)))
        mults.append(len(cluster))
    return SpectrumReport(tuple(eigs), tuple(mults), truncation, label, dict(metadata or {}))


def _singular_values(a) -> np.ndarray:
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(a, rtol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rtol`` times the largest one."""
    s = _singular_values(a)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def kernel_dim(a, rtol: float = RANK_RTOL) -> int:
    a = np.asarray(a)
    return a.shape[1] - numerical_rank(a, rtol)


def rank_margin(a, rtol: float = RANK_RTOL) -> float:
    """Distance (in decades) from the rank threshold to the nearest singular value.

    Values below ``1`` (a factor of 10) signal an unstable rank decision.
    """
    s = _singular_values(a)
    if s.size == 0 or s[0] == 0:
        return np.inf
    thresh = rtol * s[0]
    s = s[s > 0]
    if s.size == 0:
        return np.inf
    return float(np.min(np.abs(np.log10(s / thresh))))
