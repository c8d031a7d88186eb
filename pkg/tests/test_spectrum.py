import numpy as np
import pytest

from transdirac import ContractViolation, SpectrumReport
from transdirac.spectrum import kernel_dim, numerical_rank, rank_margin, spectrum_from_eigenvalues


def test_clustering_and_roundtrip():
    rep = spectrum_from_eigenvalues([2.0, -1.0, 2.0 + 1e-12, 0.0], 3, "test")
    assert rep.eigenvalues == (-1.0, 0.0, 2.0 + 5e-13)
    assert rep.multiplicities == (1, 1, 2)
    assert SpectrumReport.from_dict(rep.to_dict()) == rep
    assert rep.multiplicity_of(2.0) == 2 and rep.multiplicity_of(5.0) == 0


def test_complex_spectrum_rejected():
    with pytest.raises(ContractViolation):
        spectrum_from_eigenvalues(np.array([1 + 1e-3j]), 1, "bad")


def test_report_invariants():
    with pytest.raises(ContractViolation):
        SpectrumReport((1.0, 0.0), (1, 1), 1, "x")
    with pytest.raises(ContractViolation):
        SpectrumReport((1.0,), (0,), 1, "x")


def test_rank_helpers():
    A = np.diag([1.0, 1e-3, 0.0])
    assert numerical_rank(A) == 2 and kernel_dim(A) == 1
    assert rank_margin(A) > 1
    assert rank_margin(np.diag([1.0, 2e-9])) < 1
