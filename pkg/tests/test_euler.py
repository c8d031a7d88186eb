import json

import numpy as np
import pytest

from transdirac import ContractViolation, ValidationError
from transdirac import euler as eu


def test_characters_orthonormal():
    for group in (eu.FiniteGroup.cyclic(4), eu.FiniteGroup.product(2, 2), eu.FiniteGroup.cyclic(3)):
        chars = eu.irreducible_characters(group)
        gram = np.array([[eu.character_inner(a, b) for b in chars] for a in chars])
        assert np.allclose(gram, np.eye(len(chars)))


def test_aliases():
    z2 = eu.irreducible_characters(eu.FiniteGroup.cyclic(2))
    assert "1" in z2[0].aliases and "xi" in z2[1].aliases
    k4 = eu.irreducible_characters(eu.FiniteGroup.product(2, 2))
    assert {c.aliases[-1] for c in k4} == {"(1,1)", "(-1,1)", "(1,-1)", "(-1,-1)"}


def test_z4_torus_two_routes():
    action = eu.z4_rotation_action()
    lef = tuple(eu.lefschetz_euler(action, f"rho{j}") for j in range(4))
    ds = eu.load_dataset("z4_torus")
    strata = tuple(eu.strata_euler(ds.records, f"rho{j}") for j in range(4))
    assert lef == strata == (2, -1, 0, -1)


def test_negation_action():
    action = eu.negation_action(2)
    assert (eu.lefschetz_euler(action, "1"), eu.lefschetz_euler(action, "rho1")) == (2, -2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_o_n_sphere(n):
    ds = eu.load_dataset(f"o_n_sphere_{n}")
    assert eu.strata_euler(ds.records, "1") == 1
    assert eu.strata_euler(ds.records, "xi") == (-1) ** n


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_antipodal_sphere_against_oracle(n):
    ds = eu.load_dataset(f"antipodal_sphere_{n}")
    group = eu.FiniteGroup.cyclic(2)
    mats = {(0,): np.eye(n + 1), (1,): -np.eye(n + 1)}
    for rho in ("1", "xi"):
        assert eu.strata_euler(ds.records, rho) == eu.sphere_lefschetz_euler(group, mats, rho)


def test_z2xz2_sphere_against_oracle():
    ds = eu.load_dataset("z2xz2_sphere")
    group = ds.abelian_group()
    a, b = np.diag([-1.0, 1, 1]), np.diag([1.0, -1, 1])
    mats = {(0, 0): np.eye(3), (1, 0): a, (0, 1): b, (1, 1): a @ b}
    for rho in ds.representations:
        assert eu.strata_euler(ds.records, rho, group) == eu.sphere_lefschetz_euler(group, mats, rho)
    assert [eu.strata_euler(ds.records, r, group) for r in ds.representations] == [1, 0, 0, 1]


@pytest.mark.parametrize("name,value", [("rotation_suspension", 2), ("carriere", 0),
                                        ("klein_suspension", 2), ("codim3_suspension", 0)])
def test_gauss_bonnet(name, value):
    assert eu.basic_gauss_bonnet(eu.load_dataset(name).records) == value


def test_open_convention():
    assert eu.open_euler(2, True) == 1 and eu.open_euler(2, False) == 2


def test_load_by_filename_and_path(tmp_path):
    assert eu.load_dataset("z4_torus.json").name == "z4_torus"
    raw = {"group": {"name": "Z_2"}, "strata": [
        {"label": "free", "principal": True, "chi_rel": 2, "chi_rho_orbit": {"1": 1, "xi": 1}}]}
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(raw))
    ds = eu.load_dataset(path)
    assert eu.strata_euler(ds.records, "xi") == 2


def test_bad_datasets_rejected():
    with pytest.raises(ValidationError):
        eu.load_dataset("no_such_dataset")
    with pytest.raises(ValidationError):
        eu.parse_dataset("x", {"group": {}, "strata": [
            {"label": "a", "principal": False, "chi_rel": 1, "chi_rho_orbit": {"1": 1}}]})
    with pytest.raises(ValidationError):
        eu.parse_dataset("x", {"group": {}, "strata": [
            {"label": "a", "principal": True, "chi_rel": 0.5, "chi_rho_orbit": {"1": 1}}]})


def test_non_homomorphism_rejected():
    group = eu.FiniteGroup.cyclic(2)
    with pytest.raises(ValidationError):
        eu.LinearTorusAction(group, {(0,): np.eye(2), (1,): np.array([[1, 1], [0, 1]])})


def test_non_integral_average_is_contract_violation():
    group = eu.FiniteGroup.cyclic(3)
    # not a homomorphism: the reflection spoils integrality of the average
    mats = {(0,): np.eye(3), (1,): np.diag([-1.0, 1, 1]), (2,): np.eye(3)}
    with pytest.raises(ContractViolation):
        eu.sphere_lefschetz_euler(group, mats, "rho1")


def test_all_shipped_datasets_load():
    for name in eu.dataset_names():
        eu.load_dataset(name)
