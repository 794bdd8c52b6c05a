import numpy as np
import pytest
from hypothesis import given
from scipy.linalg import expm as scipy_expm

from nkflag import su3
from nkflag.su3 import AlgVec, GroupElt

from strategies import alg8


def test_basis_matrices_are_traceless_antihermitian():
    for b in su3.BASIS:
        assert abs(np.trace(b)) < 1e-15
        assert np.abs(b + b.conj().T).max() < 1e-15


def test_gram_matrix_is_identity():
    gram = np.array([[-su3.killing(AlgVec(a), AlgVec(b)) / 12 for b in np.eye(8)] for a in np.eye(8)])
    assert np.abs(gram - np.eye(8)).max() < 1e-13


def test_structure_constants_match_matrix_commutators():
    for a in range(8):
        for b in range(8):
            A, B = su3.BASIS[a], su3.BASIS[b]
            assert np.abs(su3.coords_of(A @ B - B @ A) - su3.STRUCTURE[a, b]).max() < 1e-14


def test_dual_table_consistent():
    assert su3.table_mismatch() < 1e-14


def test_reductive_relations():
    rep = su3.reductive_checks()
    assert rep.ok, rep.violations


@given(alg8, alg8)
def test_bracket_antisymmetric(x, y):
    assert np.allclose(su3.bracket_arr(x, y), -su3.bracket_arr(y, x), atol=1e-12)


@given(alg8, alg8, alg8)
def test_jacobi(x, y, z):
    b = su3.bracket_arr
    assert np.abs(b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))).max() < 1e-10


@given(alg8)
def test_coords_roundtrip(x):
    assert np.allclose(su3.coords_of(su3.matrix_of(x)), x, atol=1e-13)


@given(alg8, alg8)
def test_killing_two_routes(x, y):
    a, b = AlgVec(x), AlgVec(y)
    assert abs(su3.killing(a, b) - su3.killing_adtrace(a, b)) < 1e-9


@given(alg8)
def test_expm_against_scipy(x):
    g = su3.expm(AlgVec(x))
    assert np.abs(g.entries - scipy_expm(su3.matrix_of(x))).max() < 1e-10


@given(alg8, alg8)
def test_ad_is_bracket_automorphism(x, y):
    g = su3.expm(AlgVec(x) * 0.3)
    A = su3.Ad_matrix(g)
    z = np.ones(8)
    assert np.allclose(A @ su3.bracket_arr(y, z), su3.bracket_arr(A @ y, A @ z), atol=1e-10)


def test_project_su3_repairs_drift(rng):
    u = su3.expm(AlgVec(rng.normal(size=8))).entries
    noisy = u + 1e-6 * rng.normal(size=(3, 3))
    p = su3.project_su3(noisy)
    assert np.abs(p @ p.conj().T - np.eye(3)).max() < 1e-13
    assert abs(np.linalg.det(p) - 1) < 1e-13


def test_from_matrix_rejects_non_su3():
    with pytest.raises(ValueError):
        AlgVec.from_matrix(np.eye(3))


def test_group_inverse():
    g = su3.expm(AlgVec(np.arange(8) / 10))
    assert np.allclose((g @ g.inv()).entries, np.eye(3), atol=1e-13)
