import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from nkflag import frames, nk
from nkflag.frames import LagPlane, normalize_frame, plane_from_angles, stabilizer

from strategies import angle


def real_plane(u: np.ndarray) -> LagPlane:
    """Columns of a unitary matrix, read in the complex coordinates of m."""
    z = u.T
    return LagPlane(np.stack([z[:, 0].real, z[:, 1].real, z[:, 2].real, z[:, 0].imag, z[:, 1].imag, -z[:, 2].imag], 1))


def random_plane(seed: int) -> LagPlane:
    return real_plane(unitary_group.rvs(3, random_state=np.random.default_rng(seed)))


@given(angle, angle, angle)
def test_frame_is_special_lagrangian(t, b, p):
    plane = plane_from_angles(t, b, p)
    assert frames.is_lagrangian(plane) and frames.is_special(plane, 1e-9)


@given(st.integers(0, 10 ** 6))
def test_unitary_columns_are_lagrangian(seed):
    assert frames.is_lagrangian(random_plane(seed), 1e-10)


@given(angle, angle, angle, angle)
def test_upsilon_phase_tracks_alpha(t, b, p, a):
    ups = frames.upsilon_on(plane_from_angles(t, b, p, a))
    assert abs(abs(ups) - 1) < 1e-10


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6))
def test_normal_form_reproduces_plane(seed):
    plane = random_plane(seed)
    res = normalize_frame(plane)
    a = res.angles
    rebuilt = plane_from_angles(a.theta, a.beta, a.phi, a.alpha)
    assert frames.plane_distance(nk.symmetry_action(res.element, plane), rebuilt) < 1e-9
    assert np.abs(res.basis - res.frame).max() < 1e-9
    assert 0 <= a.theta < np.pi / 2 + 1e-12 and 0 <= a.beta <= np.pi / 2 + 1e-12 and 0 <= a.phi < np.pi + 1e-12


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6), angle, angle)
def test_normal_form_is_torus_invariant(seed, x, y):
    # the normal form is a slice for the isotropy torus; signed permutations are outside it
    plane = random_plane(seed)
    e = nk.IsotropyElement.torus(x, y)
    a1 = normalize_frame(plane).angles.triple()
    a2 = normalize_frame(nk.symmetry_action(e, plane)).angles.triple()
    assert np.abs(a1 - a2).max() < 1e-7


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6))
def test_normal_form_idempotent(seed):
    a = normalize_frame(random_plane(seed)).angles
    again = normalize_frame(plane_from_angles(a.theta, a.beta, a.phi, a.alpha)).angles
    assert np.abs(again.triple() - a.triple()).max() < 1e-8


def test_special_alpha_relation(rng):
    for _ in range(50):
        t, b, p = rng.uniform(0, 2 * np.pi, 3)
        a = normalize_frame(plane_from_angles(t, b, p)).angles
        assert a.special and abs(np.cos(a.alpha - a.theta)) < 1e-9


def test_reference_normal_forms():
    f12 = normalize_frame(frames.REFERENCE_PLANES["f12r3"]()).angles
    assert np.allclose(f12.triple(), [0, np.pi / 2, 0], atol=1e-12)
    s3 = normalize_frame(frames.REFERENCE_PLANES["s3"]()).angles
    assert np.allclose(s3.triple(), [0, np.pi / 2, np.pi / 4], atol=1e-12)
    rp3 = normalize_frame(frames.REFERENCE_PLANES["rp3"]()).angles
    assert np.allclose(rp3.triple(), [0, np.arctan(np.sqrt(2)), np.pi / 4], atol=1e-12)


def test_torus_solutions_recover_known_element(rng):
    plane = random_plane(3)
    x, y = rng.uniform(0, 2 * np.pi, 2)
    moved = nk.symmetry_action(nk.IsotropyElement.torus(x, y), plane)
    sol = frames.torus_solutions(plane.s_matrix(), moved.s_matrix())
    assert sol is not None and sol.rank == 2
    a1, a2, _ = nk.torus_block_angles(x, y)
    assert any(np.abs(np.angle(np.exp(1j * (np.array(p) - [a1, a2])))).max() < 1e-8 for p in sol.points)


def test_orbit_equivalence_separates_references():
    refs = {k: f() for k, f in frames.REFERENCE_PLANES.items()}
    for a in refs:
        for b in refs:
            assert frames.orbit_equivalent(refs[a], refs[b]) == (a == b)


def _closed_under_products(rep, plane):
    mats = [nk.iso_rep(e) for e in rep.elements]
    for a in mats:
        for b in mats:
            moved = LagPlane(plane.vectors @ (a @ b).T)
            assert frames.plane_distance(moved, plane) < 1e-9


def test_stabilizer_s3():
    plane = frames.REFERENCE_PLANES["s3"]()
    rep = stabilizer(plane)
    assert rep.continuous_dim == 1
    assert np.allclose(np.abs(rep.generator), [0, 1], atol=1e-9)


def test_stabilizer_f12():
    plane = frames.REFERENCE_PLANES["f12r3"]()
    rep = stabilizer(plane)
    assert (rep.continuous_dim, rep.discrete_order, rep.label) == (0, 24, "[D]")
    assert rep.max_fix_defect < 1e-12
    _closed_under_products(rep, plane)


def test_stabilizer_rp3_inner_part_is_z3():
    plane = frames.REFERENCE_PLANES["rp3"]()
    rep = stabilizer(plane)
    assert rep.inner_order == 3
    assert (rep.discrete_order, rep.label) == (6, "[S3]")
    _closed_under_products(rep, plane)


def test_generic_plane_has_trivial_stabilizer():
    rep = stabilizer(plane_from_angles(0.3, 0.7, 0.4))
    assert rep.continuous_dim == 0 and rep.discrete_order in (1, 2)


def test_slice_dimension(rng):
    for _ in range(20):
        assert frames.slice_jacobian_rank(*rng.uniform(0.2, 1.3, 3)) == 3


def test_non_lagrangian_rejected():
    bad = LagPlane(np.eye(6)[[0, 3, 1]])
    with pytest.raises(frames.NotLagrangian):
        normalize_frame(bad)
    with pytest.raises(frames.NotOrthonormal):
        LagPlane(np.ones((3, 6)))
