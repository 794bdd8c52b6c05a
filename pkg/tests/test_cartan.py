import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import expm

from nkflag import cartan, orbits, su3
from nkflag.reports import exact_alpha, quadratic_map, random_su3

from strategies import alg8

BOX = ((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))


def test_order_table_is_fourth_order():
    rows = cartan.order_table(np.eye(8)[0], 2 * np.pi / 3)
    assert rows[-1].ratio == pytest.approx(16.0, abs=2.0)
    assert all(r.error < 1e-4 for r in rows)


@settings(max_examples=15)
@given(alg8)
def test_constant_generator_endpoint(x):
    x = x / max(1.0, np.linalg.norm(x))
    res = cartan.integrate_path(lambda t: x, np.linspace(0, 1.0, 21))
    assert np.abs(res.endpoint - expm(su3.matrix_of(x))).max() < 1e-10
    assert res.unitarity_defect < 1e-12


def test_magnus_step_constant_is_exponential(rng):
    a = rng.normal(size=8)
    assert np.allclose(cartan.magnus_step(a, a, 0.1), expm(0.1 * su3.matrix_of(a)), atol=1e-13)


def test_speed_profile_endpoints():
    s, ds = cartan.speed_profile(2.0)
    assert s(0.0) == pytest.approx(0.0) and s(2.0) == pytest.approx(2.0)
    assert (s(1.0 + 1e-6) - s(1.0 - 1e-6)) / 2e-6 == pytest.approx(ds(1.0), rel=1e-6)


def test_zero_form_keeps_initial_frame(rng):
    g0 = random_su3(rng)
    res = cartan.integrate_path(lambda t: np.zeros(8), np.linspace(0, 1, 11), g0=g0)
    assert np.abs(res.endpoint - g0).max() < 1e-12


def test_one_dimensional_patch_has_zero_residual():
    patch = cartan.FramedPatch((np.linspace(0, 1, 5),), np.ones((1, 5, 8)))
    assert cartan.mc_residual(patch).max == 0.0


def test_integration_recovers_exact_map(rng):
    z, dz = quadratic_map(rng)
    lift = lambda u: expm(su3.matrix_of(z(u)))
    path = lambda t: np.array([0.3 * t, 0.5 * t * t])
    vel = lambda t: np.array([0.3, t])
    times = np.linspace(0, 1, 1001)
    res = cartan.integrate_path(lambda t: vel(t) @ exact_alpha(z, dz, path(t)), times, g0=lift(path(0)))
    dev = max(np.abs(res.frames[i] - lift(path(t))).max() for i, t in enumerate(times))
    assert dev < 1e-7


@pytest.mark.parametrize("name", ["s3", "rp3"])
def test_reconstructed_orbit_keeps_invariants(name):
    from nkflag.frames import LagPlane, normalize_frame

    gens = orbits.example_generators(name)
    x = np.array([0.7, -0.4, 0.5]) @ gens
    res = cartan.integrate_path(lambda t: x, np.linspace(0, 1, 51))
    angles = []
    for g in res.frames[::10]:
        moved = np.linalg.inv(su3.Ad_matrix(g)) @ gens.T
        angles.append(normalize_frame(LagPlane.from_span(moved.T[:, 2:])).angles.triple())
    assert np.abs(np.array(angles) - angles[0]).max() < 1e-8


def test_step_too_large():
    with pytest.raises(cartan.StepTooLarge):
        cartan.integrate_path(lambda t: np.eye(8)[0], np.linspace(0, 2.0, 3))


def test_grid_too_small():
    patch = cartan.FramedPatch((np.linspace(0, 1, 2), np.linspace(0, 1, 5)), np.zeros((2, 2, 5, 8)))
    with pytest.raises(cartan.GridTooSmall):
        cartan.mc_residual(patch)


def test_patch_shape_checked():
    with pytest.raises(ValueError):
        cartan.FramedPatch((np.linspace(0, 1, 4),), np.zeros((1, 5, 8)))
    with pytest.raises(ValueError):
        cartan.FramedPatch((np.array([0.0, 0.0, 1.0]),) * 2, np.zeros((2, 3, 3, 8)))


def _exact_residual(n, rng_seed=3):
    z, dz = quadratic_map(np.random.default_rng(rng_seed))
    patch, _ = cartan.exact_patch(z, dz, (np.linspace(0, 0.5, n),) * 2)
    return cartan.mc_residual(patch).max


def test_exact_patch_is_flat_to_second_order():
    e1, e2 = _exact_residual(17), _exact_residual(33)
    assert e2 < 1e-3
    assert 3.0 < e1 / e2 < 5.0


def test_non_flat_field_detected():
    E = np.eye(8)
    patch = cartan.FramedPatch.from_function((np.linspace(0, 1, 9),) * 2, lambda u: np.array([E[2], E[3]]))
    # constant alpha with [m1, m2] != 0 cannot be the pullback of a map
    assert cartan.mc_residual(patch).max == pytest.approx(np.linalg.norm(su3.bracket_arr(E[2], E[3])), abs=1e-12)


def test_flat_loop_has_trivial_holonomy(rng):
    z, dz = quadratic_map(rng)
    hol = cartan.loop_holonomy(lambda u: exact_alpha(z, dz, u), (0.1, 0.1), 0.3, 200)
    assert np.abs(hol - np.eye(3)).max() < 1e-6


def test_congruence_recovers_translation(rng):
    g = random_su3(rng)
    lift = cartan.orbit_map(orbits.example_generators("rp3"))
    f1 = cartan.FramedMap(lift, *BOX)
    f2 = cartan.FramedMap(lambda u: g @ lift(u), *BOX)
    res = cartan.congruence_test(f2, f1, rng)
    assert res.congruent and res.witness_valid
    assert np.abs(res.witness - g).max() < 1e-9


def _inner_element(auto):
    """k in SU(3) with Ad(k) = auto, from the linear system k X = auto(X) k."""
    from scipy.linalg import null_space

    rows = [np.kron(np.eye(3), su3.matrix_of(x).T) - np.kron(su3.matrix_of(auto @ x), np.eye(3)) for x in np.eye(8)]
    ns = null_space(np.vstack(rows))
    assert ns.shape[1] == 1
    k = ns[:, 0].reshape(3, 3)
    return k / np.linalg.det(k) ** (1 / 3)


def test_rp3_stabilizer_image_is_congruent(rng):
    from nkflag import frames, nk

    gens = orbits.example_generators("rp3")
    rep = frames.stabilizer(frames.LagPlane.from_span(gens[:, 2:]))
    order3 = [e for e in rep.elements if frames._order(nk.iso_rep(e)) == 3]
    assert len(order3) == 2
    auto, err = nk.extend_automorphism(nk.iso_rep(order3[0]))
    assert err < 1e-12
    k = _inner_element(auto)
    assert np.abs(su3.Ad_matrix(k) - auto).max() < 1e-12
    lift = cartan.orbit_map(gens)
    res = cartan.congruence_test(cartan.FramedMap(lift, *BOX),
                                 cartan.FramedMap(lambda u: k @ lift(u) @ k.conj().T, *BOX), rng)
    assert res.congruent and res.invariant_gap < 1e-8
    # the two lifts differ by a constant normalizer gauge, so one base point does not give a global witness
    assert not res.witness_valid


def test_distinct_orbits_not_congruent(rng):
    f1 = cartan.FramedMap(cartan.orbit_map(orbits.example_generators("rp3")), *BOX)
    f2 = cartan.FramedMap(cartan.orbit_map(orbits.example_generators("s3")), *BOX)
    res = cartan.congruence_test(f1, f2, rng)
    assert not res.congruent and res.witness is None


def test_domain_mismatch():
    lift = cartan.orbit_map(orbits.example_generators("s3"))
    with pytest.raises(cartan.DomainMismatch):
        cartan.congruence_test(cartan.FramedMap(lift, *BOX), cartan.FramedMap(lift, (0, 0, 0), (1, 1, 1)))
