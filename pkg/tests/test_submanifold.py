import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nkflag import submanifold as sm
from nkflag.orbits import closure_residual

from strategies import angle

lvals = st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6).map(lambda v: np.array(v).reshape(2, 3))


@pytest.mark.parametrize("name", ["f12r3", "s3"])
def test_totally_geodesic_examples(name):
    F = sm.reference_frame(name)
    assert closure_residual(F.generators()) < 1e-12
    assert sm.sff_generic(F).norm() < 1e-12


def test_rp3_pattern_values():
    h = sm.sff_generic(sm.reference_frame("rp3", pattern_l=True))
    s2 = np.sqrt(2)
    assert h.nonzero().keys() == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    assert h.h[0, 0, 0] == pytest.approx(s2, abs=1e-10)
    for k in ((0, 1, 1), (1, 0, 1), (1, 1, 0)):
        assert h.h[k] == pytest.approx(-s2, abs=1e-10)


def test_rp3_pattern_values_do_not_close_but_flipped_do():
    assert closure_residual(sm.reference_frame("rp3", pattern_l=True).generators()) > 1.0
    F = sm.reference_frame("rp3")
    assert closure_residual(F.generators()) < 1e-12
    assert np.abs(sm.dh_defect(F, 0)).max() < 1e-12 and np.abs(sm.dh_defect(F, 1)).max() < 1e-12


def test_second_root_closes_with_smaller_sff():
    F = sm.FramedLagrangian.from_angles(*sm.RP3_ANGLES, l=sm.SU2_SECOND_ROOT_L)
    assert closure_residual(F.generators()) < 1e-12
    h = sm.sff_generic(F)
    assert h.norm() == pytest.approx(np.sqrt(2), abs=1e-12)
    assert sm.sff_generic(sm.reference_frame("rp3")).norm() == pytest.approx(2 * np.sqrt(2), abs=1e-12)


@given(angle, angle, angle, lvals)
def test_sff_symmetric_for_any_constant_frame(t, b, p, l):
    h = sm.sff_generic(sm.FramedLagrangian.from_angles(t, b, p, l)).h
    assert np.abs(h - h.transpose(0, 2, 1)).max() < 1e-10


@pytest.mark.parametrize("frame", [sm.reference_frame("f12r3"), sm.reference_frame("s3"), sm.reference_frame("rp3"),
                                   sm.FramedLagrangian.from_angles(*sm.RP3_ANGLES, l=sm.SU2_SECOND_ROOT_L)])
def test_closing_frames_are_minimal_and_fully_symmetric(frame):
    h = sm.sff_generic(frame).h
    assert np.abs(np.einsum("iik->k", h)).max() < 1e-12
    for perm in ((1, 0, 2), (2, 1, 0), (0, 2, 1)):
        assert np.abs(h - h.transpose(perm)).max() < 1e-12


@given(angle, angle, angle, lvals)
def test_closed_form_matches_generic_on_constant_frames(t, b, p, l):
    F = sm.FramedLagrangian.from_angles(t, b, p, l)
    assert sm.formula_agreement(sm.sff_generic(F), sm.sff_closed_form(t, b, p, l)) < 1e-9


def test_flipped_sign_disagrees_when_beta_varies():
    patch = sm.LagrangianPatch.from_functions(
        tuple(np.linspace(0, 0.2, 9) for _ in range(3)),
        theta=lambda u1, u2, u3: 0.4 + 0 * u1, beta=lambda u1, u2, u3: 0.6 + u3, phi=lambda u1, u2, u3: 0.3 + 0 * u1)
    idx = (4, 4, 4)
    d = patch.angle_derivatives(idx, richardson=True)
    h = sm.sff_generic(patch, idx, richardson=True)
    fixed = sm.sff_closed_form(patch.theta[idx], patch.beta[idx], patch.phi[idx], patch.l_at(idx), d)
    flipped_sign = sm.sff_closed_form(patch.theta[idx], patch.beta[idx], patch.phi[idx], patch.l_at(idx), d, flipped_sign=True)
    assert abs(h.h[2, 2, 1] - fixed.entries[(2, 2, 1)]) < 1e-6
    assert abs(h.h[2, 2, 1] - flipped_sign.entries[(2, 2, 1)]) > 0.1


def _patch_error(n):
    from nkflag.reports import demo_patch

    patch = demo_patch(n)
    c = n // 2
    u1, u2, u3 = (a[c] for a in patch.axes)
    exact = np.array([[0.8, 0.6 * u1, -0.2 * u2], [-0.5 * u3, 0.4, -0.2 * u1], [-0.5 * u2, 0.0, 0.6]])
    h = sm.sff_generic(patch, (c, c, c))
    cf = sm.sff_closed_form(patch.theta[c, c, c], patch.beta[c, c, c], patch.phi[c, c, c], patch.l_at((c, c, c)), exact)
    return sm.formula_agreement(h, cf)


def test_patch_agreement_is_second_order():
    e1, e2 = _patch_error(21), _patch_error(41)
    assert e1 < 1e-3
    assert 3.0 < e1 / e2 < 5.0


def test_branch_constraints_recover_l():
    l = np.array([[0.3, -0.2, 0.5], [0.1, 0.7, -0.4]])
    phi = 0.4
    c = sm.sff_closed_form(0.0, np.pi / 2, phi, l).constraints
    assert c["l11"] == pytest.approx(0.3, abs=1e-12)
    assert c["l12"] == pytest.approx(-0.2, abs=1e-12)
    assert c["l13"] == pytest.approx(0.5, abs=1e-12)
    q = np.sin(phi) ** 2 - np.cos(phi) ** 2
    assert c["l23*(sin^2 phi - cos^2 phi)"] == pytest.approx(-0.4 * q, abs=1e-12)


def test_constraints_only_on_branch():
    assert sm.sff_closed_form(0.3, 0.4, 0.5, np.zeros((2, 3))).constraints is None


def test_special_frames_have_zero_re_upsilon():
    for name in ("f12r3", "s3", "rp3"):
        assert abs(sm.upsilon_pullback(sm.reference_frame(name))) < 1e-12


def test_boundary_point_raises():
    patch = sm.LagrangianPatch.from_functions(
        tuple(np.linspace(0, 0.2, 5) for _ in range(3)),
        theta=lambda *u: 0.1 + u[0], beta=lambda *u: 0.5 + 0 * u[0], phi=lambda *u: 0.2 + 0 * u[0])
    with pytest.raises(sm.BoundaryPoint):
        sm.sff_generic(patch, (0, 2, 2))


def test_non_lagrangian_frame_rejected():
    with pytest.raises(ValueError):
        sm.FramedLagrangian(np.eye(6)[[0, 3, 1]])
