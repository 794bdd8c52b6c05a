import numpy as np
import pytest

from nkflag import scan
from nkflag.submanifold import RP3_ANGLES, RP3_CLOSING_L, SU2_SECOND_ROOT_L

TINY = scan.ScanConfig(angle_points=2, l_min=-1.0, l_max=1.0, l_step=1.0, starts_per_point=2)
RP3_PARAMS = np.concatenate([RP3_ANGLES, np.asarray(RP3_CLOSING_L).ravel()])
SECOND_PARAMS = np.concatenate([RP3_ANGLES, np.asarray(SU2_SECOND_ROOT_L).ravel()])


def test_l_grid_enumerates_all_vectors():
    grid = TINY.l_grid()
    assert grid.shape == (3 ** 6, 6)
    assert len({tuple(r) for r in grid}) == 3 ** 6


def test_residual_vanishes_at_closing_frames():
    assert np.abs(scan.residual_vector(RP3_PARAMS)).max() < 1e-12
    assert np.abs(scan.residual_vector(SECOND_PARAMS)).max() < 1e-12
    assert np.abs(scan.residual_vector(np.zeros(9))).max() < 1e-12   # f12r3: m1, m2, m3


def test_grid_residual_agrees_with_residual_vector(rng):
    angles = tuple(rng.uniform(0, 1.5, size=3))
    ls = rng.normal(size=(5, 6))
    fast = scan._grid_residuals(scan.frame_vectors(*angles), ls)
    slow = [np.sum(scan.residual_vector(np.concatenate([angles, l])) ** 2) for l in ls]
    assert np.allclose(fast, slow, atol=1e-12)


def test_grid_starts_are_separated(rng):
    starts = scan.grid_starts(scan.frame_vectors(0.3, 0.4, 0.5), TINY.l_grid(), 4, 0.5)
    assert len(starts) == 4
    for i in range(4):
        for j in range(i):
            assert np.abs(starts[i] - starts[j]).max() > 0.5


def test_refine_converges_from_perturbed_root(rng):
    x, res = scan.refine(RP3_PARAMS + 1e-3 * rng.normal(size=9))
    assert res < 1e-12


def test_seeded_rp3_is_classified():
    sol = scan.classify(RP3_PARAMS, 0.0, scan.family_signatures())
    assert sol.family == "rp3"
    assert sol.sff_norm == pytest.approx(2 * np.sqrt(2), abs=1e-10)


def test_second_root_is_an_anomaly():
    sol = scan.classify(SECOND_PARAMS, 0.0, scan.family_signatures())
    assert sol.family is None
    assert sol.signature == (0, 6)
    assert sol.sff_norm == pytest.approx(np.sqrt(2), abs=1e-10)


def test_tiny_scan_warns_and_keeps_seeds():
    rep = scan.homogeneous_scan(TINY, seeds=[RP3_PARAMS, SECOND_PARAMS])
    assert rep.warnings and "partial" in rep.warnings[0]
    assert "rp3" in rep.families
    assert 8 + 2 <= rep.refined <= 8 * 2 + 2
    classes = rep.anomaly_classes()
    assert any(abs(c["sff_norm"] - np.sqrt(2)) < 1e-6 for c in classes)


def test_scan_independent_of_worker_count():
    cfg1 = TINY
    cfg2 = scan.ScanConfig(**{**TINY.__dict__, "workers": 2})
    r1, r2 = scan.homogeneous_scan(cfg1), scan.homogeneous_scan(cfg2)
    assert len(r1.solutions) == len(r2.solutions)
    for a, b in zip(r1.solutions, r2.solutions):
        assert np.array_equal(a.params, b.params) and a.family == b.family
