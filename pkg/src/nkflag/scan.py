"""Grid search for constant frames whose generators close under the bracket.

A constant frame X_i = F_i + l[0, i] h1 + l[1, i] h2, with F the normal-form
frame of angles (theta, beta, phi), spans a subalgebra exactly when every
bracket [X_i, X_j] lies in the span.  Each such subalgebra integrates to a
homogeneous Lagrangian; the scan finds them and sorts them into orbit families.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .frames import REFERENCE_PLANES, LagPlane, frame_vectors, isotropy_maps, normalize_frame, stabilizer
from .nk import block_rotation, extend_automorphism, perm_rep
from .orbits import closure_residual, example_generators
from .su3 import STRUCTURE
from .submanifold import FramedLagrangian, sff_generic

PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class ScanConfig:
    angle_points: int = 9
    l_min: float = -2.0
    l_max: float = 2.0
    l_step: float = 0.5
    tol: float = 1e-10
    starts_per_point: int = 4      # separated grid minima refined at each angle point
    workers: int | None = None
    chunk: int = 59049

    def l_values(self) -> np.ndarray:
        n = int(round((self.l_max - self.l_min) / self.l_step)) + 1
        return np.linspace(self.l_min, self.l_max, n)

    def l_grid(self) -> np.ndarray:
        """All l-vectors of the grid as rows (l11, l12, l13, l21, l22, l23)."""
        lv = self.l_values()
        n = len(lv)
        idx = np.arange(n ** 6)
        return lv[np.stack([(idx // n ** (5 - d)) % n for d in range(6)], axis=1)]

    def angle_grid(self) -> list[tuple[float, float, float]]:
        n = self.angle_points
        thetas = np.linspace(0.0, np.pi, n, endpoint=False)
        betas = np.linspace(0.0, 0.5 * np.pi, n)
        phis = np.linspace(0.0, np.pi, n, endpoint=False)
        return [(float(t), float(b), float(p)) for t in thetas for b in betas for p in phis]


def _generators(theta: float, beta: float, phi: float, l6: np.ndarray) -> np.ndarray:
    g = np.zeros((3, 8))
    g[:, 2:] = frame_vectors(theta, beta, phi)
    g[:, :2] = np.asarray(l6, dtype=float).reshape(2, 3).T
    return g


def residual_vector(params: np.ndarray) -> np.ndarray:
    """Closure residual of the frame (theta, beta, phi, l11, l12, l13, l21, l22, l23)."""
    gens = _generators(params[0], params[1], params[2], params[3:])
    out = []
    for i, j in PAIRS:
        br = np.einsum("a,b,abk->k", gens[i], gens[j], STRUCTURE)
        coeff = gens[:, 2:] @ br[2:]
        out.append(br - coeff @ gens)
    return np.concatenate(out)


def _grid_residuals(frame: np.ndarray, lgrid: np.ndarray) -> np.ndarray:
    """Squared closure residual for every row of lgrid (N x 6, ordered l11..l23)."""
    F = np.zeros((3, 8))
    F[:, 2:] = frame
    H = np.eye(8)[:2]
    base = np.array([np.einsum("a,b,abk->k", F[i], F[j], STRUCTURE) for i, j in PAIRS])
    lin = np.zeros((6, 3, 8))
    for v in range(6):
        a, col = divmod(v, 3)
        for p, (i, j) in enumerate(PAIRS):
            if col == i:
                lin[v, p] += np.einsum("a,b,abk->k", H[a], F[j], STRUCTURE)
            if col == j:
                lin[v, p] += np.einsum("a,b,abk->k", F[i], H[a], STRUCTURE)
    br = base[None] + np.einsum("nv,vpk->npk", lgrid, lin)
    coeff = np.einsum("npk,qk->npq", br[:, :, 2:], frame)
    res_m = br[:, :, 2:] - coeff @ frame
    lmat = lgrid.reshape(-1, 2, 3).transpose(0, 2, 1)         # [n, k, a] = l[a, k]
    res_h = br[:, :, :2] - coeff @ lmat
    return (res_m ** 2).sum((1, 2)) + (res_h ** 2).sum((1, 2))


def grid_starts(frame: np.ndarray, lgrid: np.ndarray, k: int, separation: float, chunk: int = 59049) -> list[np.ndarray]:
    """The k lowest-residual grid points that are pairwise more than `separation` apart in max-norm."""
    res = np.concatenate([_grid_residuals(frame, lgrid[i:i + chunk]) for i in range(0, len(lgrid), chunk)])
    out: list[np.ndarray] = []
    for i in np.argsort(res, kind="stable"):
        if all(np.abs(lgrid[i] - o).max() > separation for o in out):
            out.append(lgrid[i].copy())
            if len(out) == k:
                break
    return out


_LGRID_CACHE: dict = {}


def _starts_job(args) -> list[np.ndarray]:
    angles, config = args
    key = (config.l_min, config.l_max, config.l_step)
    if key not in _LGRID_CACHE:
        _LGRID_CACHE.clear()
        _LGRID_CACHE[key] = config.l_grid()
    ls = grid_starts(frame_vectors(*angles), _LGRID_CACHE[key], config.starts_per_point,
                     1.01 * config.l_step, config.chunk)
    return [np.concatenate([angles, l]) for l in ls]


def _jacobian(x: np.ndarray, h: float = 1e-7) -> np.ndarray:
    return np.array([(residual_vector(x + h * e) - residual_vector(x - h * e)) / (2 * h) for e in np.eye(len(x))]).T


def refine(params0: np.ndarray, polish: int = 3) -> tuple[np.ndarray, float]:
    """Levenberg-Marquardt, then a few Gauss-Newton steps (LM tends to stop near 1e-9 on these roots)."""
    sol = least_squares(residual_vector, np.asarray(params0, float), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=2000, method="lm")
    x = sol.x
    res = float(np.abs(residual_vector(x)).max())
    for _ in range(polish):
        if res < 1e-14:
            break
        step = np.linalg.lstsq(_jacobian(x), -residual_vector(x), rcond=1e-10)[0]
        trial = x + step
        r_trial = float(np.abs(residual_vector(trial)).max())
        if r_trial >= res:
            break
        x, res = trial, r_trial
    return x, res


@dataclass(frozen=True)
class FamilySignature:
    name: str
    plane: LagPlane
    generators: np.ndarray
    continuous_dim: int
    discrete_order: int


def family_signatures() -> list[FamilySignature]:
    out = []
    for name in ("f12r3", "s3", "rp3"):
        plane = REFERENCE_PLANES[name]()
        rep = stabilizer(plane)
        out.append(FamilySignature(name, plane, example_generators(name), rep.continuous_dim, rep.discrete_order))
    return out


def _span_distance(a: np.ndarray, b: np.ndarray) -> float:
    qa, _ = np.linalg.qr(a.T)
    qb, _ = np.linalg.qr(b.T)
    return float(np.abs(qa @ qa.T - qb @ qb.T).max())


def subalgebra_match(gens: np.ndarray, fam: FamilySignature, tol: float = 1e-7) -> bool:
    """Some isotropy map sending the plane to the family plane also carries the subalgebra across."""
    plane = LagPlane.from_span(gens[:, 2:])
    for sigma, sol in isotropy_maps(plane, fam.plane, True, 1e-8):
        for a in sol.points:
            r6 = block_rotation((a[0], a[1], a[0] + a[1])) @ perm_rep(sigma)
            auto, err = extend_automorphism(r6)
            if err > 1e-9:
                continue
            if _span_distance((auto @ gens.T).T, fam.generators) < tol:
                return True
    return False


@dataclass
class ScanSolution:
    params: np.ndarray
    residual: float
    family: str | None
    signature: tuple[int, int]
    angles: tuple[float, float, float]
    sff_norm: float = 0.0      # isometry invariant that separates orbits sharing a tangent plane


@dataclass
class ScanReport:
    config: ScanConfig
    grid_points: int
    refined: int
    solutions: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def families(self) -> list[str]:
        return sorted({s.family for s in self.solutions if s.family})

    def anomaly_classes(self) -> list[dict]:
        """Anomalies grouped by stabilizer signature, normal-form angles and second fundamental form norm."""
        groups: dict = {}
        for a in self.anomalies:
            key = (a.signature, tuple(round(x, 6) for x in a.angles), round(a.sff_norm, 6))
            groups.setdefault(key, []).append(a)
        out = []
        for (sig, ang, norm), members in sorted(groups.items()):
            out.append({"signature": sig, "angles": ang, "sff_norm": norm, "count": len(members),
                        "params": members[0].params})
        return out

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.solutions:
            if s.family:
                out[s.family] = out.get(s.family, 0) + 1
        return dict(sorted(out.items()))


def classify(params: np.ndarray, residual: float, fams: list[FamilySignature]) -> ScanSolution:
    gens = _generators(params[0], params[1], params[2], params[3:])
    plane = LagPlane(gens[:, 2:])
    rep = stabilizer(plane)
    sig = (rep.continuous_dim, rep.discrete_order)
    angles = tuple(float(x) for x in normalize_frame(plane).angles.triple())
    sff = sff_generic(FramedLagrangian(gens[:, 2:], gens[:, :2].T)).norm()
    family = None
    for fam in fams:
        if sig == (fam.continuous_dim, fam.discrete_order) and subalgebra_match(gens, fam):
            family = fam.name
            break
    return ScanSolution(np.asarray(params, float), residual, family, sig, angles, float(sff))


def _workers(config: ScanConfig) -> int:
    if config.workers:
        return max(1, int(config.workers))
    return max(1, int(os.environ.get("NKFLAG_WORKERS", "1")))


def homogeneous_scan(config: ScanConfig = ScanConfig(), seeds=()) -> ScanReport:
    """Grid sweep, refinement of several separated grid minima per angle point, then classification."""
    grid = config.angle_grid()
    lvals = config.l_values()
    report = ScanReport(config, len(grid) * len(lvals) ** 6, 0)
    if config.angle_points < 5:
        report.warnings.append(f"angle grid of {config.angle_points} points is below 5; results are partial")
    jobs = [(a, config) for a in grid]
    workers = _workers(config)
    if workers > 1:
        # map preserves job order, so the merge is independent of the worker count
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(_starts_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_point = [_starts_job(j) for j in jobs]
    starts = [p for group in per_point for p in group]
    starts += [np.asarray(s, float) for s in seeds]
    fams = family_signatures()
    for p0 in starts:
        x, res = refine(p0)
        report.refined += 1
        if res > config.tol:
            continue
        if closure_residual(_generators(x[0], x[1], x[2], x[3:])) > 1e-9:
            continue
        sol = classify(x, res, fams)
        report.solutions.append(sol)
        if sol.family is None:
            report.anomalies.append(sol)
    return report


__all__ = [
    "ScanConfig", "residual_vector", "refine", "grid_starts", "FamilySignature", "family_signatures", "subalgebra_match",
    "ScanSolution", "ScanReport", "classify", "homogeneous_scan", "PAIRS",
]
