"""Lagrangian 3-planes in m, their normal form under the isotropy torus, and stabilizers.

A Lagrangian plane is encoded by the complex coordinates z1 = x1 + i x4,
z2 = x2 + i x5, z3 = x3 - i x6 of an orthonormal frame.  With U the 3x3
matrix of frame columns, S = U U^T is symmetric unitary and depends only on
the plane.  The torus acts as D = diag(e^{i a1}, e^{i a2}, e^{-i(a1+a2)}) and
S transforms to D S D, which makes fixed-point and equivalence questions
solvable in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .forms import evaluate, im_upsilon, omega_nk, re_upsilon
from .nk import (D_GROUP, IsotropyElement, J_NK, block_rotation, extend_automorphism, iso_rep,
                 perm_rep, torus_from_block)
from .su3 import SQRT3, ad_matrix

TOL = 1e-12
HALF_PI = 0.5 * np.pi


class NotOrthonormal(ValueError):
    pass


class NotLagrangian(ValueError):
    pass


class DegenerateKernel(ValueError):
    pass


@dataclass(frozen=True)
class LagPlane:
    """Orthonormal triple in m, rows of a 3x6 array (coordinates over m1..m6)."""
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float).reshape(3, 6)
        if np.abs(v @ v.T - np.eye(3)).max() > 1e-10:
            raise NotOrthonormal("frame vectors are not g-orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_span(cls, vectors) -> "LagPlane":
        """Gram-Schmidt in the given order, keeping orientation of each vector."""
        v = np.array(vectors, dtype=float).reshape(3, 6)
        q, r = np.linalg.qr(v.T)
        q = q * np.sign(np.diag(r))
        return cls(q.T)

    @property
    def projector(self) -> np.ndarray:
        return self.vectors.T @ self.vectors

    def complex_frame(self) -> np.ndarray:
        return complex_coords(self.vectors).T

    def s_matrix(self) -> np.ndarray:
        u = self.complex_frame()
        return u @ u.T

    def same_span(self, other: "LagPlane", tol: float = 1e-9) -> bool:
        return plane_distance(self, other) < tol


def complex_coords(v: np.ndarray) -> np.ndarray:
    """(..., 6) real coordinates -> (..., 3) complex coordinates."""
    v = np.asarray(v, dtype=float)
    return np.stack([v[..., 0] + 1j * v[..., 3], v[..., 1] + 1j * v[..., 4], v[..., 2] - 1j * v[..., 5]], axis=-1)


def plane_distance(a: LagPlane, b: LagPlane) -> float:
    return float(np.abs(a.projector - b.projector).max())


def _omega_gram(v: np.ndarray) -> np.ndarray:
    return v @ J_NK.matrix.T @ v.T


def is_lagrangian(plane: LagPlane, tol: float = 1e-10) -> bool:
    return bool(np.abs(_omega_gram(plane.vectors)).max() <= tol)


def is_special(plane: LagPlane, tol: float = 1e-10) -> bool:
    if not is_lagrangian(plane, tol):
        return False
    return abs(evaluate(re_upsilon(), list(plane.vectors))) <= tol


def upsilon_on(plane: LagPlane) -> complex:
    v = list(plane.vectors)
    return complex(evaluate(re_upsilon(), v), evaluate(im_upsilon(), v))


def _require_lagrangian(plane: LagPlane, tol: float = 1e-9):
    if not is_lagrangian(plane, tol):
        raise NotLagrangian("omega does not vanish on the plane")


# ------------------------------------------------------------ normal form

@dataclass(frozen=True)
class FrameAngles:
    theta: float
    beta: float
    phi: float
    alpha: float
    special: bool
    flags: tuple = ()

    def triple(self) -> np.ndarray:
        return np.array([self.theta, self.beta, self.phi])


def frame_vectors(theta: float, beta: float, phi: float, alpha: float | None = None) -> np.ndarray:
    """Rows e1, e2, e3 of the normal-form frame; alpha defaults to theta + pi/2."""
    if alpha is None:
        alpha = theta + HALF_PI
    c, s = np.cos(phi), np.sin(phi)
    z = np.zeros(6)
    v1 = np.array([c, s, 0, 0, 0, 0.0])
    v2 = np.array([0, 0, 0, c, s, 0.0])
    v1p = np.array([-s, c, 0, 0, 0, 0.0])
    v2p = np.array([0, 0, 0, -s, c, 0.0])
    w = z.copy()
    w[2], w[5] = np.cos(theta), np.sin(theta)
    wp = z.copy()
    wp[2], wp[5] = -np.sin(theta), np.cos(theta)
    e1 = np.cos(alpha) * v1 + np.sin(alpha) * v2
    e2 = np.sin(beta) * v1p + np.cos(beta) * w
    e3 = np.cos(beta) * v2p + np.sin(beta) * wp
    return np.array([e1, e2, e3])


def plane_from_angles(theta: float, beta: float, phi: float, alpha: float | None = None) -> LagPlane:
    return LagPlane(frame_vectors(theta, beta, phi, alpha))


# characters of the torus on the entries S_jk, in block-angle coordinates (a1, a2)
_ZCHAR = np.array([[1, 0], [0, 1], [-1, -1]])
_PAIRS = [(j, k) for j in range(3) for k in range(j, 3)]
_CHARS = {(j, k): _ZCHAR[j] + _ZCHAR[k] for j, k in _PAIRS}


@dataclass
class TorusSolution:
    """Solutions a = (a1, a2) of D(a) S_from D(a) = S_to.

    rank 2: `points` is the finite solution set.  rank 1: the solutions are
    the lines points[i] + t * direction.  rank 0: every torus element works.
    """
    rank: int
    points: list
    direction: np.ndarray | None = None
    normal: np.ndarray | None = None


def _wrap(a: np.ndarray) -> np.ndarray:
    return (np.asarray(a) + np.pi) % (2 * np.pi) - np.pi


def _check(S_from, S_to, a, tol) -> bool:
    for j, k in _PAIRS:
        ph = np.exp(1j * float(_CHARS[(j, k)] @ a))
        if abs(ph * S_from[j, k] - S_to[j, k]) > tol:
            return False
    return True


def torus_solutions(S_from: np.ndarray, S_to: np.ndarray, tol: float = 1e-9) -> TorusSolution | None:
    active = []
    for j, k in _PAIRS:
        mf, mt = abs(S_from[j, k]), abs(S_to[j, k])
        if abs(mf - mt) > tol:
            return None
        if mt > tol:
            active.append((j, k, float(np.angle(S_to[j, k] / S_from[j, k]))))
    if not active:
        return TorusSolution(0, [np.zeros(2)])
    X = np.array([_CHARS[(j, k)] for j, k, _ in active])
    rank = int(np.linalg.matrix_rank(X))
    if rank == 2:
        best = None
        for p in range(len(active)):
            for q in range(p + 1, len(active)):
                det = int(round(np.linalg.det(X[[p, q]])))
                if det != 0 and (best is None or abs(det) < abs(best[2])):
                    best = (p, q, det)
        p, q, det = best
        minv = np.linalg.inv(X[[p, q]].astype(float))
        psi = np.array([active[p][2], active[q][2]])
        found: dict[tuple, np.ndarray] = {}
        n = abs(det)
        for i in range(n):
            for j in range(n):
                a = _wrap(minv @ (psi + 2 * np.pi * np.array([i, j])))
                if _check(S_from, S_to, a, tol):
                    key = tuple(np.round(_wrap(a + 1e-7) - 1e-7, 7))
                    found.setdefault(key, a)
        if not found:
            return None
        return TorusSolution(2, [found[k] for k in sorted(found)])
    # rank 1: all active characters are multiples of a primitive w
    ref = X[np.argmax(np.abs(X).sum(1))]
    g = gcd(int(abs(ref[0])), int(abs(ref[1])))
    w = ref // g
    direction = np.array([-w[1], w[0]], dtype=float)
    direction /= np.linalg.norm(direction)
    mults = [int(round((x @ w) / (w @ w))) for x in X]
    k0, psi0 = mults[0], active[0][2]
    points = []
    for n in range(abs(k0)):
        s = (psi0 + 2 * np.pi * n) / k0
        a = s * w / float(w @ w)
        if _check(S_from, S_to, a, tol):
            points.append(_wrap(a))
    if not points:
        return None
    return TorusSolution(1, points, direction, w.astype(float))


def _sigma_s(sigma: np.ndarray, S: np.ndarray) -> np.ndarray:
    return sigma @ S @ sigma.T


def isotropy_maps(src: LagPlane, dst: LagPlane, use_perms: bool = True, tol: float = 1e-9):
    """All (sigma, TorusSolution) with rho(A) rho(sigma) src = dst."""
    Ss, Sd = src.s_matrix(), dst.s_matrix()
    sigmas = D_GROUP if use_perms else [np.eye(3)]
    out = []
    for sigma in sigmas:
        sol = torus_solutions(_sigma_s(sigma, Ss), Sd, tol)
        if sol is not None:
            out.append((sigma, sol))
    return out


def torus_equivalent(src: LagPlane, dst: LagPlane, tol: float = 1e-9) -> bool:
    return torus_solutions(src.s_matrix(), dst.s_matrix(), tol) is not None


def orbit_equivalent(a: LagPlane, b: LagPlane, tol: float = 1e-9) -> bool:
    """Whether some element of D.U(1)^2 maps a onto b."""
    return bool(isotropy_maps(a, b, True, tol))


def _torus_element(a: np.ndarray) -> IsotropyElement:
    return IsotropyElement.torus_blocks(float(a[0]), float(a[1]))


def _element_of(sigma: np.ndarray, a: np.ndarray) -> IsotropyElement:
    e = _torus_element(a)
    if np.allclose(sigma, np.eye(3)):
        return e
    return e * IsotropyElement.perm(sigma)


@dataclass
class Normalization:
    angles: FrameAngles
    element: IsotropyElement
    change: np.ndarray        # 3x3 orthogonal, basis = change @ (plane moved by element)
    basis: np.ndarray         # input-plane vectors mapped onto the normal frame
    frame: np.ndarray         # normal-form frame rows


def _phi_family(phi0: float) -> list[float]:
    return [phi0, HALF_PI - phi0, HALF_PI + phi0, np.pi - phi0]


def _raw_candidates(S: np.ndarray, tol: float) -> tuple[list, list]:
    """Candidate (theta, beta, phi, alpha) from torus invariants of S, plus stratum flags."""
    flags = []
    det_phase = float(np.angle(-np.linalg.det(S)))  # = 2 (alpha - theta) mod 2 pi
    delta = (0.5 * det_phase) % np.pi
    a13, a23, a33 = abs(S[0, 2]), abs(S[1, 2]), abs(S[2, 2])
    sb2 = min(1.0, float(np.hypot(a13, a23)))
    cands = []
    if sb2 < 1e-7:
        flags.append("sin(beta)cos(beta)=0")
        # |K12| = |w - 1| cs and |K11 - K22| = |w - 1| |cos 2phi|
        phi0 = 0.5 * float(np.arctan2(2 * abs(S[0, 1]), abs(S[0, 0] - S[1, 1])))
        for phi in _phi_family(phi0):
            for beta in (HALF_PI, 0.0):
                for theta in (0.0, HALF_PI * 0.5):
                    cands.append((theta, beta, phi, theta + delta))
    else:
        phi0 = float(np.arctan2(a13, a23))
        s, c = np.sin(phi0), np.cos(phi0)
        beta0 = 0.5 * float(np.arctan2(sb2, a33))
        e2a = np.exp(1j * det_phase)
        coef = -(s * c * sb2) ** 2
        if abs(coef) < 1e-10:
            flags.append("sin(phi)cos(phi)=0")
            zs = []
        else:
            i3 = S[0, 2] * S[1, 2] * S[0, 1]
            i4 = S[0, 2] ** 2 * S[1, 1]
            i5 = S[1, 2] ** 2 * S[0, 0]
            zs = [i3 / coef - e2a, (i4 - s ** 4 * sb2 ** 2 * e2a) / coef, (i5 - c ** 4 * sb2 ** 2 * e2a) / coef]
        z = np.mean(zs) if zs else None
        for beta in (beta0, HALF_PI - beta0):
            cb2 = np.cos(2 * beta)
            thetas = [0.0, 0.25 * np.pi]
            if z is not None and abs(cb2) > 1e-7:
                thetas.insert(0, (-0.5 * float(np.angle(z / cb2))) % HALF_PI)
            else:
                flags.append("cos(2beta)=0") if abs(cb2) <= 1e-7 else None
            for theta in thetas:
                for phi in _phi_family(phi0):
                    cands.append((theta, beta, phi, theta + delta))
    return cands, sorted(set(flags))


def _in_domain(t: tuple) -> tuple:
    theta, beta, phi, alpha = t
    theta = theta % HALF_PI
    if theta > HALF_PI - 1e-12:
        theta = 0.0
    phi = phi % np.pi
    if phi > np.pi - 1e-12:
        phi = 0.0
    return (theta, min(max(beta, 0.0), HALF_PI), phi, alpha)


def normalize_frame(plane: LagPlane, allow_degenerate: bool = True, tol: float = 1e-8) -> Normalization:
    """Normal form of a Lagrangian plane under the isotropy torus.

    Angles land in theta in [0, pi/2), beta in [0, pi/2], phi in [0, pi); among
    equivalent candidates the lexicographically smallest triple is returned.
    """
    _require_lagrangian(plane)
    S = plane.s_matrix()
    kernel_dim = 3 - int(np.linalg.matrix_rank(plane.vectors[:, [2, 5]], tol=1e-7))
    if kernel_dim >= 2 and not allow_degenerate:
        raise DegenerateKernel(f"kernel of the m3-projection has dimension {kernel_dim}")
    raw, flags = _raw_candidates(S, tol)
    best = None
    for cand in raw:
        theta, beta, phi, alpha = _in_domain(cand)
        target = plane_from_angles(theta, beta, phi, alpha)
        sol = torus_solutions(S, target.s_matrix(), tol)
        if sol is None:
            continue
        # on the degenerate stratum the beta = pi/2 form is preferred
        key = (round(abs(beta - HALF_PI), 9) if "sin(beta)cos(beta)=0" in flags else 0.0,) + tuple(np.round([theta, beta, phi], 9))
        if best is None or key < best[0]:
            best = (key, (theta, beta, phi, alpha), target, sol)
    if best is None:
        raise RuntimeError("normal form not found; plane invariants are inconsistent")
    _, (theta, beta, phi, alpha), target, sol = best
    a = min(sol.points, key=lambda p: (round(float(np.abs(p).sum()), 9), tuple(np.round(p, 9))))
    elem = _torus_element(a)
    moved = plane.vectors @ iso_rep(elem).T
    change = target.vectors @ moved.T
    u, _, vh = np.linalg.svd(change)
    change = u @ vh
    special = is_special(plane, 1e-9)
    if special:
        alpha = theta + HALF_PI
    if np.sin(beta) * np.cos(beta) > 1e-7 and np.sin(phi) * np.cos(phi) < 1e-7:
        flags = sorted(set(flags) | {"sin(phi)cos(phi)=0"})
    angles = FrameAngles(theta, beta, phi, alpha % np.pi if not special else alpha, special, tuple(flags))
    return Normalization(angles, elem, change, change @ moved, target.vectors)


# ------------------------------------------------------------- stabilizers

@dataclass
class OrbitTypeReport:
    continuous_dim: int
    generator: np.ndarray | None   # coordinates over (h1, h2)
    discrete_order: int            # element count, or component count when continuous
    inner_order: int               # the same count restricted to inner automorphisms
    label: str
    elements: list = field(default_factory=list, repr=False)
    max_fix_defect: float = 0.0


def _h_stabilizer(plane: LagPlane) -> tuple[int, np.ndarray | None]:
    """Null space of X in h -> (1 - P) ad(X) restricted to the plane."""
    proj = np.eye(6) - plane.projector
    cols = []
    for hvec in np.eye(2):
        ad = ad_matrix(np.concatenate([hvec, np.zeros(6)]))[2:, 2:]
        cols.append((proj @ ad @ plane.vectors.T).ravel())
    M = np.array(cols).T
    _, s, vh = np.linalg.svd(M)
    rank = int((s > 1e-9).sum())
    dim = 2 - rank
    if dim == 0:
        return 0, None
    gen = vh[-1]
    gen = gen / np.linalg.norm(gen)
    gen = gen * np.sign(gen[np.argmax(np.abs(gen))])
    return dim, gen


def _block_angles(r: np.ndarray, tol: float = 1e-9):
    """Angles (a1, a2) if r is a torus block rotation, else None."""
    a = np.array([np.arctan2(r[i + 3, i], r[i, i]) for i in range(3)])
    if np.abs(block_rotation(a) - r).max() > tol:
        return None
    if abs(np.angle(np.exp(1j * (a[0] + a[1] - a[2])))) > tol:
        return None
    return a[:2]


def _perm_det_table() -> list[float]:
    return [float(np.sign(np.linalg.det(extend_automorphism(perm_rep(s))[0]))) for s in D_GROUP]


_PERM_DET = None


def _order(r: np.ndarray, limit: int = 48) -> int:
    acc = r.copy()
    for n in range(1, limit + 1):
        if np.abs(acc - np.eye(6)).max() < 1e-8:
            return n
        acc = acc @ r
    return 0


def _label(cont_dim: int, mats: list) -> str:
    if cont_dim == 2:
        return "torus"
    if cont_dim == 1:
        return "torus-line"
    n = len(mats)
    if n == 1:
        return "trivial"
    orders = sorted(_order(m) for m in mats)
    if orders[-1] == n:
        return f"[Z{n}]"
    profile = {k: orders.count(k) for k in set(orders)}
    if n == 24 and profile == {1: 1, 2: 9, 3: 8, 4: 6}:
        return "[D]"
    if n == 6 and profile == {1: 1, 2: 3, 3: 2}:
        return "[S3]"
    return f"[order {n}]"


def stabilizer(plane: LagPlane, tol: float = 1e-9) -> OrbitTypeReport:
    global _PERM_DET
    if _PERM_DET is None:
        _PERM_DET = _perm_det_table()
    _require_lagrangian(plane)
    dim, gen = _h_stabilizer(plane)
    S = plane.s_matrix()
    reps = []   # (matrix, inner?, sigma, a)
    line_normal = None
    for idx, sigma in enumerate(D_GROUP):
        sol = torus_solutions(_sigma_s(sigma, S), S, tol)
        if sol is None:
            continue
        if np.allclose(sigma, np.eye(3)) and sol.rank != 2 - dim:
            raise RuntimeError("torus fixed-point rank disagrees with the h-stabilizer rank")
        if sol.rank == 1 and np.allclose(sigma, np.eye(3)):
            line_normal = sol.normal
        for a in sol.points:
            r = block_rotation((a[0], a[1], a[0] + a[1])) @ perm_rep(sigma)
            reps.append((r, _PERM_DET[idx] > 0, sigma, a))
    defect = max(float(np.abs(plane.projector @ r @ plane.vectors.T - r @ plane.vectors.T).max()) for r, *_ in reps)
    if dim == 0:
        uniq: dict[tuple, tuple] = {}
        for item in reps:
            uniq.setdefault(tuple(np.round(item[0], 7).ravel() + 0.0), item)
        items = list(uniq.values())
    else:
        items = []
        for item in reps:
            dup = False
            for kept in items:
                b = _block_angles(kept[0].T @ item[0])
                if b is not None and (line_normal is None or abs(np.angle(np.exp(1j * (line_normal @ b)))) < 1e-7):
                    dup = True
                    break
            if not dup:
                items.append(item)
    mats = [it[0] for it in items]
    return OrbitTypeReport(
        continuous_dim=dim,
        generator=gen,
        discrete_order=len(items),
        inner_order=sum(1 for it in items if it[1]),
        label=_label(dim, mats),
        elements=[_element_of(it[2], it[3]) for it in items],
        max_fix_defect=defect,
    )


def slice_jacobian_rank(theta: float, beta: float, phi: float, h: float = 1e-6) -> int:
    """Rank of d(theta, beta, phi) -> plane, measured on the quotient by the torus orbit."""
    def proj(t):
        return plane_from_angles(*t).projector.ravel()

    x = np.array([theta, beta, phi])
    cols = [(proj(x + h * e) - proj(x - h * e)) / (2 * h) for e in np.eye(3)]
    base = plane_from_angles(*x)
    for hvec in np.eye(2):
        ad = ad_matrix(np.concatenate([hvec, np.zeros(6)]))[2:, 2:]
        cols.append((ad @ base.projector - base.projector @ ad).ravel())
    full = np.linalg.matrix_rank(np.array(cols).T, tol=1e-6)
    torus = np.linalg.matrix_rank(np.array(cols[3:]).T, tol=1e-6)
    return int(full - torus)


REFERENCE_PLANES = {
    "f12r3": lambda: LagPlane(np.eye(6)[:3]),
    "s3": lambda: LagPlane.from_span([[1, 1, 0, 0, 0, 0], [0, 0, 0, -1, 1, 0], [0, 0, 0, 0, 0, 1]]),
    "rp3": lambda: LagPlane.from_span([
        [1 / np.sqrt(2), 1 / np.sqrt(2), 0, 0, 0, 0],
        [1 / np.sqrt(6), -1 / np.sqrt(6), 0, 0, 0, np.sqrt(2 / 3)],
        [0, 0, 1 / SQRT3, -1 / SQRT3, 1 / SQRT3, 0],
    ]),
}
