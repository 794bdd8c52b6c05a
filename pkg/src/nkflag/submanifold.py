"""Framed Lagrangians and their second fundamental forms for the canonical connection.

A frame assigns to each tangent direction e_i an element omega(e_i) of su(3);
its m-part lies in a Lagrangian plane and its h-part is l[0, i] h1 + l[1, i] h2.
The covariant derivative is d_{e_i} omega_m(e_j) + [omega_h(e_i), omega_m(e_j)].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .forms import ce_differential, dual, evaluate
from .frames import LagPlane, frame_vectors, is_lagrangian
from .nk import J_NK
from .su3 import SQRT3, AlgVec, bracket_arr


class BoundaryPoint(ValueError):
    pass


def _h_part(l_col: np.ndarray) -> np.ndarray:
    v = np.zeros(8)
    v[:2] = l_col
    return v


def _m8(m6: np.ndarray) -> np.ndarray:
    v = np.zeros(8)
    v[2:] = m6
    return v


def _ad_h(l_col: np.ndarray, m6: np.ndarray) -> np.ndarray:
    return bracket_arr(_h_part(l_col), _m8(m6))[2:]


@dataclass(frozen=True)
class FramedLagrangian:
    """Constant frame: rows of `frame` are omega_m(e_i) and l[a, i] the h-coefficients."""
    frame: np.ndarray
    l: np.ndarray = field(default_factory=lambda: np.zeros((2, 3)))

    def __post_init__(self):
        f = np.array(self.frame, dtype=float).reshape(3, 6)
        l = np.array(self.l, dtype=float).reshape(2, 3)
        if not is_lagrangian(LagPlane(f), 1e-9):
            raise ValueError("frame m-parts are not Lagrangian")
        object.__setattr__(self, "frame", f)
        object.__setattr__(self, "l", l)

    @classmethod
    def from_angles(cls, theta: float, beta: float, phi: float, l=None, alpha: float | None = None):
        return cls(frame_vectors(theta, beta, phi, alpha), np.zeros((2, 3)) if l is None else l)

    @property
    def plane(self) -> LagPlane:
        return LagPlane(self.frame)

    def generators(self) -> np.ndarray:
        """3x8 array of omega(e_i) in su(3) coordinates."""
        g = np.zeros((3, 8))
        g[:, :2] = self.l.T
        g[:, 2:] = self.frame
        return g


@dataclass(frozen=True)
class LagrangianPatch:
    """Angle and l fields sampled on a uniform grid, with e_k identified with d/du_k."""
    axes: tuple
    theta: np.ndarray
    beta: np.ndarray
    phi: np.ndarray
    l: np.ndarray          # shape (2, 3, *grid)
    alpha: np.ndarray | None = None

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if len(axes) != 3:
            raise ValueError("a Lagrangian patch has three parameters")
        for a in axes:
            if a.size < 2 or np.any(np.diff(a) <= 0) or np.ptp(np.diff(a)) > 1e-12 * max(1.0, abs(a).max()):
                raise ValueError("grid axes must be uniform and increasing")
        object.__setattr__(self, "axes", axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.axes])

    def frame_at(self, idx) -> np.ndarray:
        idx = tuple(idx)
        alpha = None if self.alpha is None else self.alpha[idx]
        return frame_vectors(self.theta[idx], self.beta[idx], self.phi[idx], alpha)

    def l_at(self, idx) -> np.ndarray:
        return self.l[(slice(None), slice(None)) + tuple(idx)]

    def angle_derivatives(self, idx, richardson: bool = False) -> np.ndarray:
        """Rows k: (e_k(theta), e_k(beta), e_k(phi)) by central differences."""
        out = np.zeros((3, 3))
        for n, f in enumerate((self.theta, self.beta, self.phi)):
            for k in range(3):
                out[k, n] = _central(lambda j: f[j], idx, k, self.shape, self.spacing[k], richardson)
        return out

    @classmethod
    def from_functions(cls, axes, theta, beta, phi, l=None, alpha=None) -> "LagrangianPatch":
        grids = np.meshgrid(*axes, indexing="ij")
        shape = grids[0].shape
        lv = np.zeros((2, 3) + shape) if l is None else np.asarray(l(*grids), dtype=float)
        al = None if alpha is None else np.broadcast_to(alpha(*grids), shape).copy()
        return cls(tuple(axes), np.broadcast_to(theta(*grids), shape).copy(),
                   np.broadcast_to(beta(*grids), shape).copy(), np.broadcast_to(phi(*grids), shape).copy(), lv, al)


def _central(get, idx, axis: int, shape, step: float, richardson: bool):
    idx = list(idx)
    reach = 2 if richardson else 1
    if idx[axis] - reach < 0 or idx[axis] + reach >= shape[axis]:
        raise BoundaryPoint(f"index {tuple(idx)} is within {reach} of the boundary along axis {axis}")

    def shifted(n):
        j = list(idx)
        j[axis] += n
        return get(tuple(j))

    d1 = (shifted(1) - shifted(-1)) / (2 * step)
    if not richardson:
        return d1
    d2 = (shifted(2) - shifted(-2)) / (4 * step)
    return (4 * d1 - d2) / 3


def canonical_derivative(F, i: int, j: int, idx=None, richardson: bool = False) -> AlgVec:
    """nabla_{e_i} e_j in the moving frame, as an element of m."""
    if isinstance(F, FramedLagrangian):
        return AlgVec.from_m(_ad_h(F.l[:, i], F.frame[j]))
    if idx is None:
        raise ValueError("a grid index is required for a patch")
    d = _central(lambda p: F.frame_at(p)[j], idx, i, F.shape, F.spacing[i], richardson)
    return AlgVec.from_m(d + _ad_h(F.l_at(idx)[:, i], F.frame_at(idx)[j]))


@dataclass(frozen=True)
class SecondFundamentalForm:
    """Components h[i, j, k] = g(nabla_{e_i} e_j, J e_k), zero-based indices."""
    h: np.ndarray

    def symmetry_defect(self) -> float:
        return max(float(np.abs(self.h - self.h.transpose(p)).max()) for p in permutations(range(3)))

    def traces(self) -> np.ndarray:
        """sum_i h[i, i, k] for each k."""
        return np.einsum("iik->k", self.h)

    def norm(self) -> float:
        return float(np.sqrt((self.h ** 2).sum()))

    def nonzero(self, tol: float = 1e-10) -> dict[tuple[int, int, int], float]:
        return {tuple(int(t) for t in k): float(self.h[tuple(k)]) for k in np.argwhere(np.abs(self.h) > tol)}


def sff_generic(F, idx=None, richardson: bool = False) -> SecondFundamentalForm:
    if isinstance(F, FramedLagrangian):
        frame = F.frame
    else:
        frame = F.frame_at(idx)
    jf = frame @ J_NK.matrix.T
    h = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            h[i, j] = jf @ canonical_derivative(F, i, j, idx, richardson).m
    return SecondFundamentalForm(h)


# closed-form component entries, keyed by zero-based (i, j, k) of h[i, j, k]
def closed_form_entries(theta: float, beta: float, phi: float, l, dangles=None,
                        flipped_sign: bool = False) -> dict[tuple[int, int, int], float]:
    """Component formulas of the second fundamental form in the normal-form frame.

    dangles[k] = (e_k(theta), e_k(beta), e_k(phi)).  With flipped_sign=True the
    h[2, 2, 1] entry takes the alternative sign +e_3(beta); the default uses the
    sign that agrees with the covariant derivative.
    """
    l = np.asarray(l, dtype=float).reshape(2, 3)
    d = np.zeros((3, 3)) if dangles is None else np.asarray(dangles, dtype=float)
    eth, ebe, eph = d[:, 0], d[:, 1], d[:, 2]
    l1, l2 = l
    s, c = np.sin, np.cos
    q = s(phi) ** 2 - c(phi) ** 2
    sc = s(phi) * c(phi)
    out = {}
    for k in range(3):
        out[(k, 0, 0)] = eth[k] + l1[k] + SQRT3 * l2[k] * q
        out[(k, 1, 1)] = -eth[k] * c(beta) ** 2 + l1[k] * (s(beta) ** 2 - 2 * c(beta) ** 2) - SQRT3 * l2[k] * s(beta) ** 2 * q
        out[(k, 2, 2)] = -eth[k] * s(beta) ** 2 + l1[k] * (c(beta) ** 2 - 2 * s(beta) ** 2) - SQRT3 * l2[k] * c(beta) ** 2 * q
    out[(0, 0, 1)] = eph[0] * c(theta) * s(beta) - 2 * SQRT3 * l2[0] * s(theta) * s(beta) * sc
    out[(0, 0, 2)] = eph[0] * s(theta) * c(beta) + 2 * SQRT3 * l2[0] * c(theta) * c(beta) * sc
    out[(1, 1, 0)] = eph[1] * s(beta) * c(theta) - 2 * SQRT3 * l2[1] * s(theta) * s(beta) * sc
    out[(2, 2, 0)] = eph[2] * c(beta) * s(theta) + 2 * SQRT3 * l2[2] * c(theta) * c(beta) * sc
    out[(1, 2, 0)] = eph[1] * c(beta) * s(theta) + 2 * SQRT3 * l2[1] * c(theta) * c(beta) * sc
    out[(2, 0, 1)] = eph[2] * c(theta) * s(beta) - 2 * SQRT3 * l2[2] * s(theta) * s(beta) * sc
    out[(0, 1, 2)] = -ebe[0]
    out[(1, 1, 2)] = -ebe[1]
    out[(2, 2, 1)] = ebe[2] if flipped_sign else -ebe[2]
    return {k: float(v) for k, v in out.items()}


@dataclass(frozen=True)
class ClosedFormResult:
    sff: SecondFundamentalForm
    entries: dict
    duplicate_spread: float       # disagreement among entries naming the same symmetric component
    constraints: dict | None = None


def sff_closed_form(theta: float, beta: float, phi: float, l, dangles=None, flipped_sign: bool = False,
                    l13_contraction: float | None = None) -> ClosedFormResult:
    """Tensor built from the component entries, filled by total symmetry.

    Each symmetric class takes the value of its first component entry.  On the
    beta = pi/2, theta = 0 branch the derived constraints are reported.
    """
    entries = closed_form_entries(theta, beta, phi, l, dangles, flipped_sign)
    h = np.zeros((3, 3, 3))
    seen: dict[tuple, list[float]] = {}
    for key, val in entries.items():
        seen.setdefault(tuple(sorted(key)), []).append(val)
    for cls_key, vals in seen.items():
        for p in set(permutations(cls_key)):
            h[p] = vals[0]
    spread = max((max(v) - min(v) for v in seen.values()), default=0.0)
    constraints = None
    if abs(np.cos(beta)) < 1e-12 and abs(np.sin(theta)) < 1e-12:
        l = np.asarray(l, dtype=float).reshape(2, 3)
        if l13_contraction is None:
            # contraction of the dh^1 identity with e1 ^ e2 once l11 = l12 = 0
            l_first = l.copy()
            l_first[0, :2] = 0.0
            fl = FramedLagrangian.from_angles(theta, beta, phi, l_first)
            l13_contraction = float(dh_defect(fl, 0)[0, 1])
        # with l13 already forced to zero, h[2, 1, 1] and h[1, 1, 2] must agree
        l_red = l.copy()
        l_red[0, 2] = 0.0
        red = closed_form_entries(theta, beta, phi, l_red, dangles, flipped_sign)
        constraints = {
            # h[0, 2, 2] = -2 l11 against h[2, 2, 0] = 0, and h[1, 2, 2] = -2 l12 against h[2, 2, 1]
            "l11": 0.5 * (entries[(2, 2, 0)] - entries[(0, 2, 2)]),
            "l12": 0.5 * (entries[(2, 2, 1)] - entries[(1, 2, 2)]),
            "l13": -l13_contraction,
            "l23*(sin^2 phi - cos^2 phi)": (red[(1, 1, 2)] - red[(2, 1, 1)]) / SQRT3,
        }
    return ClosedFormResult(SecondFundamentalForm(h), entries, float(spread), constraints)


def formula_agreement(generic: SecondFundamentalForm, closed: ClosedFormResult) -> float:
    """Largest difference between a computed tensor and the component entries, position by position."""
    return max(abs(generic.h[k] - v) for k, v in closed.entries.items())


def dh_defect(F: FramedLagrangian, a: int) -> np.ndarray:
    """D[i, j] = d h^a(omega e_i, omega e_j) - sum_k l[a, k] d e^k(e_i, e_j) for a constant frame.

    d e^k(e_i, e_j) = -g([omega e_i, omega e_j]_m, omega_m(e_k)); D vanishes
    when the frame integrates with constant l.
    """
    gens = F.generators()
    dha = ce_differential(dual(("h1", "h2")[a]))
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            br = bracket_arr(gens[i], gens[j])
            de = -F.frame @ br[2:]
            out[i, j] = evaluate(dha, [gens[i], gens[j]]) - F.l[a] @ de
    return out


def upsilon_pullback(F) -> float:
    """Re Upsilon on the frame (a constant frame or the m-parts of a patch point)."""
    from .forms import re_upsilon

    frame = F.frame if isinstance(F, FramedLagrangian) else np.asarray(F)
    return evaluate(re_upsilon(), list(frame))


# reference constant frames of the three homogeneous examples
RP3_CLOSING_L = np.array([[-np.sqrt(2), 0, 0], [0, np.sqrt(2), 0]])
# reproduces the reference sign pattern of the second fundamental form but does not close
RP3_PATTERN_L = np.array([[np.sqrt(2), 0, 0], [0, -np.sqrt(2), 0]])
# second closing root at the same angles: a standard su(2) orbit, not congruent to any reference example
SU2_SECOND_ROOT_L = np.array([[1 / np.sqrt(2), 0, 0], [0, -1 / np.sqrt(2), 0]])
RP3_ANGLES = (0.5 * np.pi, float(np.arctan2(-1 / SQRT3, np.sqrt(2 / 3))), 0.25 * np.pi)


def reference_frame(name: str, pattern_l: bool = False) -> FramedLagrangian:
    if name == "f12r3":
        return FramedLagrangian(np.eye(6)[:3])
    if name == "s3":
        r = 1 / np.sqrt(2)
        frame = np.array([[r, r, 0, 0, 0, 0], [0, 0, 0, -r, r, 0], [0, 0, 0, 0, 0, 1.0]])
        return FramedLagrangian(frame, np.array([[0, 0, 0], [0, 0, -SQRT3]]))
    if name == "rp3":
        return FramedLagrangian.from_angles(*RP3_ANGLES, l=RP3_PATTERN_L if pattern_l else RP3_CLOSING_L)
    raise KeyError(name)


__all__ = [
    "BoundaryPoint", "FramedLagrangian", "LagrangianPatch", "canonical_derivative", "SecondFundamentalForm",
    "sff_generic", "closed_form_entries", "ClosedFormResult", "sff_closed_form", "formula_agreement",
    "dh_defect", "upsilon_pullback", "reference_frame", "RP3_CLOSING_L", "RP3_PATTERN_L", "RP3_ANGLES",
    "SU2_SECOND_ROOT_L",
]
