"""Nearly Kahler structure on m: J, torsion, curvature, and the isotropy action of D.U(1)^2."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .forms import AltForm, evaluate, form_from_tensor, omega_k, omega_nk
from .su3 import SQRT3, AlgVec, MetricTensor, bracket, proj_h, proj_m

TOL = 1e-12


class NotInM(ValueError):
    pass


def _j_matrix(signs: tuple[float, float, float]) -> np.ndarray:
    # g(Jx, y) = omega(x, y) with omega = sum_i s_i m^i ^ m^{i+3}
    j = np.zeros((6, 6))
    for i, s in enumerate(signs):
        j[i + 3, i] = s
        j[i, i + 3] = -s
    return j


@dataclass(frozen=True)
class AlmostComplex:
    matrix: np.ndarray
    omega: AltForm = field(compare=False)
    metric: MetricTensor = field(default_factory=MetricTensor, compare=False)

    @classmethod
    def nearly_kahler(cls) -> "AlmostComplex":
        return cls(_j_matrix((1.0, 1.0, -1.0)), omega_nk())

    @classmethod
    def kahler(cls) -> "AlmostComplex":
        return cls(_j_matrix((1.0, 1.0, 1.0)), omega_k())

    def __call__(self, x):
        if isinstance(x, AlgVec):
            _require_m(x)
            return AlgVec.from_m(self.matrix @ x.m)
        return self.matrix @ np.asarray(x, dtype=float)

    def defects(self) -> dict[str, float]:
        """J^2 = -1, g(Jx, Jy) = g(x, y) and g(Jx, y) = omega(x, y) on basis pairs."""
        j = self.matrix
        g = self.metric.matrix()
        om = self.omega.tensor() if self.omega.space == "m" else self.omega.to_m().tensor()
        return {
            "square": float(np.abs(j @ j + np.eye(6)).max()),
            "orthogonal": float(np.abs(j.T @ g @ j - g).max()),
            "compatible": float(np.abs(j.T @ g - om).max()),
        }


J_NK = AlmostComplex.nearly_kahler()
J_K = AlmostComplex.kahler()


def _require_m(*xs: AlgVec):
    for x in xs:
        if np.abs(x.h).max() > TOL:
            raise NotInM(f"{x!r} has an h-component")


def torsion(x: AlgVec, y: AlgVec) -> AlgVec:
    _require_m(x, y)
    return -proj_m(bracket(x, y))


def curvature(x: AlgVec, y: AlgVec) -> AlgVec:
    """Curvature endomorphism R(x, y), returned as the element -[x, y]_h acting by ad."""
    _require_m(x, y)
    return -proj_h(bracket(x, y))


def curvature_apply(x: AlgVec, y: AlgVec, z: AlgVec) -> AlgVec:
    return bracket(curvature(x, y), z)


def nabla_g_J(x: AlgVec, y: AlgVec, j: AlmostComplex = J_NK) -> AlgVec:
    """(nabla^g_x J) y via the difference nabla^g = nabla - T/2 and nabla J = 0."""
    _require_m(x, y)
    return -0.5 * torsion(x, j(y)) + 0.5 * j(torsion(x, y))


def _m_basis() -> list[AlgVec]:
    return [AlgVec.from_m(e) for e in np.eye(6)]


def torsion_form() -> AltForm:
    """The 3-form g(T(x, y), z) on m."""
    b = _m_basis()
    t = np.array([[[torsion(x, y).m @ z.m for z in b] for y in b] for x in b])
    return form_from_tensor(t, "m", tol=1e-15)


def torsion_j_tensor(j: AlmostComplex = J_NK) -> np.ndarray:
    """T^J(x, y, z) = g([x, y]_m, J z) as a dense 6x6x6 array."""
    b = _m_basis()
    return np.array([[[proj_m(bracket(x, y)).m @ j(z).m for z in b] for y in b] for x in b])


def torsion_j_form(j: AlmostComplex = J_NK) -> AltForm:
    return form_from_tensor(torsion_j_tensor(j), "m", tol=1e-15)


def kahler_einstein_form() -> AltForm:
    """g_K(J_K x, y) for g_K = (1, 1, 2); this is the closed Kahler form."""
    g = MetricTensor(1.0, 1.0, 2.0).matrix()
    return form_from_tensor(J_K.matrix.T @ g, "m")


# ---------------------------------------------------------------- isotropy

def torus_block_angles(x: float, y: float) -> tuple[float, float, float]:
    return (x - 3 * y, x + 3 * y, 2 * x)


def torus_from_block(a1: float, a2: float) -> tuple[float, float]:
    """(x, y) with block angles (a1, a2, a1 + a2)."""
    return (0.5 * (a1 + a2), (a2 - a1) / 6.0)


def block_rotation(a: tuple[float, float, float]) -> np.ndarray:
    r = np.zeros((6, 6))
    for i, ang in enumerate(a):
        c, s = np.cos(ang), np.sin(ang)
        r[i, i] = r[i + 3, i + 3] = c
        r[i, i + 3] = -s
        r[i + 3, i] = s
    return r


def torus_rep(x: float, y: float) -> np.ndarray:
    return block_rotation(torus_block_angles(x, y))


def torus_matrix(x: float, y: float) -> np.ndarray:
    """A_{x,y} in SU(3); equals exp(x h1 + sqrt(3) y h2)."""
    return np.diag([np.exp(1j * (y - x)), np.exp(-2j * y), np.exp(1j * (x + y))])


def perm_rep(sigma: np.ndarray) -> np.ndarray:
    """rho(sigma) = sigma - J sigma J with sigma acting on span(m1, m2, m3)."""
    s6 = np.zeros((6, 6))
    s6[:3, :3] = sigma
    j = J_NK.matrix
    return s6 - j @ s6 @ j


def signed_permutations() -> list[np.ndarray]:
    """The 24 signed permutation matrices of determinant 1, in a fixed order."""
    out = []
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            s = np.zeros((3, 3))
            for i in range(3):
                s[i, perm[i]] = signs[i]
            if np.linalg.det(s) > 0:
                out.append(s)
    return out


D_GROUP = signed_permutations()


@dataclass(frozen=True)
class IsotropyElement:
    """Word in torus elements ("torus", (x, y)) and signed permutations ("perm", sigma).

    The word acts as the product of its letters, leftmost applied last.
    """
    word: tuple = ()

    @classmethod
    def identity(cls) -> "IsotropyElement":
        return cls(())

    @classmethod
    def torus(cls, x: float, y: float) -> "IsotropyElement":
        return cls((("torus", (float(x), float(y))),))

    @classmethod
    def torus_blocks(cls, a1: float, a2: float) -> "IsotropyElement":
        return cls.torus(*torus_from_block(a1, a2))

    @classmethod
    def perm(cls, sigma) -> "IsotropyElement":
        s = np.array(sigma, dtype=float)
        if not _is_signed_perm(s) or np.linalg.det(s) < 0:
            raise ValueError("not a signed permutation of determinant 1")
        return cls((("perm", tuple(map(tuple, s))),))

    def __mul__(self, other: "IsotropyElement") -> "IsotropyElement":
        word = list(self.word)
        for letter in other.word:
            if word and word[-1][0] == letter[0] == "torus":
                (x1, y1), (x2, y2) = word[-1][1], letter[1]
                word[-1] = ("torus", (x1 + x2, y1 + y2))
            elif word and word[-1][0] == letter[0] == "perm":
                prod_ = np.array(word[-1][1]) @ np.array(letter[1])
                word[-1] = ("perm", tuple(map(tuple, prod_)))
            else:
                word.append(letter)
        return IsotropyElement(tuple(word))

    def inverse(self) -> "IsotropyElement":
        word = []
        for kind, val in reversed(self.word):
            if kind == "torus":
                word.append(("torus", (-val[0], -val[1])))
            else:
                word.append(("perm", tuple(map(tuple, np.array(val).T))))
        return IsotropyElement(tuple(word))


def _is_signed_perm(s: np.ndarray) -> bool:
    return s.shape == (3, 3) and np.all(np.isin(s, (-1, 0, 1))) and np.all(np.abs(s).sum(0) == 1) and np.all(np.abs(s).sum(1) == 1)


def iso_rep(e: IsotropyElement) -> np.ndarray:
    out = np.eye(6)
    for kind, val in e.word:
        letter = torus_rep(*val) if kind == "torus" else perm_rep(np.array(val))
        out = out @ letter
    return out


def symmetry_action(e: IsotropyElement, plane):
    from .frames import LagPlane

    r = iso_rep(e)
    return LagPlane(plane.vectors @ r.T)


def extend_automorphism(r6: np.ndarray) -> tuple[np.ndarray, float]:
    """Extend an orthogonal map of m to a map of su(3) acting linearly on h.

    The h-block is fitted from [r x, r y]_h = phi([x, y]_h) over basis pairs of m;
    the returned error is the largest bracket defect of the extension.
    """
    from .su3 import STRUCTURE, bracket_arr

    rows, rhs = [], []
    for i in range(6):
        for j in range(6):
            bxy = STRUCTURE[2 + i, 2 + j]
            rx = np.concatenate([np.zeros(2), r6[:, i]])
            ry = np.concatenate([np.zeros(2), r6[:, j]])
            target = bracket_arr(rx, ry)[:2]
            for r in range(2):
                row = np.zeros(4)
                row[2 * r:2 * r + 2] = bxy[:2]
                rows.append(row)
                rhs.append(target[r])
    sol = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
    full = np.zeros((8, 8))
    full[:2, :2] = sol.reshape(2, 2)
    full[2:, 2:] = r6
    E = np.eye(8)
    err = max(float(np.abs(full @ bracket_arr(E[a], E[b]) - bracket_arr(full[:, a], full[:, b])).max())
              for a in range(8) for b in range(8))
    return full, err


def three_symmetry() -> np.ndarray:
    """8x8 matrix of Ad(exp(2 pi/3 h1))."""
    from .su3 import H1, Ad_matrix, expm

    return Ad_matrix(expm(H1 * (2 * np.pi / 3)))


def form_defect_under(r: np.ndarray, form: AltForm) -> float:
    """max |form(r x, r y, ...) - form(x, y, ...)| over basis tuples."""
    t = form.tensor()
    pulled = t
    for axis in range(t.ndim):
        pulled = np.moveaxis(np.tensordot(r.T, np.moveaxis(pulled, axis, 0), axes=(1, 0)), 0, axis)
    return float(np.abs(pulled - t).max())


__all__ = [
    "AlmostComplex", "J_NK", "J_K", "NotInM", "torsion", "curvature", "curvature_apply",
    "nabla_g_J", "torsion_form", "torsion_j_tensor", "torsion_j_form", "kahler_einstein_form",
    "torus_rep", "torus_matrix", "perm_rep", "D_GROUP", "IsotropyElement", "iso_rep",
    "symmetry_action", "three_symmetry", "extend_automorphism", "form_defect_under", "block_rotation",
    "torus_block_angles", "torus_from_block", "evaluate",
]
