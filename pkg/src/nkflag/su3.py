"""Arithmetic in su(3) over the fixed basis (h1, h2, m1, ..., m6).

Coordinates of a traceless anti-Hermitian matrix X are recovered with
coeff_b(X) = -1/2 tr(b X), which works because the basis is orthonormal
for -1/12 of the Killing form and B(X, Y) = 6 tr(XY).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT3 = np.sqrt(3.0)
TOL = 1e-12

NAMES = ("h1", "h2", "m1", "m2", "m3", "m4", "m5", "m6")
H_IDX = (0, 1)
M_IDX = (2, 3, 4, 5, 6, 7)
# the three 2-dim isotropy modules, as positions in the 8-vector
MODULES = ((2, 5), (3, 6), (4, 7))


def _basis_matrices() -> np.ndarray:
    i = 1j
    s = SQRT3
    mats = [
        [[-i, 0, 0], [0, 0, 0], [0, 0, i]],
        [[i / s, 0, 0], [0, -2 * i / s, 0], [0, 0, i / s]],
        [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, -1], [0, 0, 0], [1, 0, 0]],
        [[0, i, 0], [i, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, i], [0, i, 0]],
        [[0, 0, i], [0, 0, 0], [i, 0, 0]],
    ]
    return np.array(mats, dtype=complex)


BASIS = _basis_matrices()
BASIS.setflags(write=False)


def coords_of(mat: np.ndarray) -> np.ndarray:
    """Basis coordinates of a (stack of) 3x3 matrices, no validity check."""
    return -0.5 * np.einsum("bij,...ji->...b", BASIS, mat).real


def matrix_of(coeffs: np.ndarray) -> np.ndarray:
    return np.einsum("...b,bij->...ij", np.asarray(coeffs, dtype=float), BASIS)


def _structure_constants() -> np.ndarray:
    c = np.zeros((8, 8, 8))
    for a in range(8):
        for b in range(8):
            comm = BASIS[a] @ BASIS[b] - BASIS[b] @ BASIS[a]
            c[a, b] = coords_of(comm)
    # values are small rationals times 1 or sqrt(3); strip round-off
    c[np.abs(c) < 1e-15] = 0.0
    for val in (1.0, 2.0, SQRT3):
        close = np.abs(np.abs(c) - val) < 1e-14
        c[close] = np.sign(c[close]) * val
    return c


# STRUCTURE[a, b, k]: [e_a, e_b] = sum_k STRUCTURE[a, b, k] e_k
STRUCTURE = _structure_constants()
STRUCTURE.setflags(write=False)

# Exterior derivatives of the dual basis as pair -> coefficient, indices into
# the 8-vector.  Used to cross-check STRUCTURE: d(e^k)(e_a, e_b) = -C[a, b, k].
DUAL_DIFFERENTIALS: dict[int, dict[tuple[int, int], float]] = {
    0: {(2, 5): -1.0, (3, 6): -1.0, (4, 7): -2.0},
    1: {(2, 5): SQRT3, (3, 6): -SQRT3},
    2: {(0, 5): 1.0, (1, 5): -SQRT3, (3, 4): 1.0, (6, 7): 1.0},
    3: {(0, 6): 1.0, (1, 6): SQRT3, (2, 4): -1.0, (5, 7): -1.0},
    4: {(0, 7): 2.0, (2, 3): 1.0, (5, 6): -1.0},
    5: {(0, 2): -1.0, (1, 2): SQRT3, (3, 7): 1.0, (4, 6): 1.0},
    6: {(0, 3): -1.0, (1, 3): -SQRT3, (2, 7): -1.0, (4, 5): -1.0},
    7: {(0, 4): -2.0, (2, 6): 1.0, (3, 5): -1.0},
}


def table_mismatch() -> float:
    """Largest disagreement between STRUCTURE and DUAL_DIFFERENTIALS."""
    worst = 0.0
    for k, terms in DUAL_DIFFERENTIALS.items():
        for a in range(8):
            for b in range(a + 1, 8):
                want = terms.get((a, b), 0.0)
                worst = max(worst, abs(-STRUCTURE[a, b, k] - want))
    return worst


if table_mismatch() > 1e-14:  # pragma: no cover - guards the hard-coded table
    raise RuntimeError("structure constants disagree with the dual-basis table")


class AdDecompositionError(ValueError):
    """g X g^-1 did not land back in su(3)."""


@dataclass(frozen=True)
class AlgVec:
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(8))

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float).reshape(8)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def basis(cls, name: str) -> "AlgVec":
        v = np.zeros(8)
        v[NAMES.index(name)] = 1.0
        return cls(v)

    @classmethod
    def from_matrix(cls, mat: np.ndarray, tol: float = TOL) -> "AlgVec":
        mat = np.asarray(mat, dtype=complex)
        scale = max(1.0, float(np.abs(mat).max()))
        if abs(np.trace(mat)) > tol * scale or np.abs(mat + mat.conj().T).max() > tol * scale:
            raise ValueError("matrix is not traceless anti-Hermitian")
        return cls(coords_of(mat))

    @classmethod
    def from_m(cls, m6: np.ndarray) -> "AlgVec":
        v = np.zeros(8)
        v[2:] = m6
        return cls(v)

    def to_matrix(self) -> np.ndarray:
        return matrix_of(self.coeffs)

    @property
    def h(self) -> np.ndarray:
        return self.coeffs[:2]

    @property
    def m(self) -> np.ndarray:
        return self.coeffs[2:]

    def __add__(self, other: "AlgVec") -> "AlgVec":
        return AlgVec(self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgVec") -> "AlgVec":
        return AlgVec(self.coeffs - other.coeffs)

    def __neg__(self) -> "AlgVec":
        return AlgVec(-self.coeffs)

    def __mul__(self, s: float) -> "AlgVec":
        return AlgVec(s * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "AlgVec":
        return AlgVec(self.coeffs / s)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: "AlgVec", tol: float = 1e-12) -> bool:
        return bool(np.abs(self.coeffs - other.coeffs).max() <= tol)

    def __repr__(self):
        terms = [f"{c:+.6g}*{n}" for c, n in zip(self.coeffs, NAMES) if abs(c) > 1e-15]
        return "AlgVec(" + (" ".join(terms) if terms else "0") + ")"


H1, H2, M1, M2, M3, M4, M5, M6 = (AlgVec.basis(n) for n in NAMES)


def _arr(x) -> np.ndarray:
    return x.coeffs if isinstance(x, AlgVec) else np.asarray(x, dtype=float)


def bracket_arr(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bracket on raw coordinate arrays, broadcasting over leading axes."""
    return np.einsum("...a,...b,abk->...k", x, y, STRUCTURE)


def bracket(x: AlgVec, y: AlgVec) -> AlgVec:
    return AlgVec(bracket_arr(_arr(x), _arr(y)))


def ad_matrix(x) -> np.ndarray:
    """8x8 matrix of ad(x) acting on coordinate columns."""
    return np.einsum("a,abk->kb", _arr(x), STRUCTURE)


def killing(x: AlgVec, y: AlgVec) -> float:
    return float(6.0 * np.trace(x.to_matrix() @ y.to_matrix()).real)


def killing_adtrace(x: AlgVec, y: AlgVec) -> float:
    """tr(ad x ad y); kept as an independent check on killing()."""
    return float(np.trace(ad_matrix(x) @ ad_matrix(y)))


def proj_h(x: AlgVec) -> AlgVec:
    v = np.zeros(8)
    v[:2] = x.coeffs[:2]
    return AlgVec(v)


def proj_m(x: AlgVec) -> AlgVec:
    v = x.coeffs.copy()
    v[:2] = 0.0
    return AlgVec(v)


@dataclass(frozen=True)
class GroupElt:
    entries: np.ndarray

    def __post_init__(self):
        u = np.array(self.entries, dtype=complex).reshape(3, 3)
        if np.abs(u @ u.conj().T - np.eye(3)).max() > TOL:
            raise ValueError("matrix is not unitary")
        if abs(np.linalg.det(u) - 1.0) > TOL:
            raise ValueError("determinant is not 1")
        u.setflags(write=False)
        object.__setattr__(self, "entries", u)

    @classmethod
    def identity(cls) -> "GroupElt":
        return cls(np.eye(3))

    def inv(self) -> "GroupElt":
        return GroupElt(self.entries.conj().T)

    def __matmul__(self, other: "GroupElt") -> "GroupElt":
        return GroupElt(self.entries @ other.entries)


def project_su3(u: np.ndarray) -> np.ndarray:
    """Nearest special unitary matrix (polar factor, determinant fixed)."""
    w, _, vh = np.linalg.svd(u)
    q = w @ vh
    det = np.linalg.det(q)
    return q / det ** (1.0 / 3.0)


def expm_matrix(mat: np.ndarray) -> np.ndarray:
    """exp of a traceless anti-Hermitian matrix via eigh of the Hermitian i*X."""
    herm = 1j * mat
    herm = 0.5 * (herm + herm.conj().T)
    w, v = np.linalg.eigh(herm)
    return (v * np.exp(-1j * w)) @ v.conj().T


def expm(x: AlgVec) -> GroupElt:
    return GroupElt(project_su3(expm_matrix(x.to_matrix())))


def Ad(g: GroupElt, x: AlgVec, tol: float = TOL) -> AlgVec:
    u = g.entries
    out = u @ x.to_matrix() @ u.conj().T
    scale = max(1.0, x.norm())
    if abs(np.trace(out)) > tol * scale or np.abs(out + out.conj().T).max() > tol * scale:
        raise AdDecompositionError("conjugate left su(3)")
    return AlgVec(coords_of(out))


def Ad_matrix(g: GroupElt | np.ndarray) -> np.ndarray:
    """8x8 matrix of Ad(g); columns are images of the basis vectors."""
    u = g.entries if isinstance(g, GroupElt) else np.asarray(g, dtype=complex)
    imgs = u[None] @ BASIS @ u.conj().T[None]
    return coords_of(imgs).T


@dataclass(frozen=True)
class MetricTensor:
    """Block-scalar metric on m: c_i on the module m_i + m_{i+3}."""
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3) <= 0:
            raise ValueError("block scalars must be positive")

    def matrix(self) -> np.ndarray:
        d = [self.c1, self.c2, self.c3] * 2
        return np.diag(d)

    def inner(self, x: AlgVec, y: AlgVec) -> float:
        return float(x.m @ self.matrix() @ y.m)


NEARLY_KAHLER_METRIC = MetricTensor(1.0, 1.0, 1.0)
KAHLER_EINSTEIN_METRIC = MetricTensor(1.0, 1.0, 2.0)


@dataclass
class ReductiveReport:
    violations: list[str]
    max_leak: float

    @property
    def ok(self) -> bool:
        return not self.violations


def _span_leak(vec: np.ndarray, allowed: tuple[int, ...]) -> float:
    mask = np.ones(8, dtype=bool)
    mask[list(allowed)] = False
    return float(np.abs(vec[mask]).max(initial=0.0))


def reductive_checks(tol: float = 1e-13) -> ReductiveReport:
    """Bracket relations of the decomposition h + m1 + m2 + m3, over basis pairs."""
    E = np.eye(8)
    mods = [list(m) for m in MODULES]
    rules = []
    for i, mi in enumerate(mods):
        for a in H_IDX:
            for b in mi:
                rules.append((f"[h,m{i+1}]", a, b, tuple(mi)))
        for a in mi:
            for b in mi:
                rules.append((f"[m{i+1},m{i+1}]", a, b, H_IDX))
        for j, mj in enumerate(mods):
            if j <= i:
                continue
            k = 3 - i - j
            for a in mi:
                for b in mj:
                    rules.append((f"[m{i+1},m{j+1}]", a, b, tuple(mods[k])))
    cp2 = mods[0] + mods[1]
    for a in cp2:
        for b in cp2:
            rules.append(("[p,p] in k", a, b, H_IDX + tuple(mods[2])))
    violations = []
    worst = 0.0
    for label, a, b, allowed in rules:
        leak = _span_leak(bracket_arr(E[a], E[b]), allowed)
        worst = max(worst, leak)
        if leak > tol:
            violations.append(f"{label}: [{NAMES[a]},{NAMES[b]}] leaks {leak:.3e}")
    return ReductiveReport(violations, worst)
