"""Alternating forms on su(3) (space "g", indices 0..7) or on m (space "m", indices 0..5)."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .su3 import NAMES, STRUCTURE, AlgVec

DIMS = {"g": 8, "m": 6}


class SpaceMismatch(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation, 0 if an index repeats."""
    if len(set(idx)) < len(idx):
        return 0, ()
    arr = list(idx)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


@dataclass(frozen=True)
class AltForm:
    degree: int
    coeffs: dict = field(default_factory=dict)
    space: str = "g"

    def __post_init__(self):
        if self.space not in DIMS:
            raise ValueError(f"unknown space {self.space!r}")
        clean: dict[tuple[int, ...], float] = {}
        for key, val in self.coeffs.items():
            key = tuple(int(k) for k in key)
            if len(key) != self.degree:
                raise ArityMismatch(f"key {key} has wrong length for degree {self.degree}")
            if any(k < 0 or k >= DIMS[self.space] for k in key):
                raise IndexError(f"index out of range in {key}")
            sign, skey = _sort_sign(key)
            if sign == 0:
                continue
            clean[skey] = clean.get(skey, 0.0) + sign * float(val)
        clean = {k: v for k, v in clean.items() if v != 0.0}
        object.__setattr__(self, "coeffs", clean)

    @property
    def dim(self) -> int:
        return DIMS[self.space]

    def __add__(self, other: "AltForm") -> "AltForm":
        _check_same(self, other)
        if self.degree != other.degree:
            raise ValueError("degree mismatch in sum")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return AltForm(self.degree, out, self.space)

    def __neg__(self) -> "AltForm":
        return AltForm(self.degree, {k: -v for k, v in self.coeffs.items()}, self.space)

    def __sub__(self, other: "AltForm") -> "AltForm":
        return self + (-other)

    def __mul__(self, s: float) -> "AltForm":
        return AltForm(self.degree, {k: s * v for k, v in self.coeffs.items()}, self.space)

    __rmul__ = __mul__

    def max_abs_diff(self, other: "AltForm") -> float:
        _check_same(self, other)
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0)) for k in keys), default=0.0)

    def to_g(self) -> "AltForm":
        """Extend an m-form by zero on h."""
        if self.space == "g":
            return self
        return AltForm(self.degree, {tuple(i + 2 for i in k): v for k, v in self.coeffs.items()}, "g")

    def to_m(self, tol: float = 0.0) -> "AltForm":
        """Restrict a g-form to m; refuses if h-components exceed tol."""
        if self.space == "m":
            return self
        out = {}
        for k, v in self.coeffs.items():
            if min(k) < 2:
                if abs(v) > tol:
                    raise ValueError(f"form has an h-component at {k}")
                continue
            out[tuple(i - 2 for i in k)] = v
        return AltForm(self.degree, out, "m")

    def tensor(self) -> np.ndarray:
        """Dense fully antisymmetric array of shape (dim,)*degree."""
        from itertools import permutations

        t = np.zeros((self.dim,) * self.degree)
        for key, val in self.coeffs.items():
            for perm in permutations(range(self.degree)):
                sign, _ = _sort_sign(perm)
                t[tuple(key[p] for p in perm)] = sign * val
        return t

    def __repr__(self):
        off = 0 if self.space == "g" else 2
        parts = []
        for key in sorted(self.coeffs):
            name = "^".join(NAMES[i + off] for i in key)
            parts.append(f"{self.coeffs[key]:+.6g} {name}")
        return f"AltForm[{self.space},{self.degree}](" + (" ".join(parts) or "0") + ")"


def _check_same(a: AltForm, b: AltForm):
    if a.space != b.space:
        raise SpaceMismatch(f"{a.space}-form combined with {b.space}-form")


def wedge(a: AltForm, b: AltForm) -> AltForm:
    _check_same(a, b)
    out: dict[tuple[int, ...], float] = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            sign, key = _sort_sign(ka + kb)
            if sign:
                out[key] = out.get(key, 0.0) + sign * va * vb
    return AltForm(a.degree + b.degree, out, a.space)


def _as_array(v, space: str) -> np.ndarray:
    if isinstance(v, AlgVec):
        return v.coeffs if space == "g" else v.coeffs[2:]
    arr = np.asarray(v, dtype=float)
    if arr.shape != (DIMS[space],):
        raise ValueError(f"vector of shape {arr.shape} on space {space}")
    return arr


def evaluate(a: AltForm, vectors) -> float:
    vectors = list(vectors)
    if len(vectors) != a.degree:
        raise ArityMismatch(f"{a.degree}-form given {len(vectors)} vectors")
    if a.degree == 0:
        return a.coeffs.get((), 0.0)
    V = np.array([_as_array(v, a.space) for v in vectors])
    total = 0.0
    # exactly singular minors make LAPACK warn on the way to a correct zero
    with np.errstate(divide="ignore", invalid="ignore"):
        for key, val in a.coeffs.items():
            total += val * np.linalg.det(V[:, list(key)])
    return float(total)


def dual(name: str) -> AltForm:
    """The dual 1-form of a basis vector, e.g. dual("m3"), on g."""
    return AltForm(1, {(NAMES.index(name),): 1.0}, "g")


def mono(*names: str, coeff: float = 1.0, space: str = "m") -> AltForm:
    off = 0 if space == "g" else 2
    return AltForm(len(names), {tuple(NAMES.index(n) - off for n in names): coeff}, space)


def ce_differential(a: AltForm) -> AltForm:
    """Chevalley-Eilenberg differential; m-forms are first extended by zero."""
    a = a.to_g()
    k = a.degree
    E = np.eye(8)
    out = {}
    for tup in combinations(range(8), k + 1):
        total = 0.0
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = STRUCTURE[tup[i], tup[j]]
                if not br.any():
                    continue
                rest = [E[t] for n, t in enumerate(tup) if n not in (i, j)]
                total += (-1) ** (i + j) * evaluate(a, [br] + rest)
        if total != 0.0:
            out[tup] = total
    return AltForm(k + 1, out, "g")


def omega_nk() -> AltForm:
    return mono("m1", "m4") + mono("m2", "m5") - mono("m3", "m6")


def omega_k() -> AltForm:
    return mono("m1", "m4") + mono("m2", "m5") + mono("m3", "m6")


def re_upsilon() -> AltForm:
    return mono("m4", "m5", "m6") - mono("m1", "m2", "m6") - mono("m1", "m3", "m5") + mono("m2", "m3", "m4")


def im_upsilon() -> AltForm:
    return -(mono("m1", "m2", "m3") + mono("m1", "m5", "m6") - mono("m2", "m4", "m6") - mono("m3", "m4", "m5"))


def omega_cp2() -> AltForm:
    """Kahler form of the base CP^2, living on m1 + m2."""
    return mono("m1", "m4") - mono("m2", "m5")


def volume_m() -> AltForm:
    return mono("m1", "m2", "m3", "m4", "m5", "m6")


def form_from_tensor(t: np.ndarray, space: str = "m", tol: float = 0.0) -> AltForm:
    """Read off coefficients of a fully antisymmetric array."""
    k = t.ndim
    out = {}
    for key in combinations(range(t.shape[0]), k):
        v = float(t[key])
        if abs(v) > tol:
            out[key] = v
    return AltForm(k, out, space)
