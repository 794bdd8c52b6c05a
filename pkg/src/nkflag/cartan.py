"""Maurer-Cartan data: residuals, geometric path integration, and congruence of framed maps.

Conventions: alpha = g^{-1} dg, so g' = g alpha along a path and
d alpha(X, Y) + [alpha(X), alpha(Y)] = 0 on a flat patch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm as scipy_expm

from .frames import LagPlane, normalize_frame
from .su3 import bracket_arr, coords_of, expm_matrix, matrix_of, project_su3

GAUSS_OFFSET = np.sqrt(3.0) / 6.0
MAX_STEP_NORM = 0.5


class GridTooSmall(ValueError):
    pass


class StepTooLarge(ValueError):
    pass


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FramedPatch:
    """alpha(d/du_i) sampled on a uniform grid; values has shape (d, *grid, 8)."""
    axes: tuple
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        vals = np.asarray(self.values, dtype=float)
        if len(axes) not in (1, 2, 3):
            raise ValueError("parameter dimension must be 1, 2 or 3")
        if vals.shape != (len(axes),) + tuple(a.size for a in axes) + (8,):
            raise ValueError(f"values of shape {vals.shape} do not match the grid")
        for a in axes:
            if a.size > 1 and np.any(np.diff(a) <= 0):
                raise ValueError("grid spacings must be positive")
        if not np.all(np.isfinite(vals)):
            raise ValueError("alpha values must be finite")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([a[1] - a[0] if a.size > 1 else 0.0 for a in self.axes])

    @classmethod
    def from_function(cls, axes, alpha: Callable[[np.ndarray], np.ndarray]) -> "FramedPatch":
        """alpha(u) returns the (d, 8) array of alpha(d/du_i) at the point u."""
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        vals = np.array([alpha(p) for p in pts])            # (npts, d, 8)
        shape = grids[0].shape
        vals = np.moveaxis(vals.reshape(shape + (len(axes), 8)), -2, 0)
        return cls(axes, vals)


@dataclass(frozen=True)
class MCResidual:
    max: float
    mean: float
    field: np.ndarray      # pointwise norm on the interior grid


def mc_residual(patch: FramedPatch) -> MCResidual:
    """|d alpha(d_i, d_j) + [alpha_i, alpha_j]| on interior points, maximized over pairs i < j."""
    d = patch.dim
    if d == 1:
        return MCResidual(0.0, 0.0, np.zeros(patch.values.shape[1:-1]))
    if any(a.size < 3 for a in patch.axes):
        raise GridTooSmall("central differences need at least 3 points per axis")
    vals = patch.values
    h = patch.spacing
    inner = tuple(slice(1, -1) for _ in range(d))
    field = np.zeros(tuple(a.size - 2 for a in patch.axes))
    for i in range(d):
        for j in range(i + 1, d):
            di_aj = np.gradient(vals[j], h[i], axis=i)[inner]
            dj_ai = np.gradient(vals[i], h[j], axis=j)[inner]
            br = np.einsum("...a,...b,abk->...k", vals[i][inner], vals[j][inner], _structure())
            field = np.maximum(field, np.linalg.norm(di_aj - dj_ai + br, axis=-1))
    return MCResidual(float(field.max()), float(field.mean()), field)


def _structure() -> np.ndarray:
    from .su3 import STRUCTURE

    return STRUCTURE


def exact_patch(z: Callable, dz: Callable, axes) -> tuple[FramedPatch, Callable]:
    """Pullback of the Maurer-Cartan form under u -> expm(Z(u)).

    dz(u) returns the (d, 8) array of partial derivatives of Z.  The derivative
    of the exponential is read off the upper-right block of expm([[Z, dZ], [0, Z]]).
    Returns the patch and the exact map.
    """
    def lift(u):
        return scipy_expm(matrix_of(z(u)))

    def alpha(u):
        zm = matrix_of(z(u))
        g = scipy_expm(zm)
        out = []
        for dzi in np.atleast_2d(dz(u)):
            big = np.zeros((6, 6), dtype=complex)
            big[:3, :3] = big[3:, 3:] = zm
            big[:3, 3:] = matrix_of(dzi)
            dg = scipy_expm(big)[:3, 3:]
            out.append(coords_of(g.conj().T @ dg))
        return np.array(out)

    return FramedPatch.from_function(axes, alpha), lift


@dataclass(frozen=True)
class PathResult:
    times: np.ndarray
    frames: np.ndarray         # (n, 3, 3)
    unitarity_defect: float

    @property
    def endpoint(self) -> np.ndarray:
        return self.frames[-1]


def magnus_step(a1: np.ndarray, a2: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order update exp(h/2 (A1 + A2) - sqrt(3)/12 h^2 [A2, A1]) for g' = g A."""
    m1, m2 = matrix_of(a1), matrix_of(a2)
    omega = 0.5 * h * (m1 + m2) - (np.sqrt(3.0) / 12.0) * h * h * (m2 @ m1 - m1 @ m2)
    return expm_matrix(omega)


def integrate_path(alpha: Callable[[float], np.ndarray], times, g0=None, check_step: bool = True) -> PathResult:
    """Solve g' = g alpha(t) with two-point Gauss-Magnus steps; alpha(t) is an 8-vector."""
    times = np.asarray(times, dtype=float)
    g = np.eye(3, dtype=complex) if g0 is None else np.asarray(getattr(g0, "entries", g0), dtype=complex)
    frames = [g]
    for t0, t1 in zip(times[:-1], times[1:]):
        h = t1 - t0
        a1 = np.asarray(alpha(t0 + (0.5 - GAUSS_OFFSET) * h), dtype=float)
        a2 = np.asarray(alpha(t0 + (0.5 + GAUSS_OFFSET) * h), dtype=float)
        if check_step and abs(h) * max(np.linalg.norm(a1), np.linalg.norm(a2)) >= MAX_STEP_NORM:
            raise StepTooLarge(f"step {h:.3g} times |alpha| exceeds {MAX_STEP_NORM}")
        g = g @ magnus_step(a1, a2, h)
        frames.append(g)
    frames[-1] = project_su3(frames[-1])
    arr = np.array(frames)
    defect = float(np.abs(arr[-1] @ arr[-1].conj().T - np.eye(3)).max())
    return PathResult(times, arr, defect)


def speed_profile(total: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """s(t) = T (e^{t/T} - 1)/(e - 1) and s'(t); s(0) = 0 and s(T) = T."""
    e1 = np.e - 1.0

    def s(t):
        return total * (np.exp(t / total) - 1.0) / e1

    def ds(t):
        return np.exp(t / total) / e1

    return s, ds


@dataclass(frozen=True)
class OrderRow:
    steps: int
    error: float
    ratio: float | None


def order_table(generator: np.ndarray, total: float, steps=(16, 32, 64, 128)) -> list[OrderRow]:
    """Endpoint error of t -> s'(t) X against exp(T X) under step halving.

    A reparametrized one-parameter path keeps the exact endpoint while making
    the quadrature error visible at fourth order.
    """
    x = np.asarray(generator, dtype=float)
    _, ds = speed_profile(total)
    exact = scipy_expm(total * matrix_of(x))
    rows: list[OrderRow] = []
    for n in steps:
        res = integrate_path(lambda t: ds(t) * x, np.linspace(0.0, total, n + 1), check_step=False)
        err = float(np.abs(res.endpoint - exact).max())
        ratio = rows[-1].error / err if rows and err > 0 else None
        rows.append(OrderRow(n, err, ratio))
    return rows


def loop_holonomy(alpha: Callable[[np.ndarray], np.ndarray], corner, size: float, steps: int = 200) -> np.ndarray:
    """Transport around the square with the given corner and side in the (u1, u2)-plane."""
    corner = np.asarray(corner, dtype=float)
    legs = [np.array([size, 0.0]), np.array([0.0, size]), np.array([-size, 0.0]), np.array([0.0, -size])]
    g = np.eye(3, dtype=complex)
    start = corner.copy()
    for leg in legs:
        s0 = start.copy()

        def along(t, s0=s0, leg=leg):
            a = np.asarray(alpha(s0 + t * leg))
            return leg @ a[:2]

        g = integrate_path(along, np.linspace(0.0, 1.0, steps + 1), g0=g, check_step=False).endpoint
        start = start + leg
    return g


# ------------------------------------------------------------ congruence

@dataclass(frozen=True)
class FramedMap:
    """A lift u -> SU(3) of a 3-parameter Lagrangian, on the box lower <= u <= upper."""
    lift: Callable[[np.ndarray], np.ndarray]
    lower: tuple
    upper: tuple
    step: float = 1e-5

    def alpha(self, u) -> np.ndarray:
        """Rows alpha(d/du_k) by central differences of the lift."""
        u = np.asarray(u, dtype=float)
        g = np.asarray(self.lift(u))
        out = []
        for k in range(len(u)):
            e = np.zeros_like(u)
            e[k] = self.step
            dg = (np.asarray(self.lift(u + e)) - np.asarray(self.lift(u - e))) / (2 * self.step)
            out.append(coords_of(g.conj().T @ dg))
        return np.array(out)

    def invariants(self, u) -> np.ndarray:
        """Normalized angles followed by the h-coefficients in the normalized orthonormal frame."""
        a = self.alpha(u)
        m = a[:, 2:]
        q, r = np.linalg.qr(m.T)
        sign = np.sign(np.diag(r))
        q, r = q * sign, (r.T * sign).T
        ortho = np.linalg.solve(r.T, a)            # rows omega(e_i) for the orthonormalized tangent frame
        norm = normalize_frame(LagPlane(ortho[:, 2:]))
        hpart = norm.change @ ortho[:, :2]
        return np.concatenate([norm.angles.triple(), hpart.T.ravel()])


@dataclass(frozen=True)
class CongruenceResult:
    congruent: bool                # normalized invariants agree at every sample
    invariant_gap: float
    witness: np.ndarray | None     # i1(p) i2(p)^-1 at the first sample
    witness_error: float | None
    witness_valid: bool = False    # i1 = witness * i2 at every sample; fails when the lifts differ by a gauge


def congruence_test(f1: FramedMap, f2: FramedMap, rng: np.random.Generator | None = None,
                    samples: int = 10, tol: float = 1e-6, witness_tol: float = 1e-9) -> CongruenceResult:
    if not (np.allclose(f1.lower, f2.lower) and np.allclose(f1.upper, f2.upper)):
        raise DomainMismatch("framed maps live on different domains")
    rng = np.random.default_rng(0) if rng is None else rng
    lo, hi = np.asarray(f1.lower, float), np.asarray(f1.upper, float)
    pad = 2 * max(f1.step, f2.step)
    pts = lo + pad + (hi - lo - 2 * pad) * rng.random((samples, len(lo)))
    gap = 0.0
    for u in pts:
        d = f1.invariants(u) - f2.invariants(u)
        d[:3] = np.angle(np.exp(2j * d[:3])) / 2   # angles are compared modulo pi
        gap = max(gap, float(np.abs(d).max()))
    if gap > tol:
        return CongruenceResult(False, gap, None, None)
    base = pts[0]
    g = np.asarray(f1.lift(base)) @ np.asarray(f2.lift(base)).conj().T
    werr = max(float(np.abs(np.asarray(f1.lift(u)) - g @ np.asarray(f2.lift(u))).max()) for u in pts)
    return CongruenceResult(True, gap, g, werr, werr < witness_tol)


def orbit_map(gens: np.ndarray, base=None) -> Callable[[np.ndarray], np.ndarray]:
    """u -> base exp(u1 X1 + u2 X2 + u3 X3) for a closing triple of generators.

    Exponential coordinates stay well conditioned for |u| below about 1; products of
    one-parameter subgroups degenerate much sooner.
    """
    gens = np.asarray(gens, dtype=float)
    b = np.eye(3, dtype=complex) if base is None else np.asarray(base, dtype=complex)

    def lift(u):
        return b @ scipy_expm(matrix_of(np.asarray(u, dtype=float) @ gens))

    return lift


__all__ = [
    "GridTooSmall", "StepTooLarge", "DomainMismatch", "FramedPatch", "MCResidual", "mc_residual", "exact_patch",
    "PathResult", "magnus_step", "integrate_path", "speed_profile", "OrderRow", "order_table", "loop_holonomy",
    "FramedMap", "CongruenceResult", "congruence_test", "orbit_map", "bracket_arr",
]
