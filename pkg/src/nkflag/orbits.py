"""Induced geometry of 3-dimensional subgroup orbits and their projection to CP^2."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import LagPlane
from .su3 import bracket_arr

# m1, m2, m4, m5 inside the 8-vector: the tangent space of CP^2 = SU(3)/U(2)
P_IDX = (2, 3, 5, 6)
P_IDX_M = (0, 1, 3, 4)


class NotASubalgebra(ValueError):
    pass


class ProjectionDegenerate(ValueError):
    pass


def closure_residual(gens: np.ndarray) -> float:
    """Largest distance of a pairwise bracket from the span of the generators."""
    gens = np.asarray(gens, dtype=float)
    q, _ = np.linalg.qr(gens.T)
    worst = 0.0
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            br = bracket_arr(gens[a], gens[b])
            worst = max(worst, float(np.linalg.norm(br - q @ (q.T @ br))))
    return worst


def structure_in_basis(gens: np.ndarray) -> np.ndarray:
    """c[a, b] = coordinates of [X_a, X_b] in the basis X."""
    gens = np.asarray(gens, dtype=float)
    pinv = np.linalg.pinv(gens.T)
    n = len(gens)
    c = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            c[a, b] = pinv @ bracket_arr(gens[a], gens[b])
    return c


@dataclass(frozen=True)
class LeftInvariantMetric3:
    structure: np.ndarray     # c[a, b, k]
    inner: np.ndarray         # Gram matrix in the generator basis

    def __post_init__(self):
        g = np.asarray(self.inner, dtype=float)
        if np.abs(g - g.T).max() > 1e-12 or np.linalg.eigvalsh(g).min() <= 0:
            raise ValueError("inner product is not symmetric positive definite")

    def connection(self) -> np.ndarray:
        """nabla[a, b] = coordinates of nabla_{X_a} X_b, by the Koszul formula."""
        c, g = self.structure, self.inner
        gi = np.linalg.inv(g)
        n = len(g)
        # <ad*_a y, z> = <y, [a, z]>
        adj = np.einsum("yw,azw->azy", g, c)          # [a, z, y] = <y, [a, z]>
        adj_star = np.einsum("kz,azy->ayk", gi, adj)  # [a, y] -> ad*_a y
        nab = np.zeros((n, n, n))
        for a in range(n):
            for b in range(n):
                nab[a, b] = 0.5 * (c[a, b] - adj_star[a, b] - adj_star[b, a])
        return nab

    def curvature(self) -> np.ndarray:
        """R[a, b, d] = R(X_a, X_b) X_d = nabla_a nabla_b X_d - nabla_b nabla_a X_d - nabla_[a,b] X_d."""
        nab = self.connection()
        c = self.structure
        t1 = np.einsum("bdk,akm->abdm", nab, nab)
        t2 = np.einsum("adk,bkm->abdm", nab, nab)
        t3 = np.einsum("abk,kdm->abdm", c, nab)
        return t1 - t2 - t3

    def sectional(self, x, y) -> float:
        """<R(x, y) y, x> / |x ^ y|^2 with the convention of curvature()."""
        x, y = np.asarray(x, float), np.asarray(y, float)
        r = np.einsum("abdm,a,b,d->m", self.curvature(), x, y, y)
        g = self.inner
        return float((r @ g @ x) / ((x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2))

    def relative_eigen(self, reference: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of the metric relative to a reference inner product."""
        from scipy.linalg import eigh

        w, v = eigh(self.inner, reference)
        return w, v


@dataclass(frozen=True)
class OrbitReport:
    metric: LeftInvariantMetric3
    reference: np.ndarray
    closure: float
    eigenvalues: np.ndarray        # induced metric relative to the bi-invariant reference
    fiber_ratio: float             # distinguished eigenvalue over the repeated one
    fiber_direction: np.ndarray    # generator coordinates of the distinguished eigenvector
    coordinate_sectional: dict
    reference_sectional: float     # curvature of the reference rescaled to agree off the fiber


def orbit_geometry(gens, tol: float = 1e-10) -> OrbitReport:
    """Induced left-invariant metric of the orbit through the base point.

    The metric is g on the m-parts; the reference is -B/12 on the whole generator.
    """
    gens = np.asarray(gens, dtype=float).reshape(3, 8)
    res = closure_residual(gens)
    if res > tol:
        raise NotASubalgebra(f"closure residual {res:.3e}")
    c = structure_in_basis(gens)
    inner = gens[:, 2:] @ gens[:, 2:].T
    ref = gens @ gens.T
    metric = LeftInvariantMetric3(c, inner)
    w, v = metric.relative_eigen(ref)
    # the eigenvalue that differs from the other two marks the fiber direction
    i = int(np.argmin([abs(w[(k + 1) % 3] - w[(k + 2) % 3]) for k in range(3)]))
    rest = 0.5 * (w[(i + 1) % 3] + w[(i + 2) % 3])
    fiber_ratio = float(w[i] / rest)
    E = np.eye(3)
    secs = {(a, b): metric.sectional(E[a], E[b]) for a in range(3) for b in range(a + 1, 3)}
    ref_metric = LeftInvariantMetric3(c, ref * rest)
    ref_sec = ref_metric.sectional(E[0], E[1])
    return OrbitReport(metric, ref, res, w, fiber_ratio, v[:, i], secs, ref_sec)


def random_sectional_spread(metric: LeftInvariantMetric3, rng: np.random.Generator, n: int = 100) -> tuple[float, float]:
    vals = [metric.sectional(*rng.normal(size=(2, 3))) for _ in range(n)]
    return float(min(vals)), float(max(vals))


# ------------------------------------------------------------------ CP^2

def j_cp2(v8: np.ndarray) -> np.ndarray:
    """Complex structure of CP^2 on m1 + m2: m1 -> m4, m2 -> -m5."""
    v8 = np.asarray(v8, dtype=float)
    w = np.zeros(8)
    w[5], w[2] = v8[2], -v8[5]
    w[6], w[3] = -v8[3], v8[6]
    return w


def j_nk_restricted(v8: np.ndarray) -> np.ndarray:
    w = np.zeros(8)
    w[5], w[2] = v8[2], -v8[5]
    w[6], w[3] = v8[3], -v8[6]
    return w


@dataclass(frozen=True)
class TwistorReport:
    image_dim: int
    fiber_dim: int
    complex_cp2: bool          # image invariant under the CP^2 complex structure
    complex_nk: bool           # image invariant under J_NK restricted to m1 + m2
    totally_real: bool         # J_CP2(image) orthogonal to image

    @property
    def label(self) -> str:
        if self.image_dim == 3:
            return "hypersurface"
        if self.image_dim == 2 and self.complex_cp2:
            return "complex line"
        if self.totally_real:
            return "totally real"
        return "generic"


def twistor_project(obj, tol: float = 1e-9) -> TwistorReport:
    """Image of a plane (LagPlane or 3x6/3x8 rows) under the projection to m1 + m2."""
    if isinstance(obj, LagPlane):
        rows = obj.vectors
    else:
        rows = np.asarray(obj, dtype=float)
        rows = rows[:, 2:] if rows.shape[1] == 8 else rows
    img = rows[:, P_IDX_M]
    dim = int(np.linalg.matrix_rank(img, tol=tol))
    u, s, vt = np.linalg.svd(img)
    basis = vt[:dim]
    full = np.zeros((dim, 8))
    full[:, list(P_IDX)] = basis
    proj = basis.T @ basis

    def invariant(jmap):
        jb = np.array([jmap(v)[list(P_IDX)] for v in full]).reshape(dim, 4)
        return bool(dim > 0 and np.abs(jb - jb @ proj).max() < tol)

    jb = np.array([j_cp2(v)[list(P_IDX)] for v in full]).reshape(dim, 4)
    totally_real = bool(np.abs(jb @ basis.T).max() < tol) if dim else True
    return TwistorReport(dim, 3 - dim, invariant(j_cp2), invariant(j_nk_restricted), totally_real)


@dataclass(frozen=True)
class ShapeOperatorReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray       # columns, in m1 + m2 coordinates (m1, m2, m4, m5)
    normal: np.ndarray
    structure_alignment: np.ndarray   # |<v, J nu>| per eigenvector
    structure_eigenvalue: float
    symmetry_defect: float


def cp2_shape_operator(gens) -> ShapeOperatorReport:
    """Shape operator of the projected orbit in CP^2 at the base point.

    CP^2 = SU(3)/S(U(1) x U(2)) with k = h + m3 and p = m1 + m2 is symmetric, so the
    second fundamental form of an orbit is II(X, Y) = <[Y_k, X_p], nu>.
    """
    gens = np.asarray(gens, dtype=float).reshape(3, 8)
    p = list(P_IDX)
    tang = gens[:, p]
    if np.linalg.matrix_rank(tang, tol=1e-9) < 3:
        raise ProjectionDegenerate("orbit does not project to a hypersurface")
    q, _ = np.linalg.qr(np.concatenate([tang.T, np.eye(4)], axis=1))
    nu = np.zeros(8)
    nu[p] = q[:, 3]
    kpart = gens.copy()
    kpart[:, p] = 0.0
    ppart = np.zeros_like(gens)
    ppart[:, p] = tang
    second = np.array([[bracket_arr(kpart[b], ppart[a]) @ nu for b in range(3)] for a in range(3)])
    gram = tang @ tang.T
    shape = np.linalg.solve(gram, second)
    w, v = np.linalg.eig(shape)
    order = np.argsort(-np.abs(w.real))
    w, v = w.real[order], v.real[:, order]
    vecs = (v.T @ tang).T
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    jnu = j_cp2(nu)[p]
    align = np.abs(vecs.T @ jnu)
    return ShapeOperatorReport(w, vecs, nu[p], align, float(w[int(np.argmax(align))]),
                               float(np.abs(second - second.T).max()))


def cp2_curvature(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """R(X, Y) Z = -[[X, Y], Z] on the symmetric decomposition of CP^2."""
    return -bracket_arr(bracket_arr(x, y), z)


def holomorphic_sectional(x4: np.ndarray) -> float:
    """<R(X, JX) JX, X> / |X|^4 for X in m1 + m2 given by coordinates (m1, m2, m4, m5)."""
    x = np.zeros(8)
    x[list(P_IDX)] = x4
    y = j_cp2(x)
    return float(cp2_curvature(x, y, y) @ x / ((x @ x) * (y @ y) - (x @ y) ** 2))


# generators of the three homogeneous examples
def example_generators(name: str) -> np.ndarray:
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    E = np.eye(8)
    h1, h2, m1, m2, m3, m4, m5, m6 = E
    if name == "f12r3":
        return np.array([m1, m2, m3])
    if name == "s3":
        return np.array([(m1 + m2) / s2, (-m4 + m5) / s2, m6 - s3 * h2])
    if name == "rp3":
        return np.array([
            s2 * h1 + (m1 + m2) / s2,
            s2 * h2 + (m1 - m2) / np.sqrt(6) + np.sqrt(2 / 3) * m6,
            (-m4 + m5) / s3 + m3 / s3,
        ])
    raise KeyError(name)


__all__ = [
    "NotASubalgebra", "ProjectionDegenerate", "closure_residual", "structure_in_basis", "LeftInvariantMetric3",
    "OrbitReport", "orbit_geometry", "random_sectional_spread", "j_cp2", "j_nk_restricted", "TwistorReport",
    "twistor_project", "ShapeOperatorReport", "cp2_shape_operator", "cp2_curvature", "holomorphic_sectional",
    "example_generators", "P_IDX",
]
