"""Verification suites and report serialization (JSON with 17 significant digits, flat CSV)."""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cartan, forms, frames, nk, orbits, submanifold, su3

SUITES = ("algebra", "forms", "nk", "frames", "sff", "curvature", "cartan")


@dataclass
class Check:
    id: str
    anchor: str           # the mathematical statement checked, or "plumbing"
    status: str           # "pass", "fail" or "info"
    value: float
    tolerance: float | None = None
    note: str = ""


def check(cid: str, anchor: str, value: float, tol: float | None, note: str = "", upper: bool = True) -> Check:
    """Pass when value <= tol (upper) or value >= tol; tol None marks an informational entry."""
    value = float(value)
    if tol is None:
        return Check(cid, anchor, "info", value, None, note)
    ok = value <= tol if upper else value >= tol
    if math.isnan(value):
        ok = False
    return Check(cid, anchor, "pass" if ok else "fail", value, tol, note)


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "checks": [asdict(c) for c in self.checks], "meta": self.meta, "data": self.data}

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "id", "anchor", "status", "value", "tolerance", "note"])
        for c in self.checks:
            tol = "" if c.tolerance is None else fmt(c.tolerance)
            w.writerow([self.suite, c.id, c.anchor, c.status, fmt(c.value), tol, c.note])
        return buf.getvalue()


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        items = [inner + dumps(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def environment_meta(seed: int, **extra) -> dict:
    meta = {"seed": int(seed), "numpy": np.__version__, "python": platform.python_version()}
    meta.update(extra)
    return meta


# ------------------------------------------------------------------ suites

def suite_algebra(rng: np.random.Generator) -> list[Check]:
    E = [su3.AlgVec(e) for e in np.eye(8)]
    gram = np.array([[-su3.killing(a, b) / 12.0 for b in E] for a in E])
    red = su3.reductive_checks()
    xs = rng.normal(size=(20, 8))
    ad_gap = max(abs(su3.killing(su3.AlgVec(x), su3.AlgVec(y)) - su3.killing_adtrace(su3.AlgVec(x), su3.AlgVec(y)))
                 for x, y in zip(xs[:10], xs[10:]))
    jac = 0.0
    for x, y, z in zip(xs[:6], xs[6:12], xs[12:18]):
        b = su3.bracket_arr
        jac = max(jac, float(np.abs(b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))).max()))
    return [
        check("basis_orthonormal", "basis orthonormal for -B/12", np.abs(gram - np.eye(8)).max(), 1e-13),
        check("structure_table", "bracket table of the basis", su3.table_mismatch(), 1e-13),
        check("reductive_relations", "reductive decomposition brackets", red.max_leak, 1e-13),
        check("killing_trace_form", "Killing form equals 6 tr(XY)", ad_gap, 1e-11),
        check("jacobi", "plumbing", jac, 1e-12),
    ]


def structure_equation_gap() -> float:
    """Largest coefficient difference between d(e^k) from the CE differential and the dual table."""
    worst = 0.0
    for k, terms in su3.DUAL_DIFFERENTIALS.items():
        got = forms.ce_differential(forms.AltForm(1, {(k,): 1.0}, "g"))
        want = forms.AltForm(2, dict(terms), "g")
        worst = max(worst, got.max_abs_diff(want))
    return worst


def suite_forms(rng: np.random.Generator) -> list[Check]:
    d_om = forms.ce_differential(forms.omega_nk()).to_m()
    d_im = forms.ce_differential(forms.im_upsilon()).to_m()
    om = forms.omega_nk()
    d_ke = forms.ce_differential(nk.kahler_einstein_form())
    d_unit = forms.ce_differential(forms.omega_k())
    zero = forms.AltForm(3, {}, "g")
    return [
        check("structure_equations", "exterior derivatives of the dual basis", structure_equation_gap(), 1e-13),
        check("d_omega_nk", "d omega_J = 3 Re Upsilon", d_om.max_abs_diff(3 * forms.re_upsilon()), 1e-13),
        check("d_im_upsilon", "d Im Upsilon = -2 omega ^ omega", d_im.max_abs_diff(-2 * forms.wedge(om, om)), 1e-13),
        check("d_kahler_form", "Kahler form of (1,1,2) is closed", d_ke.max_abs_diff(zero), 1e-13),
        check("d_omega_k_unit", "m14 + m25 + m36 is not closed", d_unit.max_abs_diff(zero), None,
              note="reported only; the closed Kahler form carries weight 2 on m36"),
        check("d_squared", "plumbing", forms.ce_differential(d_im.to_g()).max_abs_diff(forms.AltForm(5, {}, "g")), 1e-13),
    ]


def nearly_kahler_defect(rng: np.random.Generator, n: int = 1000) -> float:
    worst = 0.0
    for x in rng.normal(size=(n, 6)):
        v = su3.AlgVec.from_m(x)
        worst = max(worst, nk.nabla_g_J(v, v).norm())
    return worst


def torsion_ratio_gap(factor: float) -> float:
    return nk.torsion_j_form().max_abs_diff(factor * forms.re_upsilon())


def suite_nk(rng: np.random.Generator) -> list[Check]:
    defects = nk.J_NK.defects()
    delta = nk.three_symmetry()
    j_from_delta = (delta - delta @ delta)[2:, 2:] / su3.SQRT3
    tj = nk.torsion_j_form()
    ratio = tj.coeffs[(3, 4, 5)] / forms.re_upsilon().coeffs[(3, 4, 5)]
    return [
        check("j_square", "J^2 = -1", defects["square"], 1e-14),
        check("j_compatible", "g(J x, y) = omega(x, y)", defects["compatible"], 1e-14),
        check("nearly_kahler", "(nabla^g_X J) X = 0", nearly_kahler_defect(rng), 1e-12),
        check("torsion_j_re_upsilon", "T^J = Re Upsilon (coefficient 1)", torsion_ratio_gap(1.0), 1e-13),
        check("torsion_j_ratio", "T^J / Re Upsilon", ratio, None, note="dω_J = 3 T^J for totally skew T^J"),
        check("delta_cubed", "3-symmetry has order 3", np.abs(np.linalg.matrix_power(delta, 3) - np.eye(8)).max(), 1e-12),
        check("delta_fixes_h", "3-symmetry fixes h", np.abs(delta[:2, :2] - np.eye(2)).max(), 1e-12),
        check("delta_gives_j", "(delta - delta^2)/sqrt3 = J", np.abs(j_from_delta - nk.J_NK.matrix).max(), 1e-12),
        check("isotropy_preserves", "isotropy maps preserve J and Upsilon",
              max(max(nk.form_defect_under(nk.perm_rep(s), forms.re_upsilon()),
                      nk.form_defect_under(nk.perm_rep(s), forms.im_upsilon()),
                      float(np.abs(nk.perm_rep(s) @ nk.J_NK.matrix - nk.J_NK.matrix @ nk.perm_rep(s)).max()))
                  for s in nk.D_GROUP), 1e-13),
    ]


def random_special_plane(rng: np.random.Generator) -> frames.LagPlane:
    t, b, p = rng.uniform(0, 2 * np.pi, 3)
    x, y = rng.uniform(0, 2 * np.pi, 2)
    e = nk.IsotropyElement.torus(x, y) * nk.IsotropyElement.perm(nk.D_GROUP[rng.integers(len(nk.D_GROUP))])
    return nk.symmetry_action(e, frames.plane_from_angles(t, b, p))


@dataclass
class NormalizationStats:
    reconstruction: float = 0.0
    idempotence: float = 0.0
    special_cos: float = 0.0
    failures: int = 0


def normalization_stats(rng: np.random.Generator, n: int = 1000) -> NormalizationStats:
    st = NormalizationStats()
    for _ in range(n):
        plane = random_special_plane(rng)
        try:
            res = frames.normalize_frame(plane)
        except Exception:
            st.failures += 1
            continue
        a = res.angles
        rebuilt = frames.plane_from_angles(a.theta, a.beta, a.phi)
        moved = nk.symmetry_action(res.element, plane)
        st.reconstruction = max(st.reconstruction, frames.plane_distance(moved, rebuilt),
                                float(np.abs(res.basis - res.frame).max()))
        again = frames.normalize_frame(rebuilt).angles
        st.idempotence = max(st.idempotence, float(np.abs(again.triple() - a.triple()).max()))
        st.special_cos = max(st.special_cos, abs(np.cos(a.alpha - a.theta)))
    return st


def suite_frames(rng: np.random.Generator, n: int = 1000) -> list[Check]:
    st = normalization_stats(rng, n)
    reps = {k: frames.stabilizer(f()) for k, f in frames.REFERENCE_PLANES.items()}
    s3_gen = reps["s3"].generator
    ranks = [frames.slice_jacobian_rank(*rng.uniform(0.2, 1.3, 3)) for _ in range(20)]
    return [
        check("normalize_reconstruction", "normal form reproduces the plane", st.reconstruction, 1e-9),
        check("normalize_idempotent", "normal form is idempotent", st.idempotence, 1e-9),
        check("normalize_special_alpha", "cos(alpha - theta) = 0 on special planes", st.special_cos, 1e-9),
        check("normalize_failures", "plumbing", st.failures, 0),
        check("slice_dimension", "slice has dimension 3", float(min(ranks) == max(ranks) == 3), 1.0, upper=False),
        check("stab_s3_continuous", "S3 plane: one-dimensional stabilizer",
              abs(reps["s3"].continuous_dim - 1), 0),
        check("stab_s3_generator", "S3 plane: stabilizer generated by h2",
              float(np.abs(np.abs(s3_gen) - np.array([0.0, 1.0])).max()), 1e-9),
        check("stab_f12_order", "F12(R3) plane: discrete stabilizer of order 24",
              abs(reps["f12r3"].discrete_order - 24), 0),
        check("stab_rp3_order", "RP3 plane: discrete stabilizer order, inner and outer", reps["rp3"].discrete_order, None,
              note="odd elements act through outer automorphisms; the inner part is checked below"),
        check("stab_rp3_inner_order", "RP3 plane: inner stabilizer of order 3",
              abs(reps["rp3"].inner_order - 3), 0),
        check("stab_fix_defect", "stabilizer elements fix the plane",
              max(r.max_fix_defect for r in reps.values()), 1e-10),
    ]


def suite_sff(rng: np.random.Generator) -> list[Check]:
    out = []
    for name in ("f12r3", "s3"):
        h = submanifold.sff_generic(submanifold.reference_frame(name))
        out.append(check(f"sff_{name}_zero", f"{name} is totally geodesic", h.norm(), 1e-12))
    rp = submanifold.reference_frame("rp3", pattern_l=True)
    h = submanifold.sff_generic(rp)
    want = np.zeros((3, 3, 3))
    want[0, 0, 0] = np.sqrt(2)
    for k in ((0, 1, 1), (1, 0, 1), (1, 1, 0)):
        want[k] = -np.sqrt(2)
    out.append(check("sff_rp3_pattern", "RP3 pattern h111 = sqrt2, h122 = -sqrt2", np.abs(h.h - want).max(), 1e-10))
    out.append(check("sff_rp3_symmetric", "second fundamental form totally symmetric", h.symmetry_defect(), 1e-9))
    out.append(check("sff_rp3_trace", "Lagrangians are minimal", np.abs(h.traces()).max(), 1e-9))
    closing = submanifold.reference_frame("rp3")
    out.append(check("rp3_pattern_l_closure", "RP3 pattern l-values close under bracket",
                     orbits.closure_residual(rp.generators()), None,
                     note="the sign-flipped pair l11 = -sqrt2, l22 = sqrt2 closes"))
    out.append(check("rp3_closing_closure", "RP3 frame with l11 = -sqrt2, l22 = sqrt2 closes",
                     orbits.closure_residual(closing.generators()), 1e-12))
    gap = 0.0
    for _ in range(50):
        t, b, p = rng.uniform(0, 2 * np.pi, 3)
        l = rng.normal(size=(2, 3))
        F = submanifold.FramedLagrangian.from_angles(t, b, p, l)
        cf = submanifold.sff_closed_form(t, b, p, l)
        gap = max(gap, submanifold.formula_agreement(submanifold.sff_generic(F), cf))
    out.append(check("sff_closed_form_constant", "component formulas on constant frames", gap, 1e-9))
    out.append(check("sff_closed_form_patch", "component formulas on a patch, O(grid^2)", patch_closed_form_gap(40), 1e-3))
    return out


def demo_patch(n: int) -> submanifold.LagrangianPatch:
    ax = tuple(np.linspace(0.0, 0.4, n) for _ in range(3))

    def lfield(u1, u2, u3):
        return np.array([[0.3 + u1, -0.2 * u2, 0.1 * u3], [0.2 * u3, 0.4 - u1 * u2, 0.5 * u2]])

    return submanifold.LagrangianPatch.from_functions(
        ax,
        theta=lambda u1, u2, u3: 0.3 + 0.8 * u1 - 0.5 * u2 * u3,
        beta=lambda u1, u2, u3: 0.7 + 0.4 * u2 + 0.3 * u1 * u1,
        phi=lambda u1, u2, u3: 0.2 + 0.6 * u3 - 0.2 * u1 * u2,
        l=lfield,
    )


def patch_closed_form_gap(n: int) -> float:
    """Component-formula disagreement at the patch centre, with exact angle derivatives."""
    patch = demo_patch(n)
    c = n // 2
    idx = (c, c, c)
    u1, u2, u3 = (a[c] for a in patch.axes)
    exact = np.array([[0.8, 0.6 * u1, -0.2 * u2], [-0.5 * u3, 0.4, -0.2 * u1], [-0.5 * u2, 0.0, 0.6]])
    h = submanifold.sff_generic(patch, idx)
    cf = submanifold.sff_closed_form(patch.theta[idx], patch.beta[idx], patch.phi[idx], patch.l_at(idx), exact)
    return submanifold.formula_agreement(h, cf)


def suite_curvature(rng: np.random.Generator) -> list[Check]:
    so3 = orbits.orbit_geometry(orbits.example_generators("f12r3"))
    lo, hi = orbits.random_sectional_spread(so3.metric, rng, 100)
    s3 = orbits.orbit_geometry(orbits.example_generators("s3"))
    rp = orbits.orbit_geometry(orbits.example_generators("rp3"))
    hol = [orbits.holomorphic_sectional(rng.normal(size=4)) for _ in range(20)]
    shape = orbits.cp2_shape_operator(orbits.example_generators("rp3"))
    want = np.sort(np.array([4 * np.sqrt(2), -np.sqrt(2), 1 / np.sqrt(2)]))
    got = np.sort(shape.eigenvalues)
    sign_gap = min(np.abs(got - want).max(), np.abs(np.sort(-shape.eigenvalues) - want).max())
    top = int(np.argmax(np.abs(shape.eigenvalues)))
    return [
        check("so3_constant", "so(3) orbit has constant curvature", hi - lo, 1e-9),
        check("so3_magnitude", "so(3) orbit curvature magnitude 1/4", abs(abs(hi) - 0.25), 1e-9),
        check("so3_sign_standard", "so(3) sectional curvature, standard convention", hi, None),
        check("so3_sign_opposite", "so(3) sectional curvature, opposite convention", -hi, None),
        check("s3_fiber_ratio", "S3 orbit fiber rescaled by 1/4", abs(s3.fiber_ratio - 0.25), 1e-10),
        check("rp3_fiber_ratio", "RP3 orbit fiber rescaled by 3", abs(rp.fiber_ratio - 3.0), 1e-10),
        check("rp3_reference_curvature", "RP3 reference curvature magnitude 3/4", abs(abs(rp.reference_sectional) - 0.75), 1e-10),
        check("cp2_holomorphic", "CP2 holomorphic curvature magnitude 4", max(abs(abs(h) - 4.0) for h in hol), 1e-9),
        check("hopf_eigenvalues", "principal curvatures 4sqrt2, -sqrt2, 1/sqrt2", sign_gap, 1e-9),
        check("hopf_trace", "principal curvature sum 3sqrt2 + 1/sqrt2",
              abs(abs(shape.eigenvalues.sum()) - (3 * np.sqrt(2) + 1 / np.sqrt(2))), 1e-9),
        check("hopf_structure_vector", "4sqrt2 eigenvector along J nu", abs(shape.structure_alignment[top] - 1.0), 1e-9),
    ]


def suite_cartan(rng: np.random.Generator) -> list[Check]:
    E = np.eye(8)
    rows = cartan.order_table(E[0], 2 * np.pi / 3)
    ratio = rows[-1].ratio
    res = cartan.integrate_path(lambda t: E[0], np.linspace(0, 2 * np.pi / 3, 11))
    from scipy.linalg import expm

    end_gap = np.abs(res.endpoint - expm(2 * np.pi / 3 * su3.matrix_of(E[0]))).max()
    g = random_su3(rng)
    lift = cartan.orbit_map(orbits.example_generators("rp3"))
    box = ((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))
    f1 = cartan.FramedMap(lift, *box)
    f2 = cartan.FramedMap(lambda u: g @ lift(u), *box)
    cong = cartan.congruence_test(f2, f1, rng)
    wit = np.abs(cong.witness - g).max() if cong.witness is not None else np.inf
    z, dz = quadratic_map(rng)
    patch, _ = cartan.exact_patch(z, dz, (np.linspace(0, 0.5, 33),) * 2)
    hol = cartan.loop_holonomy(lambda u: exact_alpha(z, dz, u), (0.1, 0.1), 0.3, 200)
    return [
        check("h1_endpoint", "path of h1 ends at the 3-symmetry element", end_gap, 1e-10),
        check("h1_unitarity", "final frame in SU(3)", res.unitarity_defect, 1e-10),
        check("order_ratio", "fourth-order convergence (ratio 16)", abs(ratio - 16.0), 2.0),
        check("congruence_witness", "left translation recovered by the witness", wit, 1e-9),
        check("mc_residual_exact", "pulled-back Maurer-Cartan form is flat, O(grid^2)", cartan.mc_residual(patch).max, 1e-3),
        check("holonomy", "flat loop has trivial holonomy", np.abs(hol - np.eye(3)).max(), 1e-6),
    ]


def random_su3(rng: np.random.Generator) -> np.ndarray:
    from scipy.stats import unitary_group

    u = unitary_group.rvs(3, random_state=rng)
    return u / np.linalg.det(u) ** (1.0 / 3.0)


def quadratic_map(rng: np.random.Generator):
    a, b, c = rng.normal(scale=0.5, size=(3, 8))

    def z(u):
        return u[0] * a + u[1] * b + u[0] * u[1] * c

    def dz(u):
        return np.array([a + u[1] * c, b + u[0] * c])

    return z, dz


def exact_alpha(z, dz, u) -> np.ndarray:
    from scipy.linalg import expm

    zm = su3.matrix_of(z(u))
    g = expm(zm)
    out = []
    for d in dz(u):
        big = np.zeros((6, 6), dtype=complex)
        big[:3, :3] = big[3:, 3:] = zm
        big[:3, 3:] = su3.matrix_of(d)
        out.append(su3.coords_of(g.conj().T @ expm(big)[:3, 3:]))
    return np.array(out)


SUITE_FUNCS = {
    "algebra": suite_algebra, "forms": suite_forms, "nk": suite_nk, "frames": suite_frames,
    "sff": suite_sff, "curvature": suite_curvature, "cartan": suite_cartan,
}


def run_suite(name: str, seed: int = 0) -> Report:
    names = SUITES if name == "all" else (name,)
    checks = []
    for n in names:
        rng = np.random.default_rng([seed, SUITES.index(n)])
        for c in SUITE_FUNCS[n](rng):
            c.id = f"{n}.{c.id}" if name == "all" else c.id
            checks.append(c)
    return Report(name, checks, environment_meta(seed))


# ---------------------------------------------------------------- examples

EXAMPLES = ("f12r3", "s3", "rp3")


class UnknownExample(KeyError):
    pass


def example_report(name: str) -> Report:
    if name not in EXAMPLES:
        raise UnknownExample(name)
    gens = orbits.example_generators(name)
    plane = frames.LagPlane.from_span(gens[:, 2:])
    stab = frames.stabilizer(plane)
    norm = frames.normalize_frame(plane)
    fr = submanifold.reference_frame(name, pattern_l=(name == "rp3"))
    sff = submanifold.sff_generic(fr if name != "rp3" else submanifold.reference_frame("rp3"))
    geo = orbits.orbit_geometry(gens)
    tw = orbits.twistor_project(gens)
    data = {
        "generators": gens,
        "frame": plane.vectors,
        "angles": {"theta": norm.angles.theta, "beta": norm.angles.beta, "phi": norm.angles.phi,
                   "flags": list(norm.angles.flags)},
        "orbit_type": {"label": stab.label, "continuous_dim": stab.continuous_dim,
                       "discrete_order": stab.discrete_order, "inner_order": stab.inner_order,
                       "generator": None if stab.generator is None else stab.generator},
        "sff_nonzero": {",".join(map(str, k)): v for k, v in sff.nonzero().items()},
        "metric_eigenvalues": geo.eigenvalues,
        "fiber_ratio": geo.fiber_ratio,
        "sectional_standard": {f"{a},{b}": v for (a, b), v in geo.coordinate_sectional.items()},
        "sectional_opposite": {f"{a},{b}": -v for (a, b), v in geo.coordinate_sectional.items()},
        "twistor": {"image_dim": tw.image_dim, "fiber_dim": tw.fiber_dim, "label": tw.label,
                    "complex_cp2": tw.complex_cp2, "complex_nk": tw.complex_nk},
    }
    checks = [
        check("closure", "generators span a subalgebra", geo.closure, 1e-10),
        check("sff_symmetric", "second fundamental form totally symmetric", sff.symmetry_defect(), 1e-9),
        check("sff_trace", "Lagrangians are minimal", np.abs(sff.traces()).max(), 1e-9),
    ]
    if name == "rp3":
        shape = orbits.cp2_shape_operator(gens)
        data["principal_curvatures"] = shape.eigenvalues
        data["structure_alignment"] = shape.structure_alignment
        want = np.sort([4 * np.sqrt(2), -np.sqrt(2), 1 / np.sqrt(2)])
        gap = min(np.abs(np.sort(shape.eigenvalues) - want).max(), np.abs(np.sort(-shape.eigenvalues) - want).max())
        checks.append(check("principal_curvatures", "principal curvatures 4sqrt2, -sqrt2, 1/sqrt2", gap, 1e-9))
    else:
        checks.append(check("totally_geodesic", f"{name} is totally geodesic", sff.norm(), 1e-12))
    return Report(f"example:{name}", checks, environment_meta(0), data)


def scan_report(report, seed: int = 0) -> Report:
    """Scan summary; the worker count is left out so output never depends on it."""
    from .scan import ScanReport

    assert isinstance(report, ScanReport)
    cfg = report.config
    checks = [
        check("families", "three families of homogeneous Lagrangians", len(report.families), 3, upper=True),
        check("families_min", "plumbing", len(report.families), 3, upper=False),
        check("anomalies", "no unexplained closing frames", len(report.anomalies), 0),
    ]
    data = {
        "families": report.families,
        "counts": report.counts(),
        "anomalies": [{"params": a.params, "residual": a.residual, "signature": list(a.signature),
                       "angles": list(a.angles), "sff_norm": a.sff_norm} for a in report.anomalies],
        "anomaly_classes": report.anomaly_classes(),
        "warnings": report.warnings,
        "representatives": _representatives(report),
    }
    meta = environment_meta(seed, angle_points=cfg.angle_points, l_values=len(cfg.l_values()),
                            grid_points=report.grid_points, refined=report.refined, partial=bool(report.warnings))
    return Report("scan", checks, meta, data)


def _representatives(report) -> dict:
    out = {}
    for s in report.solutions:
        if s.family and s.family not in out:
            out[s.family] = {"params": s.params, "angles": list(s.angles), "signature": list(s.signature),
                             "sff_norm": s.sff_norm}
    return dict(sorted(out.items()))


def integrate_report(generator: np.ndarray, total: float, steps: int, seed: int = 0) -> Report:
    from scipy.linalg import expm

    res = cartan.integrate_path(lambda t: generator, np.linspace(0.0, total, steps + 1))
    exact = expm(total * su3.matrix_of(generator))
    table = cartan.order_table(generator, total, tuple(steps * 2 ** k for k in range(4))) if np.any(generator) else []
    checks = [
        check("unitarity", "final frame in SU(3)", res.unitarity_defect, 1e-10),
        check("endpoint", "endpoint equals the exponential", np.abs(res.endpoint - exact).max(), 1e-9),
    ]
    if table and table[-1].error > 1e-13:
        checks.append(check("order_ratio", "fourth-order convergence (ratio 16)", abs(table[-1].ratio - 16.0), 2.0))
    data = {
        "endpoint": {"re": res.endpoint.real, "im": res.endpoint.imag},
        "order_table": [{"steps": r.steps, "error": r.error, "ratio": r.ratio} for r in table],
    }
    return Report("integrate", checks, environment_meta(seed, steps=steps, t=total), data)


__all__ = [
    "Check", "Report", "check", "dumps", "fmt", "run_suite", "SUITES", "example_report", "UnknownExample",
    "EXAMPLES", "scan_report", "integrate_report", "structure_equation_gap", "nearly_kahler_defect",
    "torsion_ratio_gap", "normalization_stats", "random_special_plane", "patch_closed_form_gap", "demo_patch",
    "random_su3", "quadratic_map", "exact_alpha",
]
