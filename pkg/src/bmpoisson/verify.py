"""Verification suites behind ``bmpoisson verify``.

Every randomized check draws from one ``numpy`` generator seeded by the
caller, so a suite run is reproducible from its printed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg
from .cohomology import build_slice, cohomology_dims, independent_mod_image, square_is_zero
from .glue import GluedStructure, Grid, jacobiator_grid, rank_profile
from .leaves import frame_violations, leaf_frame, model_symplectic_eval, proposition_form, trace_leaf
from .models import (
    MODEL_CODES,
    catalog,
    classify_lie,
    flaschka_ratiu,
    get_model,
    model_lie_class,
    structure_constants,
)
from .multivector import DIM, MultiVector, bundle_map, hamiltonian_field, is_poisson, pfaffian, schouten, wedge
from .poly import Polynomial, parse

DEFAULT_SEED = 20240611
SUITES = ("jacobi", "casimir", "symplectic", "cohomology", "glue")
REL_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


# -- random objects ----------------------------------------------------------------

def random_polynomial(rng, max_degree: int = 2, n_terms: int = 3, nvars: int = DIM, coeff_range: int = 5) -> Polynomial:
    terms = {}
    for _ in range(int(rng.integers(0, n_terms + 1))):
        deg = int(rng.integers(0, max_degree + 1))
        mono = [0] * 4
        for _ in range(deg):
            mono[int(rng.integers(0, nvars))] += 1
        c = int(rng.integers(-coeff_range, coeff_range + 1))
        terms[tuple(mono)] = terms.get(tuple(mono), 0) + c
    return Polynomial(terms)


def random_multivector(rng, grade: int, max_degree: int = 2, n_terms: int = 2) -> MultiVector:
    tuples = list(combinations(range(1, DIM + 1), grade))
    terms = {}
    for n in rng.permutation(len(tuples))[: max(1, int(rng.integers(1, n_terms + 1)))]:
        terms[tuples[n]] = random_polynomial(rng, max_degree)
    return MultiVector(grade, terms)


def random_off_axis_points(rng, n: int, radius: float = 1.0, min_axis: float = 1e-3) -> np.ndarray:
    """Uniform points of [-radius, radius]^4 with x1^2 + x2^2 >= min_axis^2."""
    out = []
    while len(out) < n:
        p = rng.uniform(-radius, radius, size=4)
        if p[0] ** 2 + p[1] ** 2 >= min_axis ** 2:
            out.append(p)
    return np.array(out)


# -- Schouten bracket identities ---------------------------------------------------------

def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def check_antisymmetry(a: MultiVector, b: MultiVector) -> bool:
    p, q = a.grade, b.grade
    return schouten(a, b) == schouten(b, a) * Polynomial.const(-_sgn((p - 1) * (q - 1)))


def check_leibniz(a: MultiVector, b: MultiVector, c: MultiVector) -> bool:
    p, q = a.grade, b.grade
    lhs = schouten(a, wedge(b, c))
    rhs = wedge(schouten(a, b), c) + wedge(b, schouten(a, c)) * Polynomial.const(_sgn((p - 1) * q))
    return lhs == rhs


def check_jacobi(a: MultiVector, b: MultiVector, c: MultiVector) -> bool:
    p, q = a.grade, b.grade
    lhs = schouten(a, schouten(b, c))
    rhs = schouten(schouten(a, b), c) + schouten(b, schouten(a, c)) * Polynomial.const(_sgn((p - 1) * (q - 1)))
    return lhs == rhs


def _grades(kind: str):
    out = []
    for p in range(DIM + 1):
        for q in range(DIM + 1):
            for r in range(DIM + 1):
                if kind == "antisymmetry":
                    ok = r == 0 and 0 <= p + q - 1 <= DIM
                elif kind == "leibniz":
                    ok = q + r <= DIM and p + q >= 1 and p + r >= 1 and p + q + r - 1 <= DIM
                else:
                    pairs = (p + q, p + r, q + r)
                    ok = all(1 <= s <= DIM + 1 for s in pairs) and 0 <= p + q + r - 2 <= DIM
                if ok:
                    out.append((p, q, r))
    return out


def schouten_properties(rng, n: int = 500, max_degree: int = 2) -> list:
    results = []
    for kind, check in (("antisymmetry", check_antisymmetry), ("leibniz", check_leibniz), ("jacobi", check_jacobi)):
        grades = _grades(kind)
        failures = 0
        for _ in range(n):
            p, q, r = grades[int(rng.integers(len(grades)))]
            a, b, c = (random_multivector(rng, g, max_degree) for g in (p, q, r))
            args = (a, b) if kind == "antisymmetry" else (a, b, c)
            if not check(*args):
                failures += 1
        results.append(CheckResult(f"schouten graded {kind}", failures == 0, f"{n - failures}/{n} random triples"))
    return results


# -- suites ---------------------------------------------------------------------------------

def suite_jacobi(rng, n_triples: int = 100) -> list:
    out = []
    scale = parse("2 + x1^2")
    for k_label, k in (("k=1", Polynomial.const(1)), ("k=2+x1^2", scale)):
        ok = [m.code for m in catalog() if is_poisson(m.bivector * k)]
        out.append(CheckResult(f"[pi,pi]=0 ({k_label})", len(ok) == 7, f"{len(ok)}/7 models"))
    ok = [m.code for m in catalog() if is_poisson(m.normal_form)]
    out.append(CheckResult("[pi,pi]=0 (normal forms)", len(ok) == 7, f"{len(ok)}/7 models"))
    out.extend(schouten_properties(rng, n_triples))
    return out


def suite_casimir(rng, n_random: int = 20) -> list:
    out = []
    good = 0
    for m in catalog():
        if all(hamiltonian_field(m.bivector, c).is_zero() for c in m.casimirs) and all(
            bundle_map(m.normal_form, d).is_zero() for d in m.differentials
        ):
            good += 1
    out.append(CheckResult("B(dC1) = B(dC2) = 0", good == 7, f"{good}/7 models"))
    zero_pf = sum(1 for m in catalog() if pfaffian(m.bivector).is_zero())
    out.append(CheckResult("pfaffian of determinant bivector = 0", zero_pf == 7, f"{zero_pf}/7 models"))
    bad = 0
    for _ in range(n_random):
        c1 = random_polynomial(rng, 3, n_terms=4)
        c2 = random_polynomial(rng, 3, n_terms=4)
        k = random_polynomial(rng, 2, n_terms=3)
        if k.is_zero():
            k = Polynomial.const(1)
        pi = flaschka_ratiu(c1, c2, k)
        if not (bundle_map(pi, c1.gradient()).is_zero() and bundle_map(pi, c2.gradient()).is_zero()):
            bad += 1
        elif pi != flaschka_ratiu(c1, c2, 1) * k or not pfaffian(pi).is_zero():
            bad += 1
    out.append(CheckResult("Flaschka-Ratiu annihilation, k-scaling, pfaffian on random Casimirs", bad == 0, f"{n_random - bad}/{n_random}"))
    expected = {"c0-i0": "so3", "c0-i3": "so3", "s0-i1": "sl2R", "s0-i2": "sl2R", "c1-i0": "e2", "c1-i2": "e2", "s1-i1": "e11"}
    names = {code: model_lie_class(code).name for code in MODEL_CODES}
    wrong = [f"{c}={n}" for c, n in names.items() if expected[c] != n]
    out.append(CheckResult("Lie classes", not wrong, ", ".join(f"{c}={n}" for c, n in names.items())))
    scaled = all(classify_lie(structure_constants(m.bivector * Polynomial.const(3))).name == names[m.code] for m in catalog())
    out.append(CheckResult("Lie class invariant under positive rescaling", scaled))
    return out


def rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _k_values(point):
    return (("1", 1.0), ("2", 2.0), ("1+x1^2+x2^2", 1.0 + point[0] ** 2 + point[1] ** 2))


def suite_symplectic(rng, n_points: int = 1000) -> list:
    out = []
    frame_bad, oracle_worst, literal_worst, literal_fail = 0, 0.0, 0.0, 0
    for m in catalog():
        pts = random_off_axis_points(rng, n_points)
        for p in pts:
            frame = leaf_frame(m, p)
            if frame_violations(m, frame):
                frame_bad += 1
            for _, k in _k_values(p):
                omega = model_symplectic_eval(m, k, p)
                ref = proposition_form(m, k, p, area="frame")
                err = rel_err(omega, ref)
                oracle_worst = max(oracle_worst, err)
                lit = proposition_form(m, k, p, area="euclidean")
                lerr = rel_err(omega, lit)
                literal_worst = max(literal_worst, lerr)
                literal_fail += lerr >= REL_TOL
    total = 7 * n_points
    out.append(CheckResult("leaf frames tangent and orthogonal", frame_bad == 0, f"{total - frame_bad}/{total} points"))
    out.append(CheckResult(
        "omega(u,v) = x1/(k sqrt(x1^2+x2^2)) on the frame", oracle_worst < REL_TOL,
        f"max rel err {oracle_worst:.2e} over {3 * total} evaluations",
    ))
    out.append(CheckResult(
        "omega(u,v) = x1/(k sqrt(x1^2+x2^2)) * |u||v|", literal_fail == 0,
        f"{3 * total - literal_fail}/{3 * total} within {REL_TOL:g}, max rel err {literal_worst:.2e}",
    ))
    sample = trace_leaf(get_model("c0-i0").normal_form, (1, 0, 0, 0), ["x3"], 1e-3, 6284, model="c0-i0")
    ret = sample.return_distance()
    out.append(CheckResult("circle trace returns, drift < 1e-9", ret < 1e-5 and sample.casimir_drift < 1e-9,
                           f"closest return {ret:.2e}, drift {sample.casimir_drift:.2e}"))
    cyl = trace_leaf(get_model("c1-i0").normal_form, (1, 0, 0, 0), ["x3", "x1"], 1e-3, 3000, model="c1-i0")
    out.append(CheckResult("cylinder trace stays on x1^2+x2^2 = const", cyl.casimir_drift < 1e-6, f"drift {cyl.casimir_drift:.2e}"))
    return out


def _quadratic_casimir_dim(pi: MultiVector) -> int:
    """Dimension of quadratic f in x1..x3 with B(df) = 0, solved directly.
    The Hamiltonian field of a quadratic is quadratic for a linear pi."""
    monos = [m for m in build_slice(0, 2).keys]
    cols = []
    for _, mono in monos:
        field = hamiltonian_field(pi, Polynomial.monomial(mono))
        vec = []
        for i in range(1, 4):
            c = field.coeff(i)
            vec.extend(c.coefficient(m2) for _, m2 in monos)
        cols.append(vec)
    return len(monos) - linalg.rank(linalg.transpose(cols))


def suite_cohomology(rng=None, max_degree: int = 3) -> list:
    out = []
    bad = [f"{m.code}@d={d}" for m in catalog() for d in range(max_degree + 1) if not square_is_zero(m.normal_form, d)]
    out.append(CheckResult("d_pi o d_pi = 0", not bad, ", ".join(bad) or f"7 models, d <= {max_degree}"))
    so3 = get_model("c0-i0").normal_form
    dims = {d: cohomology_dims(so3, d).dims for d in (0, 1, 2)}
    ok = all(h[1] == 0 and h[2] == 0 for h in dims.values())
    out.append(CheckResult("so3: h1 = h2 = 0 for d <= 2", ok, str(dims)))
    mism = []
    for m in catalog():
        direct = _quadratic_casimir_dim(m.normal_form)
        if direct != cohomology_dims(m.normal_form, 2).dims[0]:
            mism.append(m.code)
    out.append(CheckResult("h0(d=2) = quadratic Casimirs via B(df) = 0", not mism, ", ".join(mism) or "7/7 models"))
    gen_bad = 0
    for m in catalog():
        for d in range(max_degree + 1):
            res = cohomology_dims(m.normal_form, d)
            for k, gens in res.generators.items():
                if len(gens) != res.dims[k] or (gens and not independent_mod_image(m.normal_form, d, k, gens)):
                    gen_bad += 1
    out.append(CheckResult("generators are cocycles independent mod coboundaries", gen_bad == 0))
    e2 = get_model("c1-i0").normal_form
    cert = {
        "x1*d1 + x2*d2 (h1, d=1)": (1, 1, MultiVector(1, {(1,): parse("x1"), (2,): parse("x2")})),
        "x3*d12 (h2, d=1)": (1, 2, MultiVector(2, {(1, 2): parse("x3")})),
        "x3*d123 (h3, d=1)": (1, 3, MultiVector(3, {(1, 2, 3): parse("x3")})),
    }
    for label, (d, k, g) in cert.items():
        out.append(CheckResult(f"e2 certificate {label}", independent_mod_image(e2, d, k, [g])))
    return out


def suite_glue(rng=None, grid: Grid | None = None, model: str = "c0-i0") -> list:
    grid = grid or Grid.cube(-1.0, 1.0, 21)
    gs = GluedStructure.tubes(model)
    jac = jacobiator_grid(gs, grid)
    out = [CheckResult("glued max Jacobiator < 1e-6", jac < 1e-6, f"{jac:.2e} on {' x '.join(grid.spec())}")]
    prof = rank_profile(gs, grid)
    first = next(iter(prof))
    zero_only_first = all(0 not in hist for b, hist in prof.items() if b != first)
    first_ok = set(prof[first]) == {0} if first.startswith("[0,") else True
    never4 = all(4 not in hist for hist in prof.values())
    out.append(CheckResult("rank 0 only on the singular set, never 4", zero_only_first and first_ok and never4, str(prof)))
    return out


def run(suite: str = "all", seed: int = DEFAULT_SEED, grid: Grid | None = None, n_points: int = 1000, n_triples: int = 100) -> list:
    if suite not in SUITES + ("all",):
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    chosen = SUITES if suite == "all" else (suite,)
    results = []
    for name in chosen:
        rng = np.random.default_rng(seed)
        if name == "jacobi":
            results += suite_jacobi(rng, n_triples)
        elif name == "casimir":
            results += suite_casimir(rng)
        elif name == "symplectic":
            results += suite_symplectic(rng, n_points)
        elif name == "cohomology":
            results += suite_cohomology(rng)
        else:
            results += suite_glue(rng, grid)
    return results
