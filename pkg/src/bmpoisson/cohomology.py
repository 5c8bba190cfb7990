"""Lichnerowicz-Poisson cohomology of linear bivectors on R^3, one
homogeneous coefficient degree at a time, by exact linear algebra over Q.

For a linear pi the differential d_pi = [pi, .] preserves the coefficient
degree d, so the complex splits into finite-dimensional slices

    X^0_d -> X^1_d -> X^2_d -> X^3_d -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import linalg
from .multivector import MultiVector, schouten
from .poly import Polynomial

NV = 3  # x1, x2, x3; the t direction is dropped


def monomials(d: int):
    """Exponent 4-tuples of degree d in x1..x3, graded-lex order (x1 first)."""
    out = []
    for a in range(d, -1, -1):
        for b in range(d - a, -1, -1):
            out.append((a, b, d - a - b, 0))
    return out


@dataclass(frozen=True)
class GradedSlice:
    multivector_grade: int
    coeff_degree: int
    basis: tuple
    keys: tuple  # (index tuple, monomial) per basis element
    variables: int = NV

    def index(self) -> dict:
        return {k: n for n, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.basis)

    def element(self, vector) -> MultiVector:
        terms: dict = {}
        for (idx, mono), c in zip(self.keys, vector):
            if c:
                terms[idx] = terms.get(idx, Polynomial()) + Polynomial.monomial(mono, c)
        return MultiVector(self.multivector_grade, terms)

    def coordinates(self, mv: MultiVector) -> list:
        """Coordinates of ``mv`` in this slice's basis; raises if it is outside."""
        pos = self.index()
        vec = [Fraction(0)] * len(self.keys)
        if mv.is_zero():
            return vec
        if mv.grade != self.multivector_grade:
            raise ValueError("grade mismatch")
        for idx, coeff in mv.terms.items():
            for mono, c in coeff.terms.items():
                key = (idx, mono)
                if key not in pos:
                    raise ValueError(f"term {idx} {mono} lies outside slice ({self.multivector_grade}, {self.coeff_degree})")
                vec[pos[key]] = c
        return vec


@lru_cache(maxsize=None)
def build_slice(k: int, d: int) -> GradedSlice:
    if not 0 <= k <= NV or d < 0:
        raise ValueError(f"no slice for grade {k}, degree {d}")
    keys, basis = [], []
    for idx in combinations(range(1, NV + 1), k):
        for mono in monomials(d):
            keys.append((idx, mono))
            basis.append(MultiVector(k, {idx: Polynomial.monomial(mono)}))
    return GradedSlice(k, d, tuple(basis), tuple(keys))


@dataclass(frozen=True)
class DifferentialMatrix:
    source: GradedSlice
    target: GradedSlice | None
    entries: tuple  # rows indexed by target basis, columns by source basis

    @property
    def shape(self):
        return (len(self.target) if self.target else 0, len(self.source))

    def rows(self) -> list:
        return [list(r) for r in self.entries]

    def apply(self, vector) -> list:
        return linalg.matvec(self.entries, vector)


def _check_linear(pi: MultiVector):
    if pi.grade != 2:
        raise ValueError("d_pi needs a bivector")
    for (i, j), c in pi.terms.items():
        if j > NV or c.uses_variable(4) or not c.is_homogeneous(1):
            raise ValueError("degree-mixing differential: use filtered mode")


def differential_matrix(pi: MultiVector, source: GradedSlice) -> DifferentialMatrix:
    """Matrix of X -> [pi, X] from slice (k, d) to slice (k+1, d)."""
    _check_linear(pi)
    k, d = source.multivector_grade, source.coeff_degree
    if k == NV:
        return DifferentialMatrix(source, None, tuple())
    target = build_slice(k + 1, d)
    cols = [target.coordinates(schouten(pi, b)) for b in source.basis]
    rows = tuple(tuple(cols[c][r] for c in range(len(cols))) for r in range(len(target)))
    return DifferentialMatrix(source, target, rows)


@dataclass
class CohomologyResult:
    degree: int
    dims: tuple
    generators: dict  # grade -> list of MultiVector
    ranks: tuple  # rank of d_pi out of grade k
    slice_sizes: tuple


def _complex(pi: MultiVector, d: int):
    return [differential_matrix(pi, build_slice(k, d)) for k in range(NV + 1)]


def cohomology_dims(pi: MultiVector, d: int) -> CohomologyResult:
    """Dimensions (h0..h3) and kernel-mod-image generators at coefficient degree d."""
    mats = _complex(pi, d)
    sizes = [len(build_slice(k, d)) for k in range(NV + 1)]
    ranks = [linalg.rank(m.rows()) if m.target else 0 for m in mats]
    dims, gens = [], {}
    for k in range(NV + 1):
        nullity = sizes[k] - ranks[k]
        prev = ranks[k - 1] if k else 0
        dims.append(nullity - prev)
        kernel = linalg.nullspace(mats[k].rows(), sizes[k]) if mats[k].target else linalg.nullspace([], sizes[k])
        image = linalg.column_space(mats[k - 1].rows(), sizes[k - 1]) if k else []
        chosen = linalg.extend_independent(image, kernel)
        gens[k] = [build_slice(k, d).element(v) for v in chosen]
    return CohomologyResult(d, tuple(dims), gens, tuple(ranks), tuple(sizes))


def square_is_zero(pi: MultiVector, d: int) -> bool:
    """d_pi o d_pi = 0 as exact matrix products on every slice of degree d."""
    mats = _complex(pi, d)
    for k in range(NV - 1):
        prod = linalg.matmul(mats[k + 1].rows(), mats[k].rows())
        if any(v for row in prod for v in row):
            return False
    return True


def is_cocycle(pi: MultiVector, x: MultiVector) -> bool:
    if x.grade == NV:
        return True
    return schouten(pi, x).is_zero()


def independent_mod_image(pi: MultiVector, d: int, k: int, vectors) -> bool:
    """True if ``vectors`` (grade k, degree d) are cocycles that stay
    linearly independent modulo the image of d_pi from grade k-1."""
    sl = build_slice(k, d)
    coords = [sl.coordinates(v) for v in vectors]
    if not all(is_cocycle(pi, v) for v in vectors):
        return False
    image = linalg.column_space(differential_matrix(pi, build_slice(k - 1, d)).rows(), len(build_slice(k - 1, d))) if k else []
    base = linalg.rank(image) if image else 0
    return linalg.rank(image + coords) == base + len(vectors) if (image or coords) else True


def spans_cohomology(pi: MultiVector, d: int, k: int, vectors) -> bool:
    """True if ``vectors`` form a basis of H^k at degree d (kernel mod image)."""
    res = cohomology_dims(pi, d)
    return len(vectors) == res.dims[k] and independent_mod_image(pi, d, k, vectors)


@dataclass
class CohomologyReport:
    model: str
    results: dict  # degree -> CohomologyResult
    paper_claims: dict = field(default_factory=dict)
    discrepancies: list = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "model": self.model,
            "degrees": {
                str(d): {
                    "dims": list(r.dims),
                    "generators": {str(k): [str(g) for g in gs] for k, gs in r.generators.items()},
                }
                for d, r in sorted(self.results.items())
            },
            "paper_claims": self.paper_claims,
            "discrepancies": self.discrepancies,
        }

    def to_text(self) -> str:
        lines = [f"model {self.model}", f"{'d':>3} | {'h0':>3} {'h1':>3} {'h2':>3} {'h3':>3} | generators"]
        for d, r in sorted(self.results.items()):
            gens = "; ".join(f"H{k}: " + ", ".join(str(g) for g in gs) for k, gs in r.generators.items() if gs)
            lines.append(f"{d:>3} | " + " ".join(f"{h:>3}" for h in r.dims) + f" | {gens}")
        if self.paper_claims:
            lines.append("published:")
            for key, val in self.paper_claims.items():
                lines.append(f"  {key}: {val}")
        if self.discrepancies:
            lines.append("discrepancies:")
            for item in self.discrepancies:
                lines.append(f"  - {item}")
        return "\n".join(lines)


def table_report(model, degrees=(0, 1, 2, 3)) -> CohomologyReport:
    """Computed cohomology grid for a catalog model next to the published claims."""
    from .models import get_model
    from .tables import cohomology_claims, compare_cohomology

    m = get_model(model)
    results = {d: cohomology_dims(m.normal_form, d) for d in degrees}
    claims = cohomology_claims(m.code)
    discrepancies = compare_cohomology(m.code, results)
    return CohomologyReport(model=m.code, results=results, paper_claims=claims, discrepancies=discrepancies)
