"""Local Bott-Morse models: Flaschka-Ratiu bivectors from two Casimirs, the
seven-model catalog, and classification of the associated 3-d Lie algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from . import linalg
from .multivector import DIM, MultiVector, bundle_map
from .poly import Polynomial, parse


# -- model identifiers ----------------------------------------------------------

CENTER = "center"
SADDLE = "saddle"

_ADMISSIBLE = {
    (0, CENTER): (0, 3),
    (0, SADDLE): (1, 2),
    (1, CENTER): (0, 2),
    (1, SADDLE): (1,),
}


@dataclass(frozen=True, order=True)
class ModelId:
    component_dim: int
    kind: str
    morse_index: int

    def __post_init__(self):
        allowed = _ADMISSIBLE.get((self.component_dim, self.kind))
        if allowed is None or self.morse_index not in allowed:
            raise ValueError(
                f"no Bott-Morse model with component dim {self.component_dim}, "
                f"type {self.kind}, Morse index {self.morse_index}"
            )

    @property
    def code(self) -> str:
        return f"{self.kind[0]}{self.component_dim}-i{self.morse_index}"

    @classmethod
    def parse(cls, code: str) -> ModelId:
        code = code.strip().lower()
        try:
            head, idx = code.split("-")
            kind = {"c": CENTER, "s": SADDLE}[head[0]]
            dim = int(head[1:])
            if not idx.startswith("i"):
                raise ValueError
            index = int(idx[1:])
        except (ValueError, KeyError):
            raise ValueError(f"unknown model id {code!r}") from None
        return cls(dim, kind, index)

    def __str__(self):
        return self.code


MODEL_CODES = ("c0-i0", "c0-i3", "s0-i1", "s0-i2", "c1-i0", "c1-i2", "s1-i1")


# -- Flaschka-Ratiu --------------------------------------------------------------

def _det(m):
    """Determinant of a square matrix of polynomials by the Leibniz formula."""
    n = len(m)
    total = Polynomial()
    for perm in permutations(range(n)):
        # parity from inversion count
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = Polynomial.const(-1 if inv % 2 else 1)
        for r in range(n):
            entry = m[r][perm[r]]
            if entry.is_zero():
                term = None
                break
            term = term * entry
        if term is not None:
            total = total + term
    return total


def flaschka_ratiu(c1, c2, k=1) -> MultiVector:
    """Bivector with entries k * det(e_i, e_j, dC1, dC2) (columns).

    Both C1 and C2 are Casimirs of the result by construction.
    """
    c1, c2, k = Polynomial.coerce(c1), Polynomial.coerce(c2), Polynomial.coerce(k)
    if k.is_zero():
        raise ValueError("the conformal factor k must be a nonzero polynomial")
    g1, g2 = c1.gradient(), c2.gradient()
    one, zero = Polynomial.const(1), Polynomial()
    terms = {}
    for i in range(DIM):
        for j in range(i + 1, DIM):
            cols = []
            for c in range(DIM):
                ei = one if c == i else zero
                ej = one if c == j else zero
                cols.append([ei, ej, g1[c], g2[c]])  # row c of the column matrix
            terms[(i + 1, j + 1)] = k * _det(cols)
    return MultiVector(2, terms)


# -- catalog -----------------------------------------------------------------------

def _bv(spec: dict) -> MultiVector:
    return MultiVector(2, {idx: parse(s) for idx, s in spec.items()})


# Casimir C1 per model (C2 = t throughout)
CASIMIRS = {
    "c0-i0": "1*x1^2 + 1*x2^2 + 1*x3^2",
    "c0-i3": "-1*x1^2 - 1*x2^2 - 1*x3^2",
    "s0-i1": "-1*x1^2 + 1*x2^2 + 1*x3^2",
    "s0-i2": "-1*x1^2 - 1*x2^2 + 1*x3^2",
    "c1-i0": "1*x1^2 + 1*x2^2",
    "c1-i2": "-1*x1^2 - 1*x2^2",
    "s1-i1": "-1*x1^2 + 1*x2^2",
}

# Table 4 bivectors, transcribed verbatim (k = 1); the form number is kept
TABLE4_FORMS = {
    1: {(1, 2): "x3", (1, 3): "-x2", (2, 3): "x1"},
    2: {(1, 2): "-x3", (1, 3): "x2", (2, 3): "x1"},
    3: {(1, 2): "-x3", (1, 3): "x2", (2, 3): "x1"},
    4: {(1, 3): "-x2", (2, 3): "x1"},
    5: {(1, 3): "x2", (2, 3): "x1"},
}
TABLE4_ROW_FORM = {
    "c0-i0": 1, "c0-i3": 1, "s0-i1": 2, "s0-i2": 3,
    "c1-i0": 4, "c1-i2": 4, "s1-i1": 5,
}

# Representative used for leaf geometry and cohomology.  It equals the Table 4
# form wherever that form is proportional to the determinant bivector; for the
# index-2 isolated saddle it is the bivector printed in Tables 6-8.
NORMAL_FORMS = {
    "c0-i0": TABLE4_FORMS[1],
    "c0-i3": TABLE4_FORMS[1],
    "s0-i1": TABLE4_FORMS[2],
    "s0-i2": {(1, 2): "-x3", (1, 3): "-x2", (2, 3): "x1"},
    "c1-i0": TABLE4_FORMS[4],
    "c1-i2": TABLE4_FORMS[4],
    "s1-i1": TABLE4_FORMS[5],
}

# Lie algebra named for each model in the source text (None: not named)
PUBLISHED_LIE = {
    "c0-i0": "so3", "c0-i3": "so3", "s0-i1": "sl2R", "s0-i2": "e2",
    "c1-i0": "e2", "c1-i2": "e2", "s1-i1": None,
}


@dataclass(frozen=True)
class LocalModel:
    id: ModelId
    casimirs: tuple
    bivector: MultiVector
    paper_bivector: MultiVector
    normal_form: MultiVector
    table4_form: int

    @property
    def code(self) -> str:
        return self.id.code

    @property
    def differentials(self):
        return tuple(c.gradient() for c in self.casimirs)

    def bivector_with(self, k) -> MultiVector:
        return flaschka_ratiu(self.casimirs[0], self.casimirs[1], k)

    def singular_distance(self, x):
        """Euclidean distance to the singular set, vectorized over x[..., 4]."""
        x = np.asarray(x, dtype=float)
        if self.id.component_dim == 0:
            return np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2 + x[..., 2] ** 2)
        return np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)


@lru_cache(maxsize=None)
def _catalog():
    tee = Polynomial.var(4)
    models = []
    for code in MODEL_CODES:
        c1 = parse(CASIMIRS[code])
        form = TABLE4_ROW_FORM[code]
        models.append(
            LocalModel(
                id=ModelId.parse(code),
                casimirs=(c1, tee),
                bivector=flaschka_ratiu(c1, tee, 1),
                paper_bivector=_bv(TABLE4_FORMS[form]),
                normal_form=_bv(NORMAL_FORMS[code]),
                table4_form=form,
            )
        )
    return tuple(models)


def catalog() -> list:
    return list(_catalog())


def get_model(model) -> LocalModel:
    if isinstance(model, LocalModel):
        return model
    mid = model if isinstance(model, ModelId) else ModelId.parse(str(model))
    for m in _catalog():
        if m.id == mid:
            return m
    raise ValueError(f"unknown model id {model!r}")


# -- proportionality -------------------------------------------------------------

def proportionality_check(a: MultiVector, b: MultiVector):
    """Factor g with a == g*b, as a Fraction when constant, a Polynomial when a
    single polynomial factor works, otherwise None."""
    if a.grade != b.grade:
        return None
    if b.is_zero():
        return None
    if set(a.terms) != set(b.terms):
        return None
    idx, cb = b.items()[0]
    ca = a.terms[idx]
    g = ca.divide_exact(cb)
    if g is None or g.is_zero():
        return None
    if b * g != a:
        return None
    if g.is_constant():
        return g.constant_value()
    return g


# -- Lie algebras -----------------------------------------------------------------

LIE_NAMES = ("so3", "sl2R", "e2", "e11", "heisenberg", "abelian", "unclassified")


@dataclass(frozen=True)
class LieClass:
    name: str
    structure_constants: tuple
    killing_signature: tuple
    derived_dim: int = field(default=0)

    def bracket(self, i: int, j: int) -> tuple:
        """Coordinates of [e_i, e_j] (1-based indices)."""
        return self.structure_constants[i - 1][j - 1]


def structure_constants(pi: MultiVector):
    """c[i][j][k] = coefficient of e_k in [e_i, e_j], read from pi^{ij} = sum_k c^k_ij x_k."""
    if pi.grade != 2:
        raise ValueError("not a linear bivector")
    c = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j), coeff in pi.terms.items():
        if j == 4 or not coeff.is_homogeneous(1) or coeff.uses_variable(4):
            raise ValueError("not a linear bivector")
        for k in range(3):
            mono = [0, 0, 0, 0]
            mono[k] = 1
            v = coeff.coefficient(mono)
            c[i - 1][j - 1][k] = v
            c[j - 1][i - 1][k] = -v
    return tuple(tuple(tuple(row) for row in plane) for plane in c)


def _bracket(c, u, v):
    return [sum(u[i] * v[j] * c[i][j][k] for i in range(3) for j in range(3)) for k in range(3)]


def jacobi_holds(c) -> bool:
    e = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    for a in range(3):
        for b in range(3):
            for d in range(3):
                s = [Fraction(0)] * 3
                for x, y, z in ((a, b, d), (b, d, a), (d, a, b)):
                    term = _bracket(c, _bracket(c, e[x], e[y]), e[z])
                    s = [p + q for p, q in zip(s, term)]
                if any(s):
                    return False
    return True


def ad_matrix(c, a: int):
    """Matrix of ad(e_a): column j holds [e_a, e_j]."""
    return [[c[a][j][k] for j in range(3)] for k in range(3)]


def killing_form(c):
    ads = [ad_matrix(c, a) for a in range(3)]
    return [[sum(linalg.matmul(ads[a], ads[b])[i][i] for i in range(3)) for b in range(3)] for a in range(3)]


def classify_lie(constants) -> LieClass:
    c = [[list(map(Fraction, row)) for row in plane] for plane in constants]
    if not jacobi_holds(c):
        raise ValueError("not a Lie algebra")
    sig = linalg.symmetric_signature(killing_form(c))
    brackets = [c[i][j] for i in range(3) for j in range(i + 1, 3)]
    derived = linalg.rank(brackets)
    traces = [sum(ad_matrix(c, a)[i][i] for i in range(3)) for a in range(3)]
    unimodular = not any(traces)
    frozen = tuple(tuple(tuple(r) for r in p) for p in c)

    if derived == 0:
        name = "abelian"
    elif derived == 3:
        name = "so3" if sig == (0, 3, 0) else "sl2R"
    elif derived == 2 and unimodular:
        span = [list(v) for v in linalg.column_space(linalg.transpose(brackets), len(brackets))]
        # any basis element outside the derived algebra acts on it by ad
        a = next(i for i in range(3) if not linalg.in_span(span, [Fraction(int(i == j)) for j in range(3)]))
        ad = ad_matrix(c, a)
        minors = sum(ad[p][p] * ad[q][q] - ad[p][q] * ad[q][p] for p in range(3) for q in range(p + 1, 3))
        # eigenvalues of ad on the derived algebra are the roots of L^2 + minors
        name = "e2" if minors > 0 else "e11" if minors < 0 else "unclassified"
    elif derived == 1:
        # nilpotent iff the derived algebra is central
        z = linalg.column_space(linalg.transpose(brackets), len(brackets))[0]
        central = all(not any(_bracket(c, [Fraction(int(i == j)) for j in range(3)], z)) for i in range(3))
        name = "heisenberg" if central else "unclassified"
    else:
        name = "unclassified"
    return LieClass(name=name, structure_constants=frozen, killing_signature=sig, derived_dim=derived)


def model_lie_class(model) -> LieClass:
    return classify_lie(structure_constants(get_model(model).bivector))


def annihilates_casimirs(model) -> bool:
    m = get_model(model)
    return all(bundle_map(m.bivector, d).is_zero() for d in m.differentials)


def sampled_nonvanishing(k, n: int = 2000, seed: int = 0) -> bool:
    """Diagnostic only: True if k has no sign change or zero on random points of [-1, 1]^4."""
    k = Polynomial.coerce(k)
    pts = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, 4))
    vals = np.asarray(k.evaluate(pts))
    return bool(np.all(vals > 0) or np.all(vals < 0))
