"""Polynomial multivector fields on R^4 and the Schouten-Nijenhuis bracket.

A grade-k field is stored as a map from strictly increasing index tuples
``(i1, ..., ik)`` (entries in 1..4) to :class:`Polynomial` coefficients, so
``{(1, 2): x3}`` is ``x3 d1^d2``.  A bivector ``pi`` therefore stores the
upper-triangular entries ``pi^{ij}`` (i < j) of its antisymmetric matrix.

Sign conventions
----------------
Write ``xi_i`` for the odd symbol of ``d/dx_i``.  The bracket is

    [P, Q] = sum_i (P <- d/dxi_i)(d_i Q) - (d_i P)(d/dxi_i -> Q)

with a right odd derivative on P and a left odd derivative on Q.  Then

* on vector fields it is the Lie bracket, and [X, f] = X(f);
* [P, Q] = -(-1)^{(p-1)(q-1)} [Q, P];
* [P, .] is a derivation of degree p-1 of the wedge product;
* the graded Jacobi identity holds;
* [pi, f] = X_f = B(df) for the bundle map B(a)^i = sum_j pi^{ij} a_j.
"""

from __future__ import annotations

import json
from itertools import combinations

import numpy as np

from .poly import NVARS, Polynomial, parse

DIM = NVARS


def _sort_sign(indices):
    """Sign and sorted tuple of a sequence of indices; sign 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class MultiVector:
    """Immutable grade-k multivector field with polynomial coefficients."""

    __slots__ = ("grade", "_terms")

    def __init__(self, grade: int, terms=None):
        if not 0 <= grade <= DIM:
            raise ValueError("grade exceeds dimension" if grade > DIM else f"negative grade {grade}")
        clean: dict = {}
        for idx, coeff in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != grade:
                raise ValueError(f"index tuple {idx} does not have length {grade}")
            if any(not 1 <= i <= DIM for i in idx):
                raise ValueError(f"index out of range in {idx}")
            sign, key = _sort_sign(idx)
            if sign == 0:
                continue
            coeff = Polynomial.coerce(coeff)
            if sign < 0:
                coeff = -coeff
            acc = clean.get(key)
            coeff = coeff if acc is None else acc + coeff
            if coeff.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = coeff
        object.__setattr__(self, "grade", grade)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiVector is immutable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, grade: int) -> MultiVector:
        return cls(grade)

    @classmethod
    def scalar(cls, p) -> MultiVector:
        return cls(0, {(): Polynomial.coerce(p)})

    @classmethod
    def basis(cls, *indices, coeff=1) -> MultiVector:
        """``basis(1, 2, coeff=x3)`` is x3 d1^d2 (unsorted input allowed)."""
        return cls(len(indices), {tuple(indices): coeff})

    @classmethod
    def vector(cls, components) -> MultiVector:
        return cls(1, {(i + 1,): c for i, c in enumerate(components)})

    @classmethod
    def from_matrix(cls, entries) -> MultiVector:
        """Bivector from a 4x4 antisymmetric matrix of polynomials."""
        return cls(2, {(i + 1, j + 1): entries[i][j] for i in range(DIM) for j in range(i + 1, DIM)})

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, *indices) -> Polynomial:
        sign, key = _sort_sign(indices)
        if sign == 0:
            return Polynomial()
        c = self._terms.get(key)
        if c is None:
            return Polynomial()
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def max_degree(self) -> int:
        return max((c.degree for c in self._terms.values()), default=-1)

    def as_polynomial(self) -> Polynomial:
        if self.grade != 0:
            raise ValueError("only grade-0 multivectors are functions")
        return self._terms.get((), Polynomial())

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        if other.grade != self.grade:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise ValueError(f"cannot add grades {self.grade} and {other.grade}")
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return MultiVector(self.grade, out)

    def __neg__(self):
        return MultiVector(self.grade, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f):
        """Multiply every coefficient by a function (polynomial or rational)."""
        try:
            f = Polynomial.coerce(f)
        except TypeError:
            return NotImplemented
        return MultiVector(self.grade, {k: f * c for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.grade == other.grade and self._terms == other._terms

    def __hash__(self):
        return hash((self.grade, frozenset(self._terms.items())))

    def partial(self, i: int) -> MultiVector:
        """Coefficientwise derivative d/dx_i."""
        return MultiVector(self.grade, {k: c.partial(i) for k, c in self._terms.items()})

    def xi_right(self, i: int) -> MultiVector:
        """Right odd derivative with respect to d/dx_i."""
        if self.grade == 0:
            return MultiVector(0)
        out = {}
        for idx, c in self._terms.items():
            if i in idx:
                m = idx.index(i)
                sign = -1 if (len(idx) - 1 - m) % 2 else 1
                out[idx[:m] + idx[m + 1:]] = c if sign > 0 else -c
        return MultiVector(self.grade - 1, out)

    def xi_left(self, i: int) -> MultiVector:
        """Left odd derivative with respect to d/dx_i."""
        if self.grade == 0:
            return MultiVector(0)
        out = {}
        for idx, c in self._terms.items():
            if i in idx:
                m = idx.index(i)
                out[idx[:m] + idx[m + 1:]] = c if m % 2 == 0 else -c
        return MultiVector(self.grade - 1, out)

    # -- numeric ------------------------------------------------------------
    def evaluate(self, point) -> dict:
        return {k: c.evaluate(point) for k, c in self._terms.items()}

    # -- text / JSON --------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        out = ""
        for n, (idx, c) in enumerate(self.items()):
            d = "d" + "".join(str(i) for i in idx) if idx else ""
            if len(c.terms) > 1:
                body, neg = f"({c})", False
            else:
                neg = c.leading()[1] < 0
                body = str(-c if neg else c)
            if d:
                body = d if body == "1" else f"{body}*{d}"
            if n == 0:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"MultiVector({self.grade}, '{self}')"

    def to_json_obj(self) -> dict:
        return {
            "grade": self.grade,
            "terms": [{"indices": list(idx), "coeff": str(c)} for idx, c in self.items()],
        }

    @classmethod
    def from_json_obj(cls, obj) -> MultiVector:
        grade = int(obj["grade"])
        terms = {}
        for term in obj["terms"]:
            idx = tuple(int(i) for i in term["indices"])
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"indices must be strictly increasing, got {list(idx)}")
            terms[idx] = parse(term["coeff"])
        return cls(grade, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> MultiVector:
        return cls.from_json_obj(json.loads(text))


def basis_tuples(grade: int, dim: int = DIM):
    return list(combinations(range(1, dim + 1), grade))


# -- exterior and Schouten algebra ---------------------------------------------

def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    grade = a.grade + b.grade
    if grade > DIM:
        raise ValueError("grade exceeds dimension")
    out: dict = {}
    for ia, ca in a._terms.items():
        for ib, cb in b._terms.items():
            sign, key = _sort_sign(ia + ib)
            if sign == 0:
                continue
            prod = ca * cb
            if sign < 0:
                prod = -prod
            out[key] = out[key] + prod if key in out else prod
    return MultiVector(grade, out)


def schouten(a: MultiVector, b: MultiVector) -> MultiVector:
    """Schouten-Nijenhuis bracket [a, b] of grade p + q - 1."""
    grade = a.grade + b.grade - 1
    if grade > DIM:
        raise ValueError("grade exceeds dimension")
    if grade < 0:
        raise ValueError("bracket of two functions is undefined")
    result = MultiVector(grade)
    for i in range(1, DIM + 1):
        ra = a.xi_right(i)
        if not ra.is_zero():
            db = b.partial(i)
            if not db.is_zero():
                result = result + wedge(ra, db)
        lb = b.xi_left(i)
        if not lb.is_zero():
            da = a.partial(i)
            if not da.is_zero():
                result = result - wedge(da, lb)
    if result.is_zero():
        return MultiVector(grade)
    return result


def is_poisson(pi: MultiVector) -> bool:
    if pi.grade != 2:
        raise ValueError("is_poisson expects a bivector")
    return schouten(pi, pi).is_zero()


# -- bivectors as matrices -----------------------------------------------------

class BivectorMatrix:
    """4x4 antisymmetric matrix of polynomials, entries[i][j] = pi^{i+1, j+1}."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        ent = [[Polynomial.coerce(entries[i][j]) for j in range(DIM)] for i in range(DIM)]
        for i in range(DIM):
            if not ent[i][i].is_zero():
                raise ValueError("diagonal of an antisymmetric matrix must vanish")
            for j in range(i + 1, DIM):
                if ent[j][i] != -ent[i][j]:
                    raise ValueError("matrix is not antisymmetric")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in ent))

    def __setattr__(self, name, value):
        raise AttributeError("BivectorMatrix is immutable")

    @classmethod
    def from_multivector(cls, pi: MultiVector) -> BivectorMatrix:
        if pi.grade != 2:
            raise ValueError("expected a bivector")
        z = Polynomial()
        ent = [[z] * DIM for _ in range(DIM)]
        for (i, j), c in pi.terms.items():
            ent[i - 1][j - 1] = c
            ent[j - 1][i - 1] = -c
        return cls(ent)

    def to_multivector(self) -> MultiVector:
        return MultiVector.from_matrix(self.entries)

    def evaluate(self, point) -> np.ndarray:
        """Numeric matrix; for ``point`` of shape (..., 4) returns (..., 4, 4)."""
        x = np.asarray(point, dtype=float)
        out = np.zeros(x.shape[:-1] + (DIM, DIM))
        for i in range(DIM):
            for j in range(i + 1, DIM):
                p = self.entries[i][j]
                if not p.is_zero():
                    v = p.evaluate(x)
                    out[..., i, j] = v
                    out[..., j, i] = -v
        return out


def as_matrix(pi) -> BivectorMatrix:
    return pi if isinstance(pi, BivectorMatrix) else BivectorMatrix.from_multivector(pi)


def numeric_bivector(pi):
    """Vectorized callback x[..., 4] -> matrix[..., 4, 4] for a polynomial bivector."""
    mat = as_matrix(pi)
    return mat.evaluate


def bundle_map(pi: MultiVector, alpha) -> MultiVector:
    """B(alpha)^i = sum_j pi^{ij} alpha_j."""
    if pi.grade != 2:
        raise ValueError("bundle_map expects a bivector")
    alpha = [Polynomial.coerce(a) for a in alpha]
    if len(alpha) != DIM:
        raise ValueError(f"covector must have {DIM} components")
    ent = as_matrix(pi).entries
    comps = []
    for i in range(DIM):
        s = Polynomial()
        for j in range(DIM):
            if not ent[i][j].is_zero() and not alpha[j].is_zero():
                s = s + ent[i][j] * alpha[j]
        comps.append(s)
    return MultiVector.vector(comps)


def hamiltonian_field(pi: MultiVector, h) -> MultiVector:
    return bundle_map(pi, Polynomial.coerce(h).gradient())


def pfaffian(pi) -> Polynomial:
    e = as_matrix(pi).entries
    return e[0][1] * e[2][3] - e[0][2] * e[1][3] + e[0][3] * e[1][2]


RANK_RTOL = 1e-12


def rank_of_matrix(m: np.ndarray, rtol: float = RANK_RTOL):
    """Rank (0, 2 or 4) of evaluated antisymmetric 4x4 matrices, vectorized
    over leading axes.  An entry is zero when |entry| < rtol*(1 + max|entries|)."""
    m = np.asarray(m, dtype=float)
    amax = np.max(np.abs(m), axis=(-2, -1))
    tol = rtol * (1.0 + amax)
    pf = m[..., 0, 1] * m[..., 2, 3] - m[..., 0, 2] * m[..., 1, 3] + m[..., 0, 3] * m[..., 1, 2]
    # the pfaffian is quadratic in the entries, so its tolerance scales accordingly
    pf_tol = rtol * (1.0 + amax) ** 2
    rank = np.where(amax < tol, 0, np.where(np.abs(pf) < pf_tol, 2, 4))
    if rank.ndim == 0:
        return int(rank)
    return rank


def rank_at(pi, point) -> int:
    """Rank of pi at a point; ``pi`` is a bivector or a numeric matrix callback."""
    if callable(pi) and not isinstance(pi, (MultiVector, BivectorMatrix)):
        m = pi(np.asarray(point, dtype=float))
    else:
        m = as_matrix(pi).evaluate(point)
    return rank_of_matrix(m)


def jacobiator(pi: MultiVector) -> MultiVector:
    """The trivector [pi, pi]."""
    return schouten(pi, pi)


def contract_exact(pi: MultiVector, alpha, beta) -> Polynomial:
    """pi(alpha, beta) = sum_ij pi^{ij} alpha_i beta_j."""
    ent = as_matrix(pi).entries
    s = Polynomial()
    for i in range(DIM):
        for j in range(DIM):
            if not ent[i][j].is_zero():
                s = s + ent[i][j] * Polynomial.coerce(alpha[i]) * Polynomial.coerce(beta[j])
    return s


__all__ = [
    "MultiVector",
    "BivectorMatrix",
    "wedge",
    "schouten",
    "is_poisson",
    "bundle_map",
    "hamiltonian_field",
    "pfaffian",
    "rank_at",
    "rank_of_matrix",
    "numeric_bivector",
    "basis_tuples",
]
