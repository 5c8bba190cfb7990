"""Exact multivariate polynomials over Q in the chart variables (x1, x2, x3, t).

Coefficients are :class:`fractions.Fraction`; a polynomial is an immutable map
from exponent 4-tuples to nonzero coefficients.  The only bridge to floating
point is :meth:`Polynomial.evaluate`.

Text grammar (round-trips through :func:`parse` / ``str``)::

    -1*x1^2 + 1*x2^2      3/2*x1*t      x3      -7
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

NVARS = 4
VAR_NAMES = ("x1", "x2", "x3", "t")

Monomial = tuple  # 4-tuple of non-negative ints


def _grlex_key(mono):
    # highest total degree first, then x1 > x2 > x3 > t
    return (-sum(mono), tuple(-e for e in mono))


class Polynomial:
    """Immutable exact polynomial in (x1, x2, x3, t)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != NVARS or any(e < 0 for e in mono):
                    raise ValueError(f"bad monomial exponents {mono!r}")
                c = Fraction(c)
                if c:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if not clean[mono]:
                        del clean[mono]
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> Polynomial:
        return cls({(0,) * NVARS: c})

    @classmethod
    def var(cls, i: int) -> Polynomial:
        """The coordinate function x_i, with i in 1..4 (4 is t)."""
        if not 1 <= i <= NVARS:
            raise ValueError(f"variable index must be in 1..{NVARS}, got {i}")
        mono = [0] * NVARS
        mono[i - 1] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def monomial(cls, exps: Iterable[int], coeff=1) -> Polynomial:
        exps = tuple(exps)
        exps = exps + (0,) * (NVARS - len(exps))
        return cls({exps: coeff})

    @staticmethod
    def coerce(value) -> Polynomial:
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, (int, Rational, Fraction)):
            return Polynomial.const(value)
        if isinstance(value, str):
            return parse(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Polynomial")

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """(monomial, coefficient) pairs in graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(m) for m in self._terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return d is None or degs == {d}

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * NVARS, Fraction(0))

    def uses_variable(self, i: int) -> bool:
        return any(m[i - 1] for m in self._terms)

    def coefficient(self, mono) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> Polynomial:
        c = Fraction(c)
        return Polynomial({m: c * v for m, v in self._terms.items()})

    def leading(self):
        """Graded-lex leading (monomial, coefficient), or None for zero."""
        if not self._terms:
            return None
        return self.items()[0]

    def divide_exact(self, divisor: Polynomial) -> Polynomial | None:
        """Quotient q with self == q * divisor, or None if not divisible."""
        divisor = Polynomial.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = divisor.leading()
        rem = self
        quot: dict = {}
        while not rem.is_zero():
            m, c = rem.leading()
            if any(a < b for a, b in zip(m, lm)):
                return None
            qm = tuple(a - b for a, b in zip(m, lm))
            qc = c / lc
            quot[qm] = qc
            rem = rem - Polynomial({qm: qc}) * divisor
        return Polynomial(quot)

    # -- calculus -----------------------------------------------------------
    def partial(self, i: int) -> Polynomial:
        """Formal derivative with respect to variable i (1..4)."""
        if not 1 <= i <= NVARS:
            raise ValueError(f"variable index must be in 1..{NVARS}, got {i}")
        k = i - 1
        out = {}
        for m, c in self._terms.items():
            if m[k]:
                nm = list(m)
                nm[k] -= 1
                out[tuple(nm)] = c * m[k]
        return Polynomial(out)

    def gradient(self) -> tuple:
        return tuple(self.partial(i) for i in range(1, NVARS + 1))

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, point):
        """Float evaluation.  ``point`` may be a 4-sequence or an array of
        shape (..., 4); the result has the leading shape of ``point``."""
        x = np.asarray(point, dtype=float)
        if x.shape[-1] != NVARS:
            raise ValueError(f"point must have {NVARS} coordinates")
        out = np.zeros(x.shape[:-1])
        for m, c in self._terms.items():
            term = np.full(x.shape[:-1], float(c))
            for k, e in enumerate(m):
                if e:
                    term = term * x[..., k] ** e
            out = out + term
        if out.ndim == 0:
            return float(out)
        return out

    def evaluate_exact(self, point) -> Fraction:
        pt = [Fraction(v) for v in point]
        if len(pt) != NVARS:
            raise ValueError(f"point must have {NVARS} coordinates")
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for v, e in zip(pt, m):
                if e:
                    term *= v**e
            total += term
        return total

    __call__ = evaluate

    # -- comparison / text --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.const(other)._terms
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self._terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for idx, (m, c) in enumerate(self.items()):
            factors = [f"{v}^{e}" if e > 1 else v for v, e in zip(VAR_NAMES, m) if e]
            mag = abs(c) if idx else c
            body = "*".join([str(mag)] + factors)
            if idx:
                parts.append(("- " if c < 0 else "+ ") + body)
            else:
                parts.append(body)
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial('{self}')"


# -- parsing ------------------------------------------------------------------

_VAR_INDEX = {name: i for i, name in enumerate(VAR_NAMES)}
_FACTOR = re.compile(r"^(x1|x2|x3|t)(?:\^(\d+))?$|^(\d+(?:/\d+)?|\d*\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)$")


def parse(text: str) -> Polynomial:
    """Parse the polynomial text grammar.  Whitespace is ignored."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial string")
    # split into signed terms; a sign directly after '^' or 'e' is not a separator
    terms = []
    start = 0
    for i in range(1, len(s)):
        if s[i] in "+-" and s[i - 1] not in "^eE*/":
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    out: dict = {}
    for term in terms:
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(sign)
        mono = [0] * NVARS
        for factor in term.split("*"):
            mt = _FACTOR.match(factor)
            if mt is None:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            if mt.group(1):
                mono[_VAR_INDEX[mt.group(1)]] += int(mt.group(2) or 1)
            else:
                coeff *= Fraction(mt.group(3))
        key = tuple(mono)
        out[key] = out.get(key, Fraction(0)) + coeff
    return Polynomial(out)


x1 = Polynomial.var(1)
x2 = Polynomial.var(2)
x3 = Polynomial.var(3)
t = Polynomial.var(4)
ZERO = Polynomial()
ONE = Polynomial.const(1)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def partial(p: Polynomial, i: int) -> Polynomial:
    return p.partial(i)


def gradient(p: Polynomial) -> tuple:
    return p.gradient()


def evaluate(p: Polynomial, point):
    return p.evaluate(point)
