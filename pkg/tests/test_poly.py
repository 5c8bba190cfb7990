from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from bmpoisson.poly import Polynomial, add, evaluate, gradient, mul, parse, partial

from oracles import X, from_sympy, to_sympy

x1, x2, x3, t = (Polynomial.var(i) for i in range(1, 5))

monomials = st.tuples(*(st.integers(0, 2) for _ in range(4)))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
polys = st.dictionaries(monomials, coeffs, max_size=5).map(Polynomial)


def test_add_examples():
    assert add(x1, -x1).is_zero()
    assert add(parse("x1^2 + x2^2"), parse("x3^2")) == parse("x1^2+x2^2+x3^2")
    assert add(parse("2*x1*x2"), parse("3*x1*x2")) == parse("5*x1*x2")


def test_mul_examples():
    assert mul(x1 + x2, x1 - x2) == parse("x1^2 - x2^2")
    assert mul(parse("x1 + 7"), Polynomial()).is_zero()
    assert mul(x1, x1) == parse("x1^2")


def test_partial_and_gradient_examples():
    assert partial(parse("x1^2+x2^2+x3^2"), 1) == parse("2*x1")
    assert partial(t, 4) == Polynomial.const(1)
    assert partial(x3, 1).is_zero()
    assert gradient(parse("-x1^2+x2^2+x3^2")) == (parse("-2*x1"), parse("2*x2"), parse("2*x3"), Polynomial())
    assert gradient(parse("-x1^2+x2^2")) == (parse("-2*x1"), parse("2*x2"), Polynomial(), Polynomial())
    assert all(g.is_zero() for g in gradient(Polynomial.const(Fraction(7, 3))))


def test_evaluate_examples():
    assert evaluate(parse("x1^2+x2^2"), (3, 4, 0, 0)) == 25
    assert evaluate(Polynomial(), (1.5, -2, 3, 9)) == 0
    assert evaluate(parse("x1*x3"), (2, 0, 5, 1)) == 10


def test_zero_polynomial():
    z = Polynomial({(1, 0, 0, 0): 0})
    assert z.is_zero() and z.degree == -1
    assert z == Polynomial()


def test_canonical_form_prunes_and_orders():
    p = Polynomial({(0, 0, 0, 0): 1, (2, 0, 0, 0): 3, (0, 1, 0, 0): 0})
    assert [m for m, _ in p.items()] == [(2, 0, 0, 0), (0, 0, 0, 0)]
    assert str(p) == "3*x1^2 + 1"


@pytest.mark.parametrize("text", ["-1*x1^2 + 1*x2^2", "x1", "3/4", "2*x1*x2^3*t - x3 + 1/2", "0"])
def test_parse_print_roundtrip(text):
    p = parse(text)
    assert parse(str(p)) == p


def test_parse_whitespace_and_optional_exponent():
    assert parse(" x1 ^ 1 *  x2 ") == parse("x1*x2")
    assert parse("x1^2") == parse("x1*x1")


@pytest.mark.parametrize("bad", ["", "x5", "2**x1", "x1 +", "y"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse(bad)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(1, 4))
def test_leibniz_rule(p, q, i):
    assert partial(p * q, i) == partial(p, i) * q + p * partial(q, i)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(1, 4), st.integers(1, 4))
def test_schwarz_symmetry(p, i, j):
    assert partial(partial(p, i), j) == partial(partial(p, j), i)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_against_sympy(p, q):
    assert from_sympy(to_sympy(p) * to_sympy(q)) == p * q
    for i, v in enumerate(X, start=1):
        assert from_sympy(sp.diff(to_sympy(p), v)) == partial(p, i)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(*(st.integers(0, 1) for _ in range(4))), coeffs, max_size=6).map(Polynomial),
       st.tuples(*(st.floats(-1, 1) for _ in range(4))))
def test_gradient_matches_finite_differences(p, pt):
    h = 1e-5
    for i, g in enumerate(gradient(p)):
        up = list(pt)
        dn = list(pt)
        up[i] += h
        dn[i] -= h
        fd = (evaluate(p, up) - evaluate(p, dn)) / (2 * h)
        exact = evaluate(g, pt)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


def test_exact_evaluation_uses_rationals():
    p = parse("1/3*x1 + 1/6")
    assert p.evaluate_exact((Fraction(1, 2), 0, 0, 0)) == Fraction(1, 3)
