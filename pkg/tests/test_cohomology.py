import pytest
import sympy as sp

from bmpoisson import linalg
from bmpoisson.cohomology import (
    build_slice,
    cohomology_dims,
    differential_matrix,
    independent_mod_image,
    is_cocycle,
    spans_cohomology,
    square_is_zero,
    table_report,
)
from bmpoisson.models import MODEL_CODES, catalog, get_model
from bmpoisson.multivector import MultiVector, hamiltonian_field, schouten
from bmpoisson.poly import Polynomial, parse

import oracles

E2 = get_model("c1-i0").normal_form
SO3 = get_model("c0-i0").normal_form


def mv(grade, spec):
    return MultiVector(grade, {idx: parse(s) for idx, s in spec.items()})


def test_slice_examples():
    s = build_slice(0, 1)
    assert len(s) == 3
    assert [b.coeff() for b in s.basis] == [parse("x1"), parse("x2"), parse("x3")]
    assert len(build_slice(2, 1)) == 9
    s = build_slice(3, 0)
    assert len(s) == 1 and s.basis[0] == MultiVector.basis(1, 2, 3)
    assert len(build_slice(1, 3)) == 30


def test_slice_errors():
    with pytest.raises(ValueError):
        build_slice(4, 0)
    with pytest.raises(ValueError):
        build_slice(1, -1)
    with pytest.raises(ValueError):
        build_slice(1, 1).coordinates(mv(1, {(1,): "x1^2"}))


def test_coordinates_roundtrip():
    s = build_slice(2, 2)
    x = mv(2, {(1, 2): "x1*x3 - 2*x2^2", (2, 3): "1/3*x3^2"})
    assert s.element(s.coordinates(x)) == x


def test_top_grade_has_empty_target():
    m = differential_matrix(E2, build_slice(3, 2))
    assert m.target is None and m.shape == (0, 6)


def test_zero_bivector_gives_zero_matrices():
    zero = MultiVector.zero(2)
    for k in range(3):
        m = differential_matrix(zero, build_slice(k, 1))
        assert all(v == 0 for row in m.rows() for v in row)
    assert cohomology_dims(zero, 1).dims == (3, 9, 9, 3)


def test_nonlinear_pi_rejected():
    with pytest.raises(ValueError, match="degree-mixing differential: use filtered mode"):
        differential_matrix(mv(2, {(1, 2): "x3^2"}), build_slice(0, 1))
    with pytest.raises(ValueError, match="degree-mixing"):
        differential_matrix(mv(2, {(1, 2): "1"}), build_slice(0, 1))


@pytest.mark.parametrize("code", MODEL_CODES)
def test_square_zero(code):
    for d in range(4):
        assert square_is_zero(get_model(code).normal_form, d)


@pytest.mark.parametrize("code", MODEL_CODES)
def test_matrices_against_koszul_formula(code):
    pi = get_model(code).normal_form
    m = oracles.matrix_of(pi)
    for d in range(3):
        for k in range(3):
            src = build_slice(k, d)
            tgt = build_slice(k + 1, d)
            ours = differential_matrix(pi, src)
            cols = []
            for b in src.basis:
                q = {(): oracles.to_sympy(b.coeff())} if k == 0 else oracles.mv_to_dict(b)
                image = oracles.dict_to_mv(k + 1, oracles.koszul_differential(m, q, k))
                cols.append(tgt.coordinates(image))
            ref = sp.Matrix(len(tgt), len(src), lambda r, c: sp.Rational(cols[c][r]))
            assert sp.Matrix(ours.rows()) == ref, (code, k, d)
            assert linalg.rank(ours.rows()) == ref.rank()


def test_so3_dims():
    for d in (0, 1, 2):
        h = cohomology_dims(SO3, d).dims
        assert h[1] == 0 and h[2] == 0
    assert cohomology_dims(SO3, 0).dims == (1, 0, 0, 1)
    assert cohomology_dims(SO3, 2).dims == (1, 0, 0, 1)
    assert cohomology_dims(SO3, 1).dims == (0, 0, 0, 0)


def test_e2_dims():
    assert cohomology_dims(E2, 1).dims == (0, 1, 2, 1)
    assert cohomology_dims(E2, 2).dims == (1, 1, 1, 1)


def test_euler_characteristic_matches_slice_sizes():
    for m in catalog():
        for d in range(4):
            r = cohomology_dims(m.normal_form, d)
            assert sum((-1) ** k * h for k, h in enumerate(r.dims)) == sum((-1) ** k * n for k, n in enumerate(r.slice_sizes))


def test_h0_is_quadratic_casimirs():
    for m in catalog():
        r = cohomology_dims(m.normal_form, 2)
        assert len(r.generators[0]) == r.dims[0] == 1
        f = r.generators[0][0].coeff()
        assert hamiltonian_field(m.normal_form, f).is_zero()
        assert hamiltonian_field(m.normal_form, m.casimirs[0]).is_zero()


def test_c1_kernel_at_degree_two():
    r = cohomology_dims(E2, 2)
    f = r.generators[0][0].coeff()
    ratio = parse("x1^2 + x2^2").divide_exact(f)
    assert ratio is not None and ratio.is_constant()
    # the printed generator -x1^2 + x2^2 is not a Casimir of this bivector
    assert not hamiltonian_field(E2, parse("-x1^2 + x2^2")).is_zero()


def test_generators_are_certified():
    for m in catalog():
        for d in range(4):
            r = cohomology_dims(m.normal_form, d)
            for k, gens in r.generators.items():
                assert len(gens) == r.dims[k]
                assert all(is_cocycle(m.normal_form, g) for g in gens)
                if gens:
                    assert independent_mod_image(m.normal_form, d, k, gens)


def test_e2_certificates():
    assert independent_mod_image(E2, 1, 1, [mv(1, {(1,): "x1", (2,): "x2"})])
    assert independent_mod_image(E2, 1, 2, [mv(2, {(1, 2): "x3"})])
    assert independent_mod_image(E2, 1, 3, [mv(3, {(1, 2, 3): "x3"})])
    assert spans_cohomology(E2, 1, 2, [mv(2, {(1, 2): "x3"}), mv(2, {(1, 3): "x1"})])


def test_table8_pair_is_dependent():
    a, b = mv(1, {(3,): "x1^2"}), mv(1, {(3,): "x2^2"})
    assert independent_mod_image(E2, 2, 1, [a])
    assert not independent_mod_image(E2, 2, 1, [a, b])
    # their difference is the Hamiltonian field of x1*x2
    diff = b - a
    assert diff == schouten(E2, MultiVector.scalar(parse("x1*x2")))


def test_table_report():
    rep = table_report("c1-i0", (1, 2))
    obj = rep.to_json_obj()
    assert obj["degrees"]["1"]["dims"] == [0, 1, 2, 1]
    assert rep.paper_claims and rep.discrepancies
    text = rep.to_text()
    assert text.splitlines()[0] == "model c1-i0"
    assert "discrepancies:" in text
