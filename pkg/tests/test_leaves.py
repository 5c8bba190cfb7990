import json
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from bmpoisson.leaves import (
    frame_violations,
    leaf_frame,
    model_symplectic_eval,
    proposition_form,
    symplectic_eval,
    table5_vectors,
    trace_leaf,
)
from bmpoisson.models import MODEL_CODES, catalog, get_model
from bmpoisson.verify import DEFAULT_SEED, random_off_axis_points

import oracles

CENTER = get_model("c0-i0").normal_form


def test_frame_examples():
    f = leaf_frame("c0-i0", (1, 0, 0, 0))
    assert np.allclose(f.u, (0, 1, 0, 0)) and np.allclose(f.v, (0, 0, 1, 0))
    f = leaf_frame("c1-i0", (1, 0, 5, 0))
    assert np.allclose(f.u, (0, 1, 0, 0)) and np.allclose(f.v, (0, 0, 1, 0))


@pytest.mark.parametrize("code", MODEL_CODES)
def test_frame_on_axis_raises(code):
    with pytest.raises(ValueError, match="frame undefined on axis"):
        leaf_frame(code, (0, 0, 1, 0))


def test_frames_tangent_and_orthogonal():
    rng = np.random.default_rng(DEFAULT_SEED)
    for m in catalog():
        for p in random_off_axis_points(rng, 1000):
            f = leaf_frame(m, p)
            assert frame_violations(m, f) == []
            for d in m.differentials:
                grad = np.array([g.evaluate(p) for g in d], dtype=float)
                assert abs(grad @ np.array(f.u)) < 1e-10 * (1 + np.linalg.norm(grad))
                assert abs(grad @ np.array(f.v)) < 1e-10 * (1 + np.linalg.norm(grad))
            assert abs(np.dot(f.u, f.v)) < 1e-10


def test_printed_saddle_rows_are_not_tangent():
    p = (0.6, -0.3, 0.45, 0.2)
    for code in ("s0-i1", "s0-i2"):
        u, v = table5_vectors(code, p)
        grad = np.array([g.evaluate(p) for g in get_model(code).differentials[0]], dtype=float)
        assert abs(grad @ np.array(v)) > 1e-3
        assert leaf_frame(code, p).corrected
    for code in ("c0-i0", "c1-i0", "s1-i1"):
        assert not leaf_frame(code, p).corrected


def test_symplectic_eval_examples():
    assert symplectic_eval(CENTER, (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)) == pytest.approx(1.0)
    assert symplectic_eval(CENTER, (1, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0)) == pytest.approx(-1.0)
    assert symplectic_eval(CENTER, (1, 0, 0, 0), (0, 1, 0, 0), (0, 1, 0, 0)) == pytest.approx(0.0)


def test_symplectic_eval_errors():
    with pytest.raises(ValueError, match="not tangent"):
        symplectic_eval(CENTER, (1, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0))
    with pytest.raises(ValueError, match="singular point"):
        symplectic_eval(CENTER, (0, 0, 0, 0.5), (0, 1, 0, 0), (0, 0, 1, 0))


def test_symplectic_eval_antisymmetric_and_bilinear():
    rng = np.random.default_rng(5)
    for m in catalog():
        for p in random_off_axis_points(rng, 20):
            f = leaf_frame(m, p)
            u, v = np.array(f.u), np.array(f.v)
            w = symplectic_eval(m.normal_form, p, u, v)
            assert symplectic_eval(m.normal_form, p, v, u) == pytest.approx(-w, abs=1e-12)
            a, b = rng.normal(size=2)
            lhs = symplectic_eval(m.normal_form, p, a * u + b * v, v)
            assert lhs == pytest.approx(a * w, rel=1e-9, abs=1e-12)


def _rational_points():
    # x1^2 + x2^2 is a perfect square, so the frame is rational
    for x1, x2 in ((Fraction(3, 5), Fraction(4, 5)), (Fraction(-5, 13), Fraction(12, 13)), (Fraction(8, 17), Fraction(-15, 17))):
        for x3 in (Fraction(1, 2), Fraction(-2, 3)):
            yield (x1, x2, x3, Fraction(1, 4))


def test_symplectic_eval_against_exact_solve():
    for m in catalog():
        mat = oracles.matrix_of(m.normal_form)
        for p in _rational_points():
            subs = dict(zip(oracles.X, [sp.Rational(c.numerator, c.denominator) for c in p]))
            f = leaf_frame(m, [float(c) for c in p])
            u = [sp.Rational(c).limit_denominator(10 ** 6) for c in f.u]
            v = [sp.Rational(c).limit_denominator(10 ** 6) for c in f.v]
            exact = oracles.omega_exact(mat.subs(subs), u, v)
            assert model_symplectic_eval(m, 1.0, [float(c) for c in p]) == pytest.approx(float(exact), rel=1e-12)
            # and the closed form x1 / r on the frame
            x1, x2 = p[0], p[1]
            assert exact == sp.Rational(x1.numerator, x1.denominator) / sp.sqrt(sp.Rational(x1 ** 2 + x2 ** 2))


def test_proposition_form_examples():
    assert proposition_form("c0-i0", 1.0, (1, 0, 0, 0)) == pytest.approx(1.0)
    assert proposition_form("c0-i0", 2.0, (1, 0, 0, 0)) == pytest.approx(0.5)
    assert proposition_form("c0-i0", 1.0, (-1, 0, 0, 0)) == pytest.approx(-1.0)
    assert model_symplectic_eval("c0-i0", 1.0, (-1, 0, 0, 0)) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        proposition_form("c0-i0", 1.0, (0, 0, 2, 0))
    with pytest.raises(ValueError):
        proposition_form("c0-i0", 0.0, (1, 0, 0, 0))


def test_frame_area_identity():
    rng = np.random.default_rng(DEFAULT_SEED)
    for m in catalog():
        for p in random_off_axis_points(rng, 200):
            for k in (1.0, 2.0, 1.0 + p[0] ** 2 + p[1] ** 2):
                omega = model_symplectic_eval(m, k, p)
                assert omega == pytest.approx(proposition_form(m, k, p, area="frame"), rel=1e-9)


def test_euclidean_area_reading_differs():
    # |u||v| is not 1 off the plane x3 = 0, so the metric-area reading disagrees
    p = (0.6, -0.3, 0.45, 0.2)
    assert model_symplectic_eval("c0-i0", 1.0, p) != pytest.approx(proposition_form("c0-i0", 1.0, p), rel=1e-3)


def test_circle_trace():
    s = trace_leaf(CENTER, (1, 0, 0, 0), ["x3"], 1e-3, 6284, model="c0-i0")
    assert len(s.points) == 6285
    assert s.casimir_drift < 1e-9
    assert s.return_distance() < 1e-5
    assert not s.hit_singular
    r = np.hypot(s.points[:, 0], s.points[:, 1])
    assert np.max(np.abs(r - 1)) < 1e-9
    assert np.max(np.abs(s.points[:, 2:])) == 0.0


def test_cylinder_trace_with_two_flows():
    s = trace_leaf(get_model("c1-i0").normal_form, (1, 0, 0, 0), ["x3", "x1"], 1e-3, 2000, model="c1-i0")
    assert len(s.points) == 4001
    assert np.max(np.abs(s.points[:, 0] ** 2 + s.points[:, 1] ** 2 - 1)) < 1e-6
    assert np.ptp(s.points[:, 2]) > 0.1


def _center_matrix(x):
    m = np.zeros((4, 4))
    m[0, 1], m[0, 2], m[1, 2] = x[2], -x[1], x[0]
    return m - m.T


def test_trace_with_callback_bivector():
    s = trace_leaf(_center_matrix, (0, 1, 0, 0), ["x3"], 1e-2, 100, casimir="x1^2+x2^2+x3^2")
    assert s.casimir_drift < 1e-9 and s.model is None


def test_trace_singular_start():
    with pytest.raises(ValueError, match="singular"):
        trace_leaf(CENTER, (0, 0, 0, 0), ["x3"], 1e-3, 10, model="c0-i0")


def test_trace_zero_steps():
    s = trace_leaf(CENTER, (0.5, 0.5, 0, 0), ["x3"], 1e-3, 0, model="c0-i0")
    assert s.points.shape == (1, 4)
    assert s.casimir_drift == 0.0


def test_trace_hits_singular_set():
    # on the stable line x1 = -x2 of the saddle the flow of x3 decays to the axis
    saddle = get_model("s1-i1").normal_form
    s = trace_leaf(saddle, (1, -1, 0, 0), ["x3"], 1e-2, 2000, model="s1-i1", singular_radius=1e-3)
    assert s.hit_singular
    assert len(s.points) < 2001
    assert get_model("s1-i1").singular_distance(s.points[-1]) < 1e-3


def test_trace_rejects_bad_step():
    with pytest.raises(ValueError):
        trace_leaf(CENTER, (1, 0, 0, 0), ["x3"], 0.0, 10)


def test_csv_and_sidecar(tmp_path):
    s = trace_leaf(CENTER, (1, 0, 0, 0), ["x3"], 1e-2, 50, model="c0-i0")
    side = s.write(tmp_path / "circle.csv")
    data = np.loadtxt(tmp_path / "circle.csv", delimiter=",", skiprows=1)
    assert np.array_equal(data, s.points)
    meta = json.loads(side.read_text())
    assert meta["model"] == "c0-i0" and meta["n_steps"] == 50 and meta["hamiltonians"] == ["1*x3"]
    assert meta["casimir_drift"] == s.casimir_drift
