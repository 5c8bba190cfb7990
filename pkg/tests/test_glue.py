import numpy as np
import pytest

from bmpoisson.glue import (
    Cutoff,
    GluedStructure,
    Grid,
    glue,
    glue_report,
    jacobiator_at,
    jacobiator_grid,
    rank_profile,
    smooth_bump,
    transition_g,
)
from bmpoisson.models import MODEL_CODES, get_model
from bmpoisson.multivector import as_matrix

CENTER = get_model("c0-i0").normal_form
center_matrix = as_matrix(CENTER).evaluate


def test_bump_examples():
    b = smooth_bump(1, 2)
    assert b(0.5) == 1.0
    assert b(3.0) == 0.0
    assert 0.0 < b(1.5) < 1.0
    r = np.linspace(1.0, 2.0, 201)
    assert np.all(np.diff(b(r)) <= 0)
    # strictly decreasing wherever doubles can resolve it
    inner = np.linspace(1.1, 1.9, 161)
    assert np.all(np.diff(b(inner)) < 0)
    assert b(1.0) == 1.0 and b(2.0) == 0.0


@pytest.mark.parametrize("r0,r1", [(2, 1), (1, 1), (0, 1), (-1, 1)])
def test_bump_rejects_bad_radii(r0, r1):
    with pytest.raises(ValueError):
        smooth_bump(r0, r1)


def test_transition_g_examples():
    p = (0.3, -0.2, 0.7, 0.1)
    assert transition_g(CENTER, lambda x: 0.5 * center_matrix(x), p) == pytest.approx(2.0)
    assert transition_g(CENTER, CENTER, p) == pytest.approx(1.0)
    other = as_matrix(get_model("s0-i1").normal_form).evaluate
    with pytest.raises(ValueError, match="foliations disagree at point"):
        transition_g(CENTER, other, p)


def test_glue_cases():
    gs = GluedStructure.tubes("c0-i0", r0=0.5, r1=1.0)
    inside = np.array([0.1, 0.2, -0.1, 0.3])
    outside = np.array([0.9, 0.8, 0.1, -0.5])
    assert np.array_equal(glue(gs, inside), center_matrix(inside))
    assert np.array_equal(glue(gs, outside), gs.pi_f(outside))


def test_glue_collapses_when_g_is_one():
    cut = Cutoff(sigma=lambda x: np.full(np.shape(x)[:-1], 0.3), rho=lambda x: np.full(np.shape(x)[:-1], 0.7))
    gs = GluedStructure.tubes("c0-i0", k_f=lambda x: np.ones(np.shape(x)[:-1]), cutoff=cut)
    pts = np.random.default_rng(0).uniform(-1, 1, size=(200, 4))
    d = gs.singular_distance(pts)
    overlap = pts[(d > 0.5) & (d < 1.0)]
    assert len(overlap) > 10
    assert np.allclose(glue(gs, overlap), gs.pi_f(overlap), rtol=0, atol=1e-15)


def test_agreement_zones_random_radii():
    rng = np.random.default_rng(1)
    for _ in range(10):
        r0 = rng.uniform(0.2, 0.6)
        r1 = r0 + rng.uniform(0.1, 0.5)
        gs = GluedStructure.tubes("c1-i0", r0=r0, r1=r1)
        pts = rng.uniform(-1.5, 1.5, size=(500, 4))
        d = gs.singular_distance(pts)
        vals = glue(gs, pts)
        ref_s = as_matrix(gs.pi_s).evaluate(pts)
        ref_f = gs.pi_f(pts)
        assert np.array_equal(vals[d <= r0], ref_s[d <= r0])
        assert np.array_equal(vals[d >= r1], ref_f[d >= r1])
        sig = gs.cutoff.sigma(pts)
        rho = gs.cutoff.rho(pts)
        assert np.all(sig >= 0) and np.all(rho >= 0)
        assert np.allclose(sig + rho, 1.0)
        # on the overlap the weight is nonnegative and pi_S = g pi_F
        mid = (d > r0) & (d < r1)
        assert np.all(gs.interpolation_weight(pts[mid]) >= 0)
        g = gs.g(pts[mid])
        assert np.allclose(g[..., None, None] * ref_f[mid], ref_s[mid])


@pytest.mark.parametrize("code", MODEL_CODES)
def test_pure_model_jacobiator(code):
    mat = as_matrix(get_model(code).normal_form).evaluate
    assert jacobiator_grid(mat, Grid.cube(-1, 1, 11), h=1e-4) < 1e-8


def test_glued_center_jacobiator():
    gs = GluedStructure.tubes("c0-i0")
    assert jacobiator_grid(gs, Grid.cube(-1, 1, 21)) < 1e-6


def test_glued_cylinder_jacobiator():
    gs = GluedStructure.tubes("c1-i0", r0=0.4, r1=0.9)
    assert jacobiator_grid(gs, Grid.cube(-1, 1, 13)) < 1e-6


def test_conformal_jump_stays_poisson():
    # a jump in sigma only rescales a rank-2 structure, which keeps it Poisson
    def sigma(x):
        return (np.linalg.norm(np.asarray(x)[..., :3], axis=-1) < 0.7).astype(float)

    gs = GluedStructure.tubes("c0-i0", cutoff=Cutoff(sigma=sigma, rho=lambda x: 1.0 - sigma(x)))
    assert jacobiator_grid(gs, Grid.cube(-1, 1, 21)) < 1e-6


def test_broken_glue_reports_large_value():
    # pi_F from another model: the pieces disagree across the sphere r = 0.7,
    # which passes through grid points such as (0.2, 0.3, 0.6, t)
    other = as_matrix(get_model("s0-i1").normal_form).evaluate
    gs = GluedStructure.tubes("c0-i0", r0=0.7, pi_f=other)
    value = jacobiator_grid(gs, Grid.cube(-1, 1, 21))
    assert value > 1.0
    assert gs.params["pi_f"] == "custom"


def test_jacobiator_at_detects_nonpoisson():
    def bad(x):
        m = np.zeros(np.shape(x)[:-1] + (4, 4))
        m[..., 0, 1] = 1.0
        m[..., 2, 3] = x[..., 0]
        return m - np.swapaxes(m, -1, -2)

    vals = jacobiator_at(bad, np.array([[0.1, 0.2, 0.3, 0.4]]))
    assert vals[0] == pytest.approx(1.0)


def test_rank_profile_center():
    gs = GluedStructure.tubes("c0-i0")
    prof = rank_profile(gs, Grid.cube(-1, 1, 11))
    assert prof["[0, 1e-09)"] == {0: 11}
    assert all(set(h) == {2} for b, h in prof.items() if b != "[0, 1e-09)")


def test_rank_profile_zero_bivector():
    prof = rank_profile(lambda x: np.zeros(np.shape(x)[:-1] + (4, 4)), Grid.cube(-1, 1, 5))
    assert all(set(h) == {0} for h in prof.values())


def test_glue_report_shape():
    gs = GluedStructure.tubes("c0-i0")
    rep = glue_report(gs, Grid.cube(-1, 1, 5))
    assert set(rep) == {"max_jacobiator", "rank_histogram", "params"}
    assert rep["params"]["grid"] == ["-1:1:5"] * 4


def test_grid_parse():
    assert Grid.parse("-1:1:21") == Grid.cube(-1, 1, 21)
    g = Grid.parse(["0:1:2", "0:1:3", "0:0:1", "-1:1:2"])
    assert g.points().shape == (12, 4)
    for bad in ("1:2", "a:b:c", "0:1:0"):
        with pytest.raises(ValueError):
            Grid.parse(bad)
    with pytest.raises(ValueError):
        Grid.parse(["0:1:2", "0:1:2"])
