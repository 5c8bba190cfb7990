import numpy as np
import pytest

from bmpoisson.verify import rel_err, run, random_off_axis_points


@pytest.mark.parametrize("suite", ["jacobi", "casimir", "cohomology", "glue"])
def test_suites_pass(suite):
    results = run(suite, n_triples=30)
    assert results and all(r.passed for r in results), [r.line() for r in results if not r.passed]


def test_symplectic_suite_names_the_failing_identity():
    results = {r.name: r for r in run("symplectic", n_points=20)}
    assert results["omega(u,v) = x1/(k sqrt(x1^2+x2^2)) on the frame"].passed
    assert not results["omega(u,v) = x1/(k sqrt(x1^2+x2^2)) * |u||v|"].passed
    assert results["circle trace returns, drift < 1e-9"].passed


def test_unknown_suite():
    with pytest.raises(ValueError):
        run("bogus")


def test_same_seed_same_results():
    assert run("jacobi", seed=3, n_triples=20) == run("jacobi", seed=3, n_triples=20)


def test_rel_err():
    assert rel_err(1.0, 1.0) == 0.0
    assert rel_err(0.0, 0.0) == 0.0
    assert rel_err(2.0, 1.0) == 0.5


def test_off_axis_points():
    pts = random_off_axis_points(np.random.default_rng(0), 100, min_axis=0.5)
    assert pts.shape == (100, 4)
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) >= 0.5)
