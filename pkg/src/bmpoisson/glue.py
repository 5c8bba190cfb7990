"""Numeric gluing of a local singular model to a regular rank-2 structure.

On the overlap of the tubes W and U_S the glued bivector is
(g*sigma + rho) * pi_F, where pi_S = g * pi_F there; it equals pi_S on the
closed inner tube and pi_F outside U_S.  Everything here is vectorized over
points of shape (..., 4).
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .models import LocalModel, get_model
from .multivector import MultiVector, as_matrix, rank_of_matrix


# -- cutoffs -------------------------------------------------------------------

def _psi(x):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, monotone in between."""
    a = _psi(x)
    return a / (a + _psi(1.0 - x))


def smooth_bump(r0: float, r1: float) -> Callable:
    """Radial cutoff equal to 1 for r <= r0 and 0 for r >= r1."""
    if not 0 < r0 < r1:
        raise ValueError(f"need 0 < r0 < r1, got r0={r0}, r1={r1}")

    def bump(r):
        r = np.asarray(r, dtype=float)
        out = smooth_step((r1 - r) / (r1 - r0))
        return float(out) if out.ndim == 0 else out

    return bump


@dataclass(frozen=True)
class Region:
    label: str
    predicate: Callable


@dataclass(frozen=True)
class Cutoff:
    sigma: Callable
    rho: Callable


# -- proportionality factor ------------------------------------------------------

PROPORTIONALITY_TOL = 1e-8


def _ratio(s, f):
    num = np.einsum("...ij,...ij->...", s, f)
    den = np.einsum("...ij,...ij->...", f, f)
    return num / np.where(den > 0, den, 1.0), den


def transition_g(pi_s, pi_f, point) -> float:
    """Least-squares g with pi_S = g * pi_F at ``point``."""
    x = np.asarray(point, dtype=float)
    s = pi_s(x) if callable(pi_s) and not isinstance(pi_s, MultiVector) else as_matrix(pi_s).evaluate(x)
    f = pi_f(x) if callable(pi_f) and not isinstance(pi_f, MultiVector) else as_matrix(pi_f).evaluate(x)
    g, den = _ratio(s, f)
    if den == 0:
        raise ValueError("foliations disagree at point")
    resid = np.linalg.norm(s - g * f)
    if resid > PROPORTIONALITY_TOL * (1.0 + np.linalg.norm(s)):
        raise ValueError("foliations disagree at point")
    return float(g)


# -- glued structure ----------------------------------------------------------------

@dataclass(frozen=True)
class GluedStructure:
    pi_s: MultiVector
    pi_f: Callable
    g: Callable
    regions: dict
    cutoff: Cutoff
    params: dict = field(default_factory=dict)

    @classmethod
    def tubes(
        cls,
        model="c0-i0",
        k_f: Callable | None = None,
        r0: float = 0.5,
        r1: float = 1.0,
        eps: float = 0.1,
        cutoff: Cutoff | None = None,
        pi_f: Callable | None = None,
    ) -> GluedStructure:
        """Concentric tubes around the singular set of ``model``:
        V_S = {r < r0}, U_S = {r < r1}, W = {r > r0 (1 - eps)}.

        pi_F is the model's normal form scaled by the positive function
        ``k_f`` (default ``1.5 + 0.25 * x1 + 0.25 * t``).  Passing a matrix
        callback as ``pi_f`` replaces it; g is then only a least-squares
        ratio and need not make the pieces agree.
        """
        lm: LocalModel = get_model(model)
        base = as_matrix(lm.normal_form).evaluate
        if k_f is None:
            def k_f(x):
                x = np.asarray(x, dtype=float)
                return 1.5 + 0.25 * x[..., 0] + 0.25 * x[..., 3]

        custom = pi_f is not None
        if not custom:
            def pi_f(x):
                return np.asarray(k_f(x))[..., None, None] * base(x)

        def g(x):
            s, f = base(x), pi_f(x)
            ratio, den = _ratio(s, f)
            return np.where(den > 0, ratio, 1.0)

        dist = lm.singular_distance
        r_w = r0 * (1.0 - eps)
        regions = {
            "V_S": Region("V_S", lambda x: dist(x) < r0),
            "U_S": Region("U_S", lambda x: dist(x) < r1),
            "W": Region("W", lambda x: dist(x) > r_w),
        }
        if cutoff is None:
            bump = smooth_bump(r0, r1)
            cutoff = Cutoff(sigma=lambda x: bump(dist(x)), rho=lambda x: 1.0 - bump(dist(x)))
        params = {"model": lm.code, "r0": r0, "r1": r1, "eps": eps, "k_f": getattr(k_f, "__doc__", None) or "default",
                  "pi_f": "custom" if custom else "scaled normal form"}
        return cls(pi_s=lm.normal_form, pi_f=pi_f, g=g, regions=regions, cutoff=cutoff, params=params)

    @property
    def model(self) -> LocalModel:
        return get_model(self.params["model"])

    def singular_distance(self, x):
        return self.model.singular_distance(x)

    def in_closure_v(self, x):
        return self.singular_distance(x) <= self.params["r0"]

    def interpolation_weight(self, x):
        return self.g(x) * self.cutoff.sigma(x) + self.cutoff.rho(x)


def glue(gs: GluedStructure, point) -> np.ndarray:
    """Evaluated glued bivector matrix at point(s) of shape (..., 4)."""
    x = np.asarray(point, dtype=float)
    s = as_matrix(gs.pi_s).evaluate(x)
    f = gs.pi_f(x)
    in_v = np.asarray(gs.in_closure_v(x))
    outside_u = ~np.asarray(gs.regions["U_S"].predicate(x))
    weight = np.asarray(gs.interpolation_weight(x))
    mixed = weight[..., None, None] * f
    out = np.where(in_v[..., None, None], s, np.where(outside_u[..., None, None], f, mixed))
    return out


# -- grids and diagnostics --------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    axes: tuple  # four (lo, hi, n) triples

    @classmethod
    def parse(cls, specs) -> Grid:
        """From ``"lo:hi:n"`` strings: one (used for all axes) or four."""
        if isinstance(specs, str):
            specs = [specs]
        axes = []
        for spec in specs:
            try:
                lo, hi, n = spec.split(":")
                axis = (float(lo), float(hi), int(n))
            except ValueError:
                raise ValueError(f"bad grid spec {spec!r}, expected lo:hi:n") from None
            if axis[2] < 1:
                raise ValueError(f"bad grid spec {spec!r}: n must be positive")
            axes.append(axis)
        if len(axes) == 1:
            axes = axes * 4
        if len(axes) != 4:
            raise ValueError("grid needs one or four lo:hi:n specs")
        return cls(tuple(axes))

    @classmethod
    def cube(cls, lo: float = -1.0, hi: float = 1.0, n: int = 21) -> Grid:
        return cls(((lo, hi, n),) * 4)

    def points(self) -> np.ndarray:
        lines = [np.linspace(lo, hi, n) for lo, hi, n in self.axes]
        mesh = np.meshgrid(*lines, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def spec(self) -> list:
        return [f"{lo:g}:{hi:g}:{n}" for lo, hi, n in self.axes]


def jacobiator_at(field_fn: Callable, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Largest |[P, P]^{ijk}| per point, derivatives by central differences.

    Uses J^{ijk} = sum_l P^{li} d_l P^{jk} + P^{lj} d_l P^{ki} + P^{lk} d_l P^{ij}.
    """
    x = np.asarray(x, dtype=float)
    p = field_fn(x)
    dp = np.empty((4,) + p.shape)
    for l in range(4):
        e = np.zeros(4)
        e[l] = h
        dp[l] = (field_fn(x + e) - field_fn(x - e)) / (2.0 * h)
    worst = np.zeros(x.shape[:-1])
    for i, j, k in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        jac = np.zeros(x.shape[:-1])
        for l in range(4):
            jac = jac + p[..., l, i] * dp[l][..., j, k] + p[..., l, j] * dp[l][..., k, i] + p[..., l, k] * dp[l][..., i, j]
        worst = np.maximum(worst, np.abs(jac))
    return worst


def jacobiator_grid(gs, grid: Grid, h: float = 1e-4, exclude: float = 1e-3, chunk: int = 20000) -> float:
    """Max finite-difference Jacobiator over grid points farther than
    ``exclude`` from the singular set.  ``gs`` is a GluedStructure or a
    vectorized matrix callback (then nothing is excluded)."""
    pts = grid.points()
    if isinstance(gs, GluedStructure):
        pts = pts[gs.singular_distance(pts) > exclude]
        field_fn = lambda y: glue(gs, y)  # noqa: E731
    else:
        field_fn = gs
    worst = 0.0
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        if len(block):
            worst = max(worst, float(np.max(jacobiator_at(field_fn, block, h))))
    return worst


DEFAULT_BUCKETS = (0.0, 1e-9, 0.25, 0.5, 1.0, 2.0, np.inf)


def _bucket_label(lo, hi):
    return f"[{lo:g}, {hi:g})"


def rank_profile(gs, grid: Grid, edges=DEFAULT_BUCKETS, distance: Callable | None = None) -> dict:
    """Rank histogram per distance-to-singular-set bucket."""
    pts = grid.points()
    if isinstance(gs, GluedStructure):
        mats = glue(gs, pts)
        dist = gs.singular_distance(pts)
    else:
        mats = gs(pts)
        dist = distance(pts) if distance is not None else np.linalg.norm(pts[..., :3], axis=-1)
    ranks = np.atleast_1d(rank_of_matrix(mats))
    profile = {}
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (dist >= lo) & (dist < hi)
        if np.any(mask):
            profile[_bucket_label(lo, hi)] = dict(sorted(Counter(int(r) for r in ranks[mask]).items()))
    return profile


def glue_report(gs: GluedStructure, grid: Grid, h: float = 1e-4, exclude: float = 1e-3) -> dict:
    return {
        "max_jacobiator": jacobiator_grid(gs, grid, h=h, exclude=exclude),
        "rank_histogram": rank_profile(gs, grid),
        "params": {**gs.params, "grid": grid.spec(), "h": h, "exclude": exclude},
    }
