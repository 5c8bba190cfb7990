"""Symplectic leaves of the local models: tangent frames, the leafwise
symplectic form, and leaf tracing by Hamiltonian flows."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .models import LocalModel, get_model
from .multivector import BivectorMatrix, MultiVector, as_matrix, rank_of_matrix
from .poly import Polynomial

FRAME_TOL = 1e-10
IMAGE_TOL = 1e-8


@dataclass(frozen=True)
class LeafFrame:
    u: tuple
    v: tuple
    point: tuple
    # True when the published frame row had to be sign-corrected at this point
    corrected: bool = False


def _uv_rows(code: str, x, saddle_sign: float):
    x1, x2, x3 = x[0], x[1], x[2]
    r2 = x1 * x1 + x2 * x2
    r = math.sqrt(r2)
    if code in ("s0-i1", "s1-i1"):
        u = (x2 / r, x1 / r, 0.0, 0.0)
    else:
        u = (-x2 / r, x1 / r, 0.0, 0.0)
    if code in ("c0-i0", "c0-i3"):
        v = (-x1 * x1 * x3 / r2, -x1 * x2 * x3 / r2, x1, 0.0)
    elif code == "s0-i1":
        v = (saddle_sign * x1 * x1 * x3 / r2, -saddle_sign * x1 * x2 * x3 / r2, x1, 0.0)
    elif code == "s0-i2":
        v = (saddle_sign * x1 * x1 * x3 / r2, saddle_sign * x1 * x2 * x3 / r2, x1, 0.0)
    else:
        v = (0.0, 0.0, x1, 0.0)
    return u, v


def _check_axis(point):
    if point[0] == 0.0 and point[1] == 0.0:
        raise ValueError("frame undefined on axis")


def table5_vectors(model, point):
    """The (u, v) row of the published tangent-frame table, transcribed verbatim."""
    code = get_model(model).code
    point = tuple(float(c) for c in point)
    _check_axis(point)
    # the published saddle rows carry a -1/(x1^2+x2^2) prefactor
    return _uv_rows(code, point, -1.0)


def leaf_frame(model, point) -> LeafFrame:
    """Orthogonal tangent frame to the leaf through ``point``.

    The isolated-saddle rows of the published table are not annihilated by
    dC1; for those the prefactor sign is flipped, which makes them tangent.
    """
    m = get_model(model)
    point = tuple(float(c) for c in point)
    _check_axis(point)
    u, v = _uv_rows(m.code, point, 1.0)
    corrected = (u, v) != _uv_rows(m.code, point, -1.0)
    frame = LeafFrame(u=u, v=v, point=point, corrected=corrected)
    violations = frame_violations(m, frame)
    if violations:
        raise ArithmeticError(f"frame invariant violated at {point}: {violations}")
    return frame


@lru_cache(maxsize=None)
def _casimir_gradients(code: str):
    return tuple(tuple(c.gradient()) for c in get_model(code).casimirs)


@lru_cache(maxsize=None)
def _normal_matrix(code: str) -> BivectorMatrix:
    return as_matrix(get_model(code).normal_form)


def frame_violations(model, frame: LeafFrame, tol: float = FRAME_TOL) -> list:
    """Names of LeafFrame invariants that fail (empty when the frame is valid)."""
    m = get_model(model)
    x = np.asarray(frame.point)
    u, v = np.asarray(frame.u), np.asarray(frame.v)
    bad = []
    for n, dc in enumerate(_casimir_gradients(m.code), start=1):
        grad = np.array([g.evaluate(x) for g in dc])
        scale = 1.0 + np.linalg.norm(grad)
        if abs(grad @ u) > tol * scale:
            bad.append(f"dC{n}(u) != 0")
        if abs(grad @ v) > tol * scale:
            bad.append(f"dC{n}(v) != 0")
    if abs(u @ v) > tol * (1.0 + np.linalg.norm(u) * np.linalg.norm(v)):
        bad.append("u not orthogonal to v")
    return bad


# -- the leafwise symplectic form ------------------------------------------------

def _matrix_at(pi, point) -> np.ndarray:
    x = np.asarray(point, dtype=float)
    if isinstance(pi, np.ndarray):
        return pi
    if isinstance(pi, (MultiVector, BivectorMatrix)):
        return as_matrix(pi).evaluate(x)
    return np.asarray(pi(x), dtype=float)


def symplectic_eval(pi, point, u, v) -> float:
    """omega(u, v) = <alpha, v> where B(alpha) = u, alpha of minimum norm.

    ``pi`` may be a polynomial bivector, a numeric matrix callback, or an
    already evaluated 4x4 matrix.
    """
    m = _matrix_at(pi, point)
    if rank_of_matrix(m) == 0:
        raise ValueError("singular point")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    alpha, *_ = np.linalg.lstsq(m, u, rcond=None)
    scale = 1.0 + np.linalg.norm(u)
    if np.linalg.norm(m @ alpha - u) > IMAGE_TOL * scale:
        raise ValueError("vector not tangent to leaf")
    beta, *_ = np.linalg.lstsq(m, v, rcond=None)
    if np.linalg.norm(m @ beta - v) > IMAGE_TOL * (1.0 + np.linalg.norm(v)):
        raise ValueError("vector not tangent to leaf")
    return float(alpha @ v)


def proposition_form(model, k_value: float, point, area: str = "euclidean") -> float:
    """x1 / (k sqrt(x1^2 + x2^2)) times an area form on the leaf frame.

    ``area="euclidean"`` uses the metric area |u||v| of the orthogonal frame;
    ``area="frame"`` uses the area form normalized to 1 on that frame.
    """
    if k_value == 0:
        raise ValueError("k must be nonzero")
    frame = leaf_frame(model, point)
    x1, x2 = frame.point[0], frame.point[1]
    density = x1 / (k_value * math.sqrt(x1 * x1 + x2 * x2))
    if area == "frame":
        return density
    if area != "euclidean":
        raise ValueError(f"unknown area normalization {area!r}")
    return density * float(np.linalg.norm(frame.u) * np.linalg.norm(frame.v))


def model_symplectic_eval(model, k_value: float, point) -> float:
    """symplectic_eval of k * (model normal form) on the model's leaf frame."""
    m = get_model(model)
    frame = leaf_frame(m, point)
    mat = k_value * _normal_matrix(m.code).evaluate(frame.point)
    return symplectic_eval(mat, frame.point, frame.u, frame.v)


# -- leaf tracing ---------------------------------------------------------------------

def _fast_matrix(pi):
    """Point-wise evaluator for a polynomial bivector using plain floats."""
    entries = []
    for (i, j), c in as_matrix(pi).to_multivector().terms.items():
        entries.append((i - 1, j - 1, [(float(v), m) for m, v in c.terms.items()]))

    def evaluate(x):
        out = np.zeros((4, 4))
        for i, j, terms in entries:
            s = 0.0
            for coef, mono in terms:
                p = coef
                for k, e in enumerate(mono):
                    if e:
                        p *= x[k] ** e
                s += p
            out[i, j] = s
            out[j, i] = -s
        return out

    return evaluate


@dataclass
class LeafSample:
    points: np.ndarray
    casimir_drift: float
    model: str | None = None
    hit_singular: bool = False
    hamiltonians: list = field(default_factory=list)
    step: float = 0.0
    n_steps: int = 0

    def write(self, csv_path) -> Path:
        """Write the CSV trace and its JSON sidecar; returns the sidecar path."""
        csv_path = Path(csv_path)
        np.savetxt(csv_path, self.points, delimiter=",", header="x1,x2,x3,t", comments="", fmt="%.17g")
        sidecar = csv_path.with_suffix(".json")
        sidecar.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return sidecar

    def sidecar(self) -> dict:
        return {
            "model": self.model,
            "hamiltonians": list(self.hamiltonians),
            "step": self.step,
            "n_steps": self.n_steps,
            "casimir_drift": self.casimir_drift,
            "hit_singular": self.hit_singular,
        }

    def return_distance(self, min_excursion: float = 1e-2) -> float:
        """Closest approach of the piecewise-linear trajectory to its start,
        after it has first moved ``min_excursion`` away."""
        pts = self.points
        d = np.linalg.norm(pts - pts[0], axis=1)
        away = np.nonzero(d > min_excursion)[0]
        if away.size == 0:
            return float("inf")
        seg_a, seg_b = pts[away[0]:-1], pts[away[0] + 1:]
        if len(seg_a) == 0:
            return float(d[away[0]])
        ab = seg_b - seg_a
        denom = np.einsum("ij,ij->i", ab, ab)
        s = np.where(denom > 0, np.einsum("ij,ij->i", pts[0] - seg_a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
        s = np.clip(s, 0.0, 1.0)
        closest = seg_a + s[:, None] * ab
        return float(np.min(np.linalg.norm(closest - pts[0], axis=1)))


def trace_leaf(
    pi,
    start,
    hamiltonians,
    step: float,
    n_steps: int,
    casimir=None,
    model=None,
    singular_radius: float = 1e-6,
) -> LeafSample:
    """Follow X_h = B(dh) for each Hamiltonian in turn with classical RK4.

    ``pi`` is a polynomial bivector or a callback x -> 4x4 matrix.  Integration
    stops early, with ``hit_singular`` set, once the trajectory comes within
    ``singular_radius`` of the rank-0 set.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    lm: LocalModel | None = get_model(model) if model is not None else None
    if isinstance(pi, (MultiVector, BivectorMatrix)):
        mat = _fast_matrix(pi)
    else:
        mat = pi
    if casimir is None and lm is not None:
        casimir = lm.casimirs[0]
    hams = [Polynomial.coerce(h) for h in hamiltonians]
    grads = [h.gradient() for h in hams]

    if lm is not None:
        def near_singular(x):
            return float(lm.singular_distance(x)) < singular_radius
    else:
        def near_singular(x):
            return float(np.max(np.abs(mat(x)))) < singular_radius

    x = np.asarray(start, dtype=float).copy()
    if near_singular(x):
        raise ValueError("start point lies on the singular set")

    points = [x.copy()]
    hit = False
    for grad in grads:
        def field_at(y, grad=grad):
            return mat(y) @ np.array([g.evaluate(y) if not g.is_zero() else 0.0 for g in grad])

        for _ in range(n_steps):
            k1 = field_at(x)
            k2 = field_at(x + 0.5 * step * k1)
            k3 = field_at(x + 0.5 * step * k2)
            k4 = field_at(x + step * k3)
            x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            points.append(x.copy())
            if near_singular(x):
                hit = True
                break
        if hit:
            break

    pts = np.array(points)
    drift = 0.0
    if casimir is not None:
        casimir = Polynomial.coerce(casimir)
        vals = np.asarray(casimir.evaluate(pts))
        drift = float(np.max(np.abs(vals - vals[0])))
    return LeafSample(
        points=pts,
        casimir_drift=drift,
        model=lm.code if lm is not None else None,
        hit_singular=hit,
        hamiltonians=[str(h) for h in hams],
        step=step,
        n_steps=n_steps,
    )
