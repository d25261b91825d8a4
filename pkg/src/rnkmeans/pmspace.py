"""Probabilistic metric space primitives.

A distance distribution function (DDF) assigns to a vector p a
non-decreasing map t -> [0, 1], read as the probability that the norm of
p is below t.  The family used throughout this package is the ratio
family

    Gamma_p(t) = t / (t + ||p||)   for t > 0,   Gamma_p(0) = 0,

which is strictly decreasing in ||p|| for fixed t > 0.  This module
provides the family itself, unit-step DDFs, the three classic t-norms,
a grid sup-convolution (the triangle product for tabulated DDFs), and a
numeric checker for the three random-normed-space axioms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from rnkmeans.rng import Xoshiro256


class TNorm(Enum):
    """Binary triangular norms on [0, 1]."""

    MIN = "min"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"


def _maybe_scalar(out, *inputs):
    if all(np.isscalar(v) or getattr(v, "ndim", 1) == 0 for v in inputs):
        return float(out)
    return out


def tnorm_apply(norm, x, y):
    """Apply a t-norm elementwise; arguments must lie in [0, 1]."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    for name, v in (("x", xa), ("y", ya)):
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError(f"{name} outside [0, 1]")
    if norm is TNorm.MIN:
        out = np.minimum(xa, ya)
    elif norm is TNorm.PRODUCT:
        out = xa * ya
    elif norm is TNorm.LUKASIEWICZ:
        out = np.maximum(xa + ya - 1.0, 0.0)
    else:
        raise ValueError(f"unknown t-norm {norm!r}")
    return _maybe_scalar(out, x, y)


def gamma_ddf(norm_value, t):
    """Ratio DDF: t / (t + norm_value) for t > 0, 0 at t = 0.

    Vectorized over either argument (numpy broadcasting).
    """
    r = np.asarray(norm_value, dtype=np.float64)
    tt = np.asarray(t, dtype=np.float64)
    if np.any(r < 0.0):
        raise ValueError("norm_value must be nonnegative")
    if np.any(tt < 0.0):
        raise ValueError("t must be nonnegative")
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(tt > 0.0, tt / (tt + r), 0.0)
    return _maybe_scalar(out, norm_value, t)


@dataclass(frozen=True)
class StepDDF:
    """Unit step at a: 0 on [0, a], 1 on (a, infinity)."""

    a: float

    def __post_init__(self):
        if not self.a >= 0.0:
            raise ValueError("threshold must be nonnegative")

    def __call__(self, x):
        xa = np.asarray(x, dtype=np.float64)
        if np.any(xa < 0.0):
            raise ValueError("step DDFs are defined on [0, infinity)")
        out = np.where(xa > self.a, 1.0, 0.0)
        return _maybe_scalar(out, x)


@dataclass(frozen=True)
class DistanceDistributionFamily:
    """A family p -> Gamma_p evaluated through the norm of p.

    ``fn(norm_value, t)`` must be numpy-vectorized.  The shipped family is
    GAMMA_RATIO; tests construct deliberately broken families to exercise
    the axiom checker.
    """

    name: str
    fn: Callable

    def evaluate(self, norm_value, t):
        return self.fn(norm_value, t)


GAMMA_RATIO = DistanceDistributionFamily("gamma-ratio", gamma_ddf)


def _validate_tabulated(values, grid, name):
    v = np.asarray(values, dtype=np.float64)
    if v.shape != grid.shape:
        raise ValueError(f"{name} has {v.shape[0] if v.ndim == 1 else '?'} "
                         f"values for a grid of {grid.shape[0]}")
    if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
        raise ValueError(f"{name} has values outside [0, 1]")
    if np.any(np.diff(v) < -1e-12):
        raise ValueError(f"{name} is not non-decreasing")
    return np.clip(v, 0.0, 1.0)


def sup_convolution(f, g, norm, grid):
    """Triangle product of two tabulated DDFs on a shared uniform grid.

    pi(f, g)(t) = sup { H(f(s), g(u)) : s + u = t } restricted to grid
    pairs; a pair (grid[i], grid[j]) is feasible for target t when its sum
    lies within one grid step of t, which is the coarsest reading that
    keeps the continuum identities exact on the grid (in particular
    pi(f, eps_0) = f and pi(eps_a, eps_b) = eps_{a+b} for grid-aligned
    thresholds).  O(G^2) overall and fully deterministic.

    f and g may be arrays tabulated on ``grid`` or callables (tabulated
    here).  Targets with no feasible pair (possible when the grid starts
    far from zero) get 0.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.shape[0] < 2:
        raise ValueError("grid must be 1-d with at least two points")
    if grid[0] < 0.0:
        raise ValueError("grid must be nonnegative")
    steps = np.diff(grid)
    if np.any(steps <= 0.0):
        raise ValueError("grid must be strictly increasing")
    h = float(steps[0])
    if np.any(np.abs(steps - h) > 1e-9 * h):
        raise ValueError("grid must be uniformly spaced")
    fv = _validate_tabulated(f(grid) if callable(f) else f, grid, "f")
    gv = _validate_tabulated(g(grid) if callable(g) else g, grid, "g")

    m = grid.shape[0]
    hm = tnorm_apply(norm, fv[:, None], gv[None, :])
    # max of H over each antidiagonal i + j = s
    diag_max = np.empty(2 * m - 1)
    flipped = hm[:, ::-1]
    for s in range(2 * m - 1):
        diag_max[s] = np.max(np.diagonal(flipped, offset=m - 1 - s))

    # pair (i, j) feasible for target index q iff
    # |(grid[i] + grid[j]) - grid[q]| = |grid[0] + (i + j - q) h| <= h
    r0 = grid[0] / h
    out = np.zeros(m)
    for q in range(m):
        lo = max(0, math.ceil(q - r0 - 1.0 - 1e-9))
        hi = min(2 * m - 2, math.floor(q - r0 + 1.0 + 1e-9))
        if lo <= hi:
            out[q] = np.max(diag_max[lo:hi + 1])
    return out


@dataclass(frozen=True)
class AxiomCheck:
    """Outcome of one axiom: pass flag, worst violation measure, witness.

    The violation measure is the largest signed exceedance of the axiom's
    inequality on the sample; see check_random_norm_axioms for the exact
    measure used per axiom.  The witness is a dict locating the worst case.
    """

    name: str
    passed: bool
    worst_violation: float
    witness: dict


@dataclass(frozen=True)
class AxiomReport:
    family: str
    tnorm: TNorm
    tol: float
    n_points: int
    n_pairs: int
    triangle: AxiomCheck
    scaling: AxiomCheck
    nullity: AxiomCheck

    @property
    def passed(self):
        return self.triangle.passed and self.scaling.passed and self.nullity.passed

    def checks(self):
        return (self.triangle, self.scaling, self.nullity)


def check_random_norm_axioms(points, t_grid, tol,
                             family=GAMMA_RATIO, tnorm=TNorm.PRODUCT,
                             alphas=(-2.0, -0.5, 0.5, 3.0),
                             max_pairs=1000, seed=0):
    """Numerically verify the random-normed-space axioms on a point set.

    Checks, on every sampled pair (p, q) and grid pair (t, t'):

    * triangle:   Gamma_{p+q}(t + t') >= H(Gamma_p(t), Gamma_q(t')) - tol;
                  violation measure is max(rhs - lhs)
    * scaling:    |Gamma_{alpha p}(t) - Gamma_p(t / |alpha|)| <= tol for
                  every point and every alpha in ``alphas``; measure is the
                  max absolute difference
    * nullity:    Gamma_p is the unit step at zero iff p = 0: zero points
                  must have Gamma = 1 at every grid t within tol, nonzero
                  points must stay at or below 1 - tol at every grid t
                  (a nonzero point whose Gamma touches 1 within tol is
                  indistinguishable from the step on this grid); measure
                  is max over points of the relevant exceedance

    All index pairs (i <= j) are checked when their count is at most
    ``max_pairs``; otherwise ``max_pairs`` pairs are drawn with the pinned
    generator under ``seed``.  Returns an AxiomReport with per-axiom
    worst violations and witnesses.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a nonempty 2-d array")
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.shape[0] < 1:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(grid <= 0.0) or not np.all(np.isfinite(grid)):
        raise ValueError("t_grid values must be positive and finite")
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")

    n = pts.shape[0]
    total_pairs = n * (n + 1) // 2
    if total_pairs <= max_pairs:
        ii, jj = np.triu_indices(n)
    else:
        rng = Xoshiro256(seed)
        ii = np.array([rng.index(n) for _ in range(max_pairs)])
        jj = np.array([rng.index(n) for _ in range(max_pairs)])
    norms = np.linalg.norm(pts, axis=1)

    # triangle inequality over (pair) x (t) x (t')
    r1 = norms[ii]
    r2 = norms[jj]
    r12 = np.linalg.norm(pts[ii] + pts[jj], axis=1)
    g1 = family.evaluate(r1[:, None], grid[None, :])
    g2 = family.evaluate(r2[:, None], grid[None, :])
    rhs = tnorm_apply(tnorm, g1[:, :, None], g2[:, None, :])
    tsum = grid[:, None] + grid[None, :]
    lhs = family.evaluate(r12[:, None, None], tsum[None, :, :])
    viol = rhs - lhs
    flat = int(np.argmax(viol))
    pi, ti, tj = np.unravel_index(flat, viol.shape)
    tri_worst = float(viol[pi, ti, tj])
    triangle = AxiomCheck(
        "triangle", tri_worst <= tol, tri_worst,
        {"p_index": int(ii[pi]), "q_index": int(jj[pi]),
         "t": float(grid[ti]), "t_prime": float(grid[tj]),
         "lhs": float(lhs[pi, ti, tj]), "rhs": float(rhs[pi, ti, tj])})

    # scaling over (point) x (alpha) x (t)
    al = np.asarray(alphas, dtype=np.float64)
    if al.size == 0 or np.any(al == 0.0):
        raise ValueError("alphas must be nonempty and nonzero")
    scaled = family.evaluate(np.abs(al)[None, :, None] * norms[:, None, None],
                             grid[None, None, :])
    shrunk = family.evaluate(norms[:, None, None],
                             grid[None, None, :] / np.abs(al)[None, :, None])
    sdiff = np.abs(scaled - shrunk)
    flat = int(np.argmax(sdiff))
    si, ai, ti = np.unravel_index(flat, sdiff.shape)
    sc_worst = float(sdiff[si, ai, ti])
    scaling = AxiomCheck(
        "scaling", sc_worst <= tol, sc_worst,
        {"p_index": int(si), "alpha": float(al[ai]), "t": float(grid[ti]),
         "lhs": float(scaled[si, ai, ti]), "rhs": float(shrunk[si, ai, ti])})

    # nullity over (point) x (t)
    gall = family.evaluate(norms[:, None], grid[None, :])
    zero = norms == 0.0
    null_passed = True
    null_worst = -math.inf
    null_witness = {}
    if np.any(zero):
        dev = np.abs(1.0 - gall[zero])
        flat = int(np.argmax(dev))
        zi, ti = np.unravel_index(flat, dev.shape)
        worst = float(dev[zi, ti])
        null_passed = null_passed and worst <= tol
        if worst > null_worst:
            null_worst = worst
            zidx = np.flatnonzero(zero)
            null_witness = {"p_index": int(zidx[zi]), "t": float(grid[ti]),
                            "gamma": float(gall[zero][zi, ti]), "kind": "zero-point"}
    if np.any(~zero):
        sat = gall[~zero] - (1.0 - tol)
        flat = int(np.argmax(sat))
        zi, ti = np.unravel_index(flat, sat.shape)
        worst = float(sat[zi, ti])
        null_passed = null_passed and worst <= 0.0
        if worst > null_worst:
            null_worst = worst
            nzidx = np.flatnonzero(~zero)
            null_witness = {"p_index": int(nzidx[zi]), "t": float(grid[ti]),
                            "gamma": float(gall[~zero][zi, ti]),
                            "kind": "nonzero-point"}
    nullity = AxiomCheck("nullity", null_passed, null_worst, null_witness)

    return AxiomReport(family.name, tnorm, float(tol), n, int(ii.shape[0]),
                       triangle, scaling, nullity)
