"""Independent brute-force verification of built trajectories.

Projecting every polytope vertex to (target, cost) gives a polygon whose
lower boundary is the minimal cost function; comparing that envelope with
the constructed trajectory, and sampling random doubly-stochastic images
of the spectrum, falsifies the construction without sharing any code path
with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, DimensionTooLarge

ALPHA_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class InducedPolygon:
    """Image of the population polytope under (target, cost).

    points: all projected vertices, one (alpha, eps) row each
    hull: convex hull cycle, counter-clockwise
    lower_envelope: (alpha, eps) breakpoints of the lower boundary
    """

    points: np.ndarray
    hull: np.ndarray
    lower_envelope: np.ndarray
    upper_envelope: np.ndarray

    @property
    def alpha_min(self) -> float:
        return float(self.lower_envelope[0, 0])

    @property
    def alpha_max(self) -> float:
        return float(self.lower_envelope[-1, 0])


@dataclass(frozen=True)
class AuditReport:
    n_samples: int
    violations: int
    min_slack: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _half_hull(pts) -> list:
    chain: list = []
    for p in pts:
        while len(chain) > 1 and _cross(chain[-2], chain[-1], p) <= 0.0:
            chain.pop()
        chain.append(p)
    return chain


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counter-clockwise; collinear points dropped."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return np.array(pts)
    bottom = _half_hull(pts)
    top = _half_hull(reversed(pts))
    return np.array(bottom[:-1] + top[:-1])


def induced_polygon(vertices, a, e) -> InducedPolygon:
    """Project vertices (rows, input basis) to (target, cost) and take hulls.

    Accepts a VertexSet or a plain (N, d) array. At equal alpha only the
    lower cost enters the lower envelope (it is a function of alpha).
    """
    verts = getattr(vertices, "vertices", vertices)
    verts = np.asarray(verts, dtype=float)
    alphas = verts @ np.asarray(a, dtype=float)
    costs = verts @ np.asarray(e, dtype=float)
    points = np.column_stack([alphas, costs])

    order = np.lexsort((costs, alphas))
    lo_pts, hi_pts = [], []
    for idx in order:
        al, ep = alphas[idx], costs[idx]
        if lo_pts and al == lo_pts[-1][0]:
            hi_pts[-1] = (al, max(hi_pts[-1][1], ep))
            continue
        lo_pts.append((al, ep))
        hi_pts.append((al, ep))
    if len(lo_pts) == 1:
        lower = np.array(lo_pts)
        upper = np.array(hi_pts)
        hull = np.array(sorted({tuple(p) for p in (lo_pts + hi_pts)}))
    else:
        lower = np.array(_half_hull(lo_pts))
        upper = np.array(_half_hull(list(reversed(hi_pts))))[::-1]
        hull = convex_hull(points)
    return InducedPolygon(
        points=points, hull=hull, lower_envelope=lower, upper_envelope=upper
    )


def envelope_min_cost(poly: InducedPolygon, alpha: float) -> float:
    """Linear interpolation on the lower envelope."""
    lo, hi = poly.alpha_min, poly.alpha_max
    if alpha < lo - ALPHA_TOL or alpha > hi + ALPHA_TOL:
        raise AlphaOutOfRange(f"alpha {alpha!r} outside [{lo!r}, {hi!r}]")
    alpha = min(max(alpha, lo), hi)
    env = poly.lower_envelope
    return float(np.interp(alpha, env[:, 0], env[:, 1]))


def _random_mixture(d: int, n_perms: int, rng) -> np.ndarray:
    weights = rng.dirichlet(np.ones(n_perms))
    out = np.zeros((d, d))
    for w in weights:
        perm = rng.permutation(d)
        out[np.arange(d), perm] += w
    return out


def sample_doubly_stochastic(d: int, n_perms: int, seed) -> np.ndarray:
    """Convex mix of n_perms uniform permutations with Dirichlet(1) weights.

    Not uniform on the doubly-stochastic polytope; adequate for
    falsification sampling. Deterministic per seed.
    """
    if d > 10:
        raise DimensionTooLarge(f"dim {d} exceeds sampling cap 10")
    return _random_mixture(d, n_perms, np.random.default_rng(seed))


def monte_carlo_audit(
    inst, traj, n_samples: int = 10_000, seed=0, tolerance: float = 1e-9
) -> AuditReport:
    """Random doubly-stochastic images must stay on or above the trajectory cost.

    Accepts a ProblemInstance or a GeneralizedInstance (sampling is then
    per conserved block). Violations are reported, not raised.
    """
    base = getattr(inst, "base", inst)
    blocks = getattr(getattr(inst, "structure", None), "blocks", None)
    lam = np.asarray(base.eigenvalues, dtype=float)
    a = np.asarray(base.target, dtype=float)
    e = np.asarray(base.cost, dtype=float)
    d = len(lam)
    rng = np.random.default_rng(seed)
    alphas = np.empty(n_samples)
    costs = np.empty(n_samples)
    for i in range(n_samples):
        p = np.empty(d)
        if blocks is None:
            n_perms = int(rng.integers(1, 2 * d + 1))
            p[:] = _random_mixture(d, n_perms, rng) @ lam
        else:
            for block in blocks:
                idx = np.asarray(block)
                if len(idx) == 1:
                    p[idx] = lam[idx]
                    continue
                n_perms = int(rng.integers(1, 2 * len(idx) + 1))
                p[idx] = _random_mixture(len(idx), n_perms, rng) @ lam[idx]
        alphas[i] = a @ p
        costs[i] = e @ p
    bp = traj.breakpoints
    clipped = np.clip(alphas, bp[0, 0], bp[-1, 0])
    omega = np.interp(clipped, bp[:, 0], bp[:, 1])
    slack = costs - omega
    return AuditReport(
        n_samples=n_samples,
        violations=int(np.sum(slack < -tolerance)),
        min_slack=float(slack.min()),
        tolerance=tolerance,
    )
