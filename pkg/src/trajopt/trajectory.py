"""Construction and evaluation of the optimal trajectory.

The trajectory starts at the vertex minimizing the target (cost-minimal
among those), then repeatedly applies the target-increasing swap of
adjacent-valued populations with the smallest cost-per-target gradient,
until no such swap remains. The resulting minimal cost is continuous,
piecewise linear and convex in the target value.

Vertices and step indices are stored in preferred-basis coordinates;
population vectors returned to callers are in the input basis.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .core import (
    COEFF_EPS,
    PreferredOrder,
    ProblemInstance,
    cluster_ranks,
    preferred_order,
)
from .errors import AlphaOutOfRange, NotAVertex

ALPHA_TOL = 1e-9  # absolute tolerance for range checks on the target value


@dataclass(frozen=True)
class SwapStep:
    """One two-level swap of the trajectory, in preferred-basis positions.

    Before the swap p[k] < p[l] and the target coefficient at k exceeds the
    one at l, so the swap raises the target by delta_alpha > 0 at cost slope
    `gradient`.
    """

    k: int
    l: int
    delta_alpha: float
    gradient: float
    alpha_start: float
    alpha_end: float


@dataclass(frozen=True, eq=False)
class MinimalCostFunction:
    """Piecewise-linear convex minimal cost on [alpha_min, alpha_max]."""

    alphas: np.ndarray
    omegas: np.ndarray

    @property
    def alpha_min(self) -> float:
        return float(self.alphas[0])

    @property
    def alpha_max(self) -> float:
        return float(self.alphas[-1])

    def __call__(self, alpha: float) -> float:
        alpha = _check_alpha(alpha, self.alpha_min, self.alpha_max)
        return float(np.interp(alpha, self.alphas, self.omegas))


@dataclass(frozen=True, eq=False)
class OptimalTrajectory:
    order: PreferredOrder
    target_pref: np.ndarray
    cost_pref: np.ndarray
    vertices: np.ndarray  # (n_steps + 1, d), preferred coordinates
    steps: tuple[SwapStep, ...]
    breakpoints: np.ndarray  # (n_steps + 1, 2) columns (alpha, omega)
    eps_pop: float
    eps_grad: float
    block_of_position: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.order.dim

    @property
    def alpha_min(self) -> float:
        return float(self.breakpoints[0, 0])

    @property
    def alpha_max(self) -> float:
        return float(self.breakpoints[-1, 0])

    @property
    def cost_function(self) -> MinimalCostFunction:
        return MinimalCostFunction(
            alphas=self.breakpoints[:, 0], omegas=self.breakpoints[:, 1]
        )

    def vertex_input(self, i: int) -> np.ndarray:
        """Vertex i as an input-basis population vector."""
        return self.order.to_input(self.vertices[i])

    def step_input_pair(self, step: SwapStep) -> tuple[int, int]:
        """The swapped pair of a step as input-basis indices."""
        return int(self.order.perm[step.k]), int(self.order.perm[step.l])


@dataclass(frozen=True)
class MinimumUniqueness:
    unique: bool
    condition: int | None


def _check_alpha(alpha: float, lo: float, hi: float) -> float:
    if alpha < lo - ALPHA_TOL or alpha > hi + ALPHA_TOL:
        raise AlphaOutOfRange(f"alpha {alpha!r} outside [{lo!r}, {hi!r}]")
    return min(max(alpha, lo), hi)


def _minimal_pref(lam: np.ndarray) -> np.ndarray:
    return np.sort(lam)[::-1]


def _maximal_pref(lam: np.ndarray, a_p: np.ndarray, e_p: np.ndarray) -> np.ndarray:
    """Ascending spectrum across target blocks, descending with cost inside them."""
    asc = np.sort(lam)
    out = np.empty_like(asc)
    ra = cluster_ranks(a_p, COEFF_EPS)
    start = 0
    for r in range(ra.max() + 1):
        members = np.nonzero(ra == r)[0]
        chunk = asc[start : start + len(members)]
        # larger populations on smaller cost; ties keep position order
        by_cost = members[np.argsort(e_p[members], kind="stable")]
        out[by_cost] = chunk[::-1]
        start += len(members)
    return out


def minimal_vertex(inst: ProblemInstance, order: PreferredOrder | None = None) -> np.ndarray:
    """Input-basis populations of the trajectory's minimal point."""
    order = order or preferred_order(inst.target, inst.cost)
    return order.to_input(_minimal_pref(np.asarray(inst.eigenvalues)))


def maximal_vertex(inst: ProblemInstance, order: PreferredOrder | None = None) -> np.ndarray:
    """Input-basis populations of the trajectory's maximal point."""
    order = order or preferred_order(inst.target, inst.cost)
    a_p = order.to_preferred(inst.target)
    e_p = order.to_preferred(inst.cost)
    return order.to_input(_maximal_pref(np.asarray(inst.eigenvalues), a_p, e_p))


def _position_groups(d: int, blocks: np.ndarray | None):
    if blocks is None:
        return [np.arange(d)]
    return [np.nonzero(blocks == b)[0] for b in range(int(blocks.max()) + 1)]


def _group_pairs(p, pos, eps_pop):
    """Index pairs (k, l) of adjacent value runs within one group, p[k] < p[l].

    Sorts the group once and pairs every member of each run with every
    member of the next run, fully vectorized (segmented arange), so a step
    costs O(group size) numpy work regardless of the degeneracy pattern.
    """
    order = np.argsort(p[pos], kind="stable")
    members = pos[order]
    rid = np.empty(len(members), dtype=int)
    rid[0] = 0
    rid[1:] = np.cumsum(np.diff(p[pos][order]) > eps_pop)
    n_runs = rid[-1] + 1
    if n_runs == 1:
        return members[:0], members[:0]
    sizes = np.bincount(rid)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    # each element of run r pairs with all of run r+1 (none for the last run)
    rep = np.where(rid < n_runs - 1, sizes[np.minimum(rid + 1, n_runs - 1)], 0)
    ks = np.repeat(members, rep)
    total = int(rep.sum())
    within = np.arange(total) - np.repeat(np.cumsum(rep) - rep, rep)
    ls = members[np.repeat(starts[np.minimum(rid + 1, n_runs - 1)], rep) + within]
    return ks, ls


def _candidates(p, a_p, e_p, eps_pop, groups):
    """Target-increasing adjacent-valued swaps of p, as (ks, ls, gradients).

    k carries the larger target coefficient and the smaller population.
    Adjacency is evaluated within each position group independently (one
    group per conserved block; a single group for the base problem).
    """
    ks_all, ls_all = [], []
    for pos in groups:
        if len(pos) < 2:
            continue
        ks, ls = _group_pairs(p, pos, eps_pop)
        if len(ks):
            ks_all.append(ks)
            ls_all.append(ls)
    if not ks_all:
        empty = np.array([], dtype=int)
        return empty, empty, np.array([])
    ks = np.concatenate(ks_all)
    ls = np.concatenate(ls_all)
    gaps = a_p[ks] - a_p[ls]
    increasing = gaps > COEFF_EPS
    ks, ls, gaps = ks[increasing], ls[increasing], gaps[increasing]
    grads = (e_p[ks] - e_p[ls]) / gaps
    return ks, ls, grads


def _choose(ks, ls, grads, eps_grad):
    """Minimal-gradient candidate; ties within eps_grad go to the smallest (k, l)."""
    tied = np.nonzero(grads <= grads.min() + eps_grad)[0]
    j = tied[np.lexsort((ls[tied], ks[tied]))[0]]
    return int(ks[j]), int(ls[j]), float(grads[j])


def swap_candidates(p, inst: ProblemInstance, order: PreferredOrder | None = None):
    """Target-increasing adjacent-valued swaps at p, as (i, j, gradient).

    Indices are input-basis; i carries the larger target coefficient.
    """
    order = order or preferred_order(inst.target, inst.cost)
    a_p = order.to_preferred(inst.target)
    e_p = order.to_preferred(inst.cost)
    pp = order.to_preferred(np.asarray(p, dtype=float))
    ks, ls, grads = _candidates(pp, a_p, e_p, inst.eps_pop, _position_groups(inst.dim, None))
    return [
        (int(order.perm[k]), int(order.perm[l]), float(g))
        for k, l, g in zip(ks, ls, grads)
    ]


def next_step(p, inst: ProblemInstance, order: PreferredOrder | None = None) -> SwapStep | None:
    """The optimal swap out of vertex p (input basis), or None at the maximum."""
    order = order or preferred_order(inst.target, inst.cost)
    lam = np.sort(np.asarray(inst.eigenvalues))
    p = np.asarray(p, dtype=float)
    if np.max(np.abs(np.sort(p) - lam)) > max(inst.eps_pop, 1e-9):
        raise NotAVertex("p is not a permutation of the eigenvalues")
    a_p = order.to_preferred(inst.target)
    e_p = order.to_preferred(inst.cost)
    pp = order.to_preferred(p)
    ks, ls, grads = _candidates(pp, a_p, e_p, inst.eps_pop, _position_groups(inst.dim, None))
    if len(ks) == 0:
        return None
    k, l, grad = _choose(ks, ls, grads, inst.eps_grad)
    alpha = float(np.dot(a_p, pp))
    delta = (a_p[k] - a_p[l]) * (pp[l] - pp[k])
    return SwapStep(
        k=k,
        l=l,
        delta_alpha=float(delta),
        gradient=grad,
        alpha_start=alpha,
        alpha_end=alpha + float(delta),
    )


def _build(p0_pref, a_p, e_p, order, eps_pop, eps_grad, blocks=None) -> OptimalTrajectory:
    p = np.asarray(p0_pref, dtype=float).copy()
    groups = _position_groups(len(p), blocks)
    verts = [p.copy()]
    steps = []
    bps = [(float(np.dot(a_p, p)), float(np.dot(e_p, p)))]
    while True:
        ks, ls, grads = _candidates(p, a_p, e_p, eps_pop, groups)
        if len(ks) == 0:
            break
        k, l, grad = _choose(ks, ls, grads, eps_grad)
        delta = (a_p[k] - a_p[l]) * (p[l] - p[k])
        p[k], p[l] = p[l], p[k]
        alpha = float(np.dot(a_p, p))
        omega = float(np.dot(e_p, p))
        steps.append(
            SwapStep(
                k=k,
                l=l,
                delta_alpha=float(delta),
                gradient=grad,
                alpha_start=bps[-1][0],
                alpha_end=alpha,
            )
        )
        verts.append(p.copy())
        bps.append((alpha, omega))
    vertices = np.array(verts)
    vertices.setflags(write=False)
    breakpoints = np.array(bps)
    breakpoints.setflags(write=False)
    return OptimalTrajectory(
        order=order,
        target_pref=a_p,
        cost_pref=e_p,
        vertices=vertices,
        steps=tuple(steps),
        breakpoints=breakpoints,
        eps_pop=eps_pop,
        eps_grad=eps_grad,
        block_of_position=blocks,
    )


def build(inst: ProblemInstance) -> OptimalTrajectory:
    """Full optimal trajectory of a validated instance, minimal to maximal point.

    Scans at most the adjacent-valued swaps of the current vertex per step;
    the polytope is never enumerated.
    """
    order = preferred_order(inst.target, inst.cost)
    a_p = order.to_preferred(inst.target)
    e_p = order.to_preferred(inst.cost)
    p0 = _minimal_pref(np.asarray(inst.eigenvalues))
    return _build(p0, a_p, e_p, order, inst.eps_pop, inst.eps_grad)


def omega_opt(traj: OptimalTrajectory, alpha: float) -> float:
    """Minimal cost at target value alpha (piecewise-linear interpolation)."""
    return traj.cost_function(alpha)


def state_at(traj: OptimalTrajectory, alpha: float):
    """Input-basis population realizing alpha on the trajectory.

    Returns (population, segment_index, t) where t in [0, 1] is the position
    along the active segment (0 at its start vertex).
    """
    alpha = _check_alpha(alpha, traj.alpha_min, traj.alpha_max)
    alphas = traj.breakpoints[:, 0]
    if len(traj.steps) == 0:
        return traj.vertex_input(0), 0, 0.0
    seg = min(bisect_right(alphas, alpha) - 1, len(traj.steps) - 1)
    seg = max(seg, 0)
    lo, hi = alphas[seg], alphas[seg + 1]
    t = 0.0 if hi == lo else (alpha - lo) / (hi - lo)
    t = min(max(t, 0.0), 1.0)
    p = (1.0 - t) * traj.vertices[seg] + t * traj.vertices[seg + 1]
    return traj.order.to_input(p), int(seg), float(t)


def uniqueness_at_minimum(inst: ProblemInstance) -> MinimumUniqueness:
    """Whether the minimal-point state is unique, and which condition makes it so.

    Condition 1: all target coefficients distinct. Condition 2: cost breaks
    every target degeneracy. Condition 3: the minimal arrangement assigns
    equal populations wherever target and cost are both degenerate.
    """
    order = preferred_order(inst.target, inst.cost)
    a_p = order.to_preferred(inst.target)
    e_p = order.to_preferred(inst.cost)
    p_min = _minimal_pref(np.asarray(inst.eigenvalues))
    ra = cluster_ranks(a_p, COEFF_EPS)
    if len(np.unique(ra)) == len(a_p):
        return MinimumUniqueness(unique=True, condition=1)
    cond2 = True
    cond3 = True
    for r in np.unique(ra):
        members = np.nonzero(ra == r)[0]
        if len(members) < 2:
            continue
        re = cluster_ranks(e_p[members], COEFF_EPS)
        for rr in np.unique(re):
            sub = members[np.nonzero(re == rr)[0]]
            if len(sub) < 2:
                continue
            cond2 = False
            if np.max(p_min[sub]) - np.min(p_min[sub]) > inst.eps_pop:
                cond3 = False
    if cond2:
        return MinimumUniqueness(unique=True, condition=2)
    if cond3:
        return MinimumUniqueness(unique=True, condition=3)
    return MinimumUniqueness(unique=False, condition=None)


def entry_point(traj: OptimalTrajectory, alpha_in: float):
    """Trajectory point at alpha_in plus a two-level route reaching it.

    The route is a chain of T-transforms (input-basis index pairs) that maps
    the descending spectrum placed on positions 0..d-1 to the returned
    populations: first the permutation to the minimal point as full swaps,
    then the completed trajectory swaps, then one partial mix on the active
    segment. Majorization guarantees such a chain exists; this one simply
    replays the trajectory.
    """
    from .lift import TTransform

    p, seg, t = state_at(traj, alpha_in)
    d = traj.dim
    chain = []
    perm = traj.order.perm
    seen = np.zeros(d, dtype=bool)
    for start in range(d):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cycle = [start]
        seen[start] = True
        nxt = int(perm[start])
        while nxt != start:
            cycle.append(nxt)
            seen[nxt] = True
            nxt = int(perm[nxt])
        # sigma restricted to the cycle is (c0 cm)...(c0 c1), rightmost first
        for c in cycle[1:]:
            chain.append(TTransform(i=cycle[0], j=c, t=0.0, dim=d))
    n_full = seg if t < 1.0 else seg + 1
    for step in traj.steps[:n_full]:
        i, j = traj.step_input_pair(step)
        chain.append(TTransform(i=i, j=j, t=0.0, dim=d))
    if 0.0 < t < 1.0:
        i, j = traj.step_input_pair(traj.steps[seg])
        chain.append(TTransform(i=i, j=j, t=1.0 - t, dim=d))
    return p, tuple(chain)
