"""Population-polytope primitives.

The reachable populations of a state with spectrum λ form the convex hull
of the permutations of λ. This module provides the majorization test, the
vertex enumeration with degeneracy counting, adjacent-valued swap
enumeration, and a brute-force edge oracle that is independent of the
adjacent-swap characterization (it solves a small LP instead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import cluster_ranks
from .errors import DimensionTooLarge, NotAVertex
from .simplex import LPStatus, solve_lp

DEFAULT_MAX_ENUM_DIM = 9


@dataclass(frozen=True, eq=False)
class VertexSet:
    """All distinct permutations of a spectrum, one per row.

    eigenvalues holds the regularized spectrum: entries within eps of each
    other are snapped to their class mean so that "distinct permutation"
    is well defined and the count matches n!/prod(s_i!).
    """

    vertices: np.ndarray
    count: int
    eigenvalues: np.ndarray
    class_sizes: tuple[int, ...]


@dataclass(frozen=True)
class AvSwap:
    """Index pair with adjacent values, p[k] < p[l]."""

    k: int
    l: int


def majorizes(x, y, eps: float = 1e-12) -> bool:
    """True iff x majorizes y: descending prefix sums of x dominate y's."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        return False
    cx = np.cumsum(np.sort(x)[::-1])
    cy = np.cumsum(np.sort(y)[::-1])
    if abs(cx[-1] - cy[-1]) > eps:
        return False
    return bool(np.all(cx >= cy - eps))


def degeneracy_classes(values, eps: float):
    """Regularize eps-close entries to class means.

    Returns (regularized values, class sizes sorted by descending value).
    """
    values = np.asarray(values, dtype=float)
    ranks = cluster_ranks(values, eps)
    reg = values.copy()
    sizes = []
    for r in range(ranks.max() + 1):
        members = ranks == r
        reg[members] = values[members].mean()
        sizes.append(int(members.sum()))
    return reg, tuple(sizes)


def vertex_count(lam, eps: float = 1e-12) -> int:
    """n!/prod(s_i!) for the degeneracy classes of lam."""
    _, sizes = degeneracy_classes(lam, eps)
    count = math.factorial(len(np.asarray(lam)))
    for s in sizes:
        count //= math.factorial(s)
    return count


def _distinct_permutations(values_desc: np.ndarray):
    """Yield the distinct arrangements of a descending multiset, lexicographically."""
    d = len(values_desc)
    uniq, counts = [], []
    for v in values_desc:
        if uniq and v == uniq[-1]:
            counts[-1] += 1
        else:
            uniq.append(float(v))
            counts.append(1)
    out = np.empty(d)

    def rec(pos):
        if pos == d:
            yield out.copy()
            return
        for i, v in enumerate(uniq):
            if counts[i] == 0:
                continue
            counts[i] -= 1
            out[pos] = v
            yield from rec(pos + 1)
            counts[i] += 1

    yield from rec(0)


def enumerate_vertices(
    lam, eps: float = 1e-12, max_dim: int = DEFAULT_MAX_ENUM_DIM
) -> VertexSet:
    """All distinct permutations of lam (after eps-regularization)."""
    lam = np.asarray(lam, dtype=float)
    d = len(lam)
    if d > max_dim:
        raise DimensionTooLarge(f"dim {d} exceeds enumeration cap {max_dim}")
    reg, sizes = degeneracy_classes(lam, eps)
    desc = np.sort(reg)[::-1]
    verts = np.array(list(_distinct_permutations(desc)))
    verts.setflags(write=False)
    return VertexSet(
        vertices=verts, count=len(verts), eigenvalues=reg, class_sizes=sizes
    )


def av_swaps(p, eps: float = 1e-12) -> list[AvSwap]:
    """All index pairs whose values are neighbors in the sorted distinct values.

    With degenerate entries, every index pair realizing a value adjacency is
    returned; pairs of equal values are not (no strict inequality to swap).
    """
    p = np.asarray(p, dtype=float)
    ranks = cluster_ranks(p, eps)
    members = [np.nonzero(ranks == r)[0] for r in range(ranks.max() + 1)]
    swaps = []
    for low, high in zip(members[:-1], members[1:]):
        for k in low:
            for l in high:
                swaps.append(AvSwap(k=int(k), l=int(l)))
    return swaps


def _find_vertex(vset: VertexSet, v: np.ndarray, eps: float) -> int:
    diffs = np.max(np.abs(vset.vertices - np.asarray(v, dtype=float)), axis=1)
    idx = int(np.argmin(diffs))
    if diffs[idx] > eps:
        raise NotAVertex("vector is not a vertex of the set")
    return idx


def segment_weight(v1, v2, vset: VertexSet, tol: float = 1e-9) -> float:
    """Minimal total weight on {v1, v2} over convex representations of their midpoint."""
    mid = 0.5 * (np.asarray(v1, dtype=float) + np.asarray(v2, dtype=float))
    i1 = _find_vertex(vset, v1, tol)
    i2 = _find_vertex(vset, v2, tol)
    if i1 == i2:
        raise NotAVertex("v1 and v2 are the same vertex")
    n = vset.count
    A = np.vstack([vset.vertices.T, np.ones(n)])
    b = np.append(mid, 1.0)
    c = np.zeros(n)
    c[i1] = 1.0
    c[i2] = 1.0
    status, _, obj = solve_lp(c, A, b, tol=tol)
    if status != LPStatus.OPTIMAL:
        raise RuntimeError(f"midpoint LP ended with status {status}")
    return obj


def is_edge(v1, v2, vset: VertexSet, eps: float = 1e-9) -> bool:
    """Brute-force edge test via linear feasibility.

    (v1, v2) is an edge iff the midpoint admits no convex representation
    placing weight below 1/2 on the pair; for these polytopes the minimal
    weight is 1 on edges and drops to ~0 otherwise, so the threshold is
    uncritical.
    """
    return segment_weight(v1, v2, vset, tol=eps) >= 0.5


def _canonical_pair(v1: np.ndarray, v2: np.ndarray, desc: np.ndarray) -> bytes:
    """Orbit key of (v1, v2) under coordinate permutations.

    Relabels coordinates so v1 becomes the descending spectrum, then sorts
    v2's entries inside each degeneracy block of the spectrum (the residual
    relabeling freedom).
    """
    order1 = np.argsort(-v1, kind="stable")
    w = v2[order1]
    start = 0
    d = len(desc)
    out = np.empty(d)
    while start < d:
        stop = start
        while stop < d and desc[stop] == desc[start]:
            stop += 1
        out[start:stop] = -np.sort(-w[start:stop])
        start = stop
    return out.tobytes()


def edge_pairs(vset: VertexSet, eps: float = 1e-9, symmetry: bool = True) -> set:
    """All unordered vertex-index pairs passing is_edge.

    With symmetry=True, pairs related by a coordinate permutation share one
    LP solve (the polytope is permutation invariant); with symmetry=False
    every pair is solved independently.
    """
    desc = np.sort(vset.eigenvalues)[::-1]
    n = vset.count
    pairs = set()
    if not symmetry:
        for i in range(n):
            for j in range(i + 1, n):
                if is_edge(vset.vertices[i], vset.vertices[j], vset, eps):
                    pairs.add((i, j))
        return pairs

    cache: dict[bytes, bool] = {}
    for i in range(n):
        vi = vset.vertices[i]
        for j in range(i + 1, n):
            key = _canonical_pair(vi, vset.vertices[j], desc)
            verdict = cache.get(key)
            if verdict is None:
                verdict = is_edge(vset.vertices[i], vset.vertices[j], vset, eps)
                cache[key] = verdict
            if verdict:
                pairs.add((i, j))
    return pairs


def av_swap_pairs(vset: VertexSet, eps: float = 1e-12) -> set:
    """Vertex-index pairs predicted to be edges by the adjacent-swap rule."""
    index = {vset.vertices[i].tobytes(): i for i in range(vset.count)}
    pairs = set()
    for i in range(vset.count):
        v = vset.vertices[i]
        for sw in av_swaps(v, eps):
            w = v.copy()
            w[sw.k], w[sw.l] = w[sw.l], w[sw.k]
            j = index[w.tobytes()]
            pairs.add((min(i, j), max(i, j)))
    return pairs
