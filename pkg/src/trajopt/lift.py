"""Lifting trajectory points to doubly-stochastic matrices and unitaries.

A partial two-level swap is a T-transform at the doubly-stochastic level
and a real rotation in the corresponding two-dimensional subspace at the
unitary level, with cos^2(theta) equal to the mixing parameter t. The
lifted unitary is taken relative to the minimal-point state (it is the
identity at alpha_min); the permutation from the descending spectrum to
the minimal point is exposed separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, TOutOfRange
from .trajectory import OptimalTrajectory, state_at


@dataclass(frozen=True)
class TTransform:
    """Doubly-stochastic mix of coordinates i and j: t=1 identity, t=0 swap."""

    i: int
    j: int
    t: float
    dim: int


@dataclass(frozen=True)
class TwoLevelRotation:
    """Plane rotation by theta in the (i, j) subspace."""

    i: int
    j: int
    theta: float
    dim: int


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    """Matrices realizing one trajectory point, input basis.

    unitary maps the minimal-point diagonal state to a state whose diagonal
    is density_diagonal; doubly_stochastic = |unitary|^2 entrywise and maps
    the minimal-point populations to density_diagonal.
    """

    unitary: np.ndarray
    doubly_stochastic: np.ndarray
    density_diagonal: np.ndarray
    alpha: float


def _check_pair(i: int, j: int, dim: int) -> None:
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexOutOfRange(f"indices ({i}, {j}) out of range for dim {dim}")
    if i == j:
        raise IndexOutOfRange("two-level indices must differ")


def t_transform_matrix(tt: TTransform) -> np.ndarray:
    _check_pair(tt.i, tt.j, tt.dim)
    if not 0.0 <= tt.t <= 1.0:
        raise TOutOfRange(f"t={tt.t!r} outside [0, 1]")
    m = np.eye(tt.dim)
    m[tt.i, tt.i] = m[tt.j, tt.j] = tt.t
    m[tt.i, tt.j] = m[tt.j, tt.i] = 1.0 - tt.t
    return m


def rotation_matrix(rot: TwoLevelRotation) -> np.ndarray:
    _check_pair(rot.i, rot.j, rot.dim)
    c, s = math.cos(rot.theta), math.sin(rot.theta)
    m = np.eye(rot.dim)
    m[rot.i, rot.i] = m[rot.j, rot.j] = c
    m[rot.i, rot.j] = s
    m[rot.j, rot.i] = -s
    return m


def unistochastic_of(u: np.ndarray) -> np.ndarray:
    """Entrywise squared magnitudes of a unitary."""
    u = np.asarray(u)
    return np.abs(u) ** 2


def minimal_permutation(traj: OptimalTrajectory) -> np.ndarray:
    """Permutation matrix taking the descending spectrum to the minimal point.

    Applied to the vector of eigenvalues sorted descending (placed on input
    positions 0..d-1), it yields the minimal vertex in the input basis.
    """
    d = traj.dim
    m = np.zeros((d, d))
    m[traj.order.perm, np.arange(d)] = 1.0
    return m


def apply_chain(chain, v: np.ndarray) -> np.ndarray:
    """Apply a sequence of T-transforms to a population vector."""
    out = np.asarray(v, dtype=float).copy()
    for tt in chain:
        out = t_transform_matrix(tt) @ out
    return out


def lift_point(traj: OptimalTrajectory, alpha: float) -> LiftedPoint:
    """Unitary and doubly-stochastic realization of the point at alpha.

    Composes full rotations for the completed steps and one partial rotation
    with theta = arccos(sqrt(t)) on the active segment, where t is the
    T-transform parameter (t = 1 - segment fraction).
    """
    p, seg, frac = state_at(traj, alpha)
    d = traj.dim
    u = np.eye(d)
    n_full = seg if frac < 1.0 else seg + 1
    for step in traj.steps[:n_full]:
        i, j = traj.step_input_pair(step)
        u = rotation_matrix(TwoLevelRotation(i=i, j=j, theta=math.pi / 2, dim=d)) @ u
    if 0.0 < frac < 1.0:
        i, j = traj.step_input_pair(traj.steps[seg])
        theta = math.acos(math.sqrt(1.0 - frac))
        u = rotation_matrix(TwoLevelRotation(i=i, j=j, theta=theta, dim=d)) @ u
    ds = unistochastic_of(u)
    diag = ds @ traj.vertex_input(0)
    return LiftedPoint(
        unitary=u, doubly_stochastic=ds, density_diagonal=diag, alpha=float(alpha)
    )
