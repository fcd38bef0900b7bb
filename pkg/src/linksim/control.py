"""Decentralized leader-follower control in edge coordinates.

Each rod gets a PD (optionally plus feedforward) control projected onto
the directions tangent to its length constraint; per-node forces are then
produced either by the structured assembly F = M(a 1 f_l^T + G + H^T U)
or by an equivalent recursive sweep down the tree, where each follower
only needs its parent's force and mass plus its own edge information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import LinkageModel, SystemState, EdgeState
from .dynamics import ForceLaw


class OrthogonalityViolation(ValueError):
    """A per-edge control input is not orthogonal to its rod vector."""


TimeFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class EdgeSetpoint:
    """Desired edge coordinates and their analytic time derivatives.

    Each function maps t to a (n-1) x 2 array.  Rows must keep the rod
    lengths for all t, which makes position and velocity rows orthogonal.
    """

    position: TimeFn
    velocity: TimeFn
    acceleration: TimeFn

    @staticmethod
    def constant(Qe_d) -> "EdgeSetpoint":
        rows = np.array(Qe_d, dtype=float)
        zeros = np.zeros_like(rows)
        return EdgeSetpoint(
            position=lambda t: rows,
            velocity=lambda t: zeros,
            acceleration=lambda t: zeros,
        )


def zero_leader_force(t: float) -> np.ndarray:
    return np.zeros(2)


@dataclass(frozen=True)
class ControllerConfig:
    """Gains, leader force and the feedforward switch."""

    kc: float
    kv: float
    leader_force: TimeFn = zero_leader_force
    feedforward: bool = False

    def __post_init__(self):
        if self.kc <= 0 or self.kv <= 0:
            raise ValueError("control gains must be positive")


def projection(r_e, length: float) -> np.ndarray:
    """P = I - r r^T / l^2: symmetric idempotent projector orthogonal to the rod."""
    r = np.asarray(r_e, dtype=float)
    return np.eye(2) - np.outer(r, r) / length**2


def edge_control(
    config: ControllerConfig,
    setpoint: EdgeSetpoint,
    edge_state: EdgeState,
    j: int,
    t: float,
) -> np.ndarray:
    """Projected PD (+feedforward) control for edge j (1-based)."""
    r = edge_state.Qe[j - 1]
    e_c = r - setpoint.position(t)[j - 1]
    e_v = edge_state.Qedot[j - 1] - setpoint.velocity(t)[j - 1]
    raw = -config.kc * e_c - config.kv * e_v
    if config.feedforward:
        raw = raw + setpoint.acceleration(t)[j - 1]
    # Apply the projector without forming it: u = raw - (raw.r / |r|^2) r.
    return raw - (raw @ r) / (r @ r) * r


def _check_orthogonal(U: np.ndarray, Qe: np.ndarray, lengths, tol: float) -> None:
    dots = np.abs(np.sum(U * Qe, axis=1))
    scale = np.maximum(np.linalg.norm(U, axis=1) * np.asarray(lengths), 1.0)
    bad = np.nonzero(dots > tol * scale)[0]
    if bad.size:
        j = int(bad[0])
        raise OrthogonalityViolation(
            f"control row {j + 1} has component {dots[j]:.3g} along its rod"
        )


def assemble_forces_structured(
    model: LinkageModel,
    config: ControllerConfig,
    U: np.ndarray,
    t: float,
    Qe: np.ndarray,
    tol: float = 1e-9,
) -> np.ndarray:
    """F = M(a 1 f_l^T + G + H^T U) with a = 1/m_1; leader row f_l + m_1 g e_y.

    Guarantees D^T M^-1 F = U and leaves the multipliers unaffected by the
    control, provided every row of U is orthogonal to its rod (checked).
    """
    U = np.asarray(U, dtype=float)
    _check_orthogonal(U, np.asarray(Qe, dtype=float), model.length_vector, tol)
    m = model.mass_vector
    fl = np.asarray(config.leader_force(t), dtype=float)
    F = m[:, None] * (fl[None, :] / m[0] + model.head_memberships.T @ U)
    F[:, 1] += m * model.gravity
    # The root column of H is zero, so the leader row reduces exactly to
    # f_l + m_1 g e_y; write it directly to keep that identity bitwise.
    F[0] = fl + np.array([0.0, m[0] * model.gravity])
    return F


def follower_force_recursive(
    model: LinkageModel,
    config: ControllerConfig,
    i: int,
    parent_bar_force: np.ndarray,
    u_j: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One step of the recursive sweep for follower node i (1-based).

    parent_bar_force is the gravity-free part of the parent's force; the
    recursion base at the root is the leader force itself.  Returns
    (f_i, bar_f_i); bar_f_i feeds the node's children.
    """
    i0 = i - 1
    parent = model.graph.parents[i0]
    if parent < 0:
        raise ValueError(f"node {i} is the root; the leader force is not recursive")
    m_i = model.masses[i0]
    m_k = model.masses[parent]
    bar_f = m_i * (np.asarray(parent_bar_force, dtype=float) / m_k + np.asarray(u_j, dtype=float))
    f = bar_f + np.array([0.0, m_i * model.gravity])
    return f, bar_f


def assemble_forces_recursive(
    model: LinkageModel,
    config: ControllerConfig,
    U: np.ndarray,
    t: float,
) -> np.ndarray:
    """Full tree sweep of follower_force_recursive; equals the structured form."""
    n = model.node_count
    F = np.empty((n, 2))
    bar = np.empty((n, 2))
    fl = np.asarray(config.leader_force(t), dtype=float)
    root = model.graph.root - 1
    bar[root] = fl
    F[root] = fl + np.array([0.0, model.masses[root] * model.gravity])
    edge_into = model.graph.edge_into
    for i0 in model.graph.topological_order:
        if i0 == root:
            continue
        F[i0], bar[i0] = follower_force_recursive(
            model, config, i0 + 1, bar[model.graph.parents[i0]], U[edge_into[i0]]
        )
    return F


def closed_loop_force_law(
    model: LinkageModel,
    config: ControllerConfig,
    setpoint: EdgeSetpoint,
) -> ForceLaw:
    """Force-law callable (t, state) -> F for the integrator.

    Computes per-edge projected PD controls from the current edge errors
    and assembles node forces by the recursive sweep.
    """
    dt_mat = model.incidence_f.T
    lengths_sq = model.length_vector**2
    kc, kv, feedforward = config.kc, config.kv, config.feedforward

    def law(t: float, state: SystemState) -> np.ndarray:
        qe = dt_mat @ state.Q
        qed = dt_mat @ state.Qdot
        raw = -kc * (qe - setpoint.position(t)) - kv * (qed - setpoint.velocity(t))
        if feedforward:
            raw = raw + setpoint.acceleration(t)
        U = raw - (np.sum(raw * qe, axis=1) / np.sum(qe * qe, axis=1))[:, None] * qe
        return assemble_forces_recursive(model, config, U, t)

    return law


def zero_force_law(model: LinkageModel) -> ForceLaw:
    """F identically zero (free dynamics under gravity)."""
    F = np.zeros((model.node_count, 2))

    def law(t: float, state: SystemState) -> np.ndarray:
        return F

    return law
