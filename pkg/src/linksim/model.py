"""Physical model of a planar linkage and its state representations.

A linkage is a set of point masses joined by massless rigid rods whose
connectivity is an arborescence.  Node coordinates live in an n x 2 matrix
Q (one row per mass, inertial frame); edge coordinates Qe = D^T Q are the
rod displacement vectors, each constrained to its rod length.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import Arborescence, incidence_matrix, left_inverse, node_weighted_edge_laplacian

#: Validation tolerances for analytically constructed initial states.
TOL_POSITION = 1e-9
TOL_VELOCITY = 1e-9


class ConstraintViolation(ValueError):
    """State violates a rod-length or rod-velocity constraint."""


@dataclass(frozen=True)
class LinkageModel:
    """Immutable physical description: graph, masses, rod lengths, gravity."""

    graph: Arborescence
    masses: tuple[float, ...]
    lengths: tuple[float, ...]
    gravity: float = 9.81

    def __post_init__(self):
        n, k = self.graph.node_count, self.graph.edge_count
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        object.__setattr__(self, "lengths", tuple(float(l) for l in self.lengths))
        if len(self.masses) != n:
            raise ValueError(f"expected {n} masses, got {len(self.masses)}")
        if len(self.lengths) != k:
            raise ValueError(f"expected {k} rod lengths, got {len(self.lengths)}")
        if any(m <= 0 for m in self.masses):
            raise ValueError("masses must be positive")
        if any(l <= 0 for l in self.lengths):
            raise ValueError("rod lengths must be positive")

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @cached_property
    def incidence(self) -> np.ndarray:
        """Integer incidence matrix D."""
        return incidence_matrix(self.graph)

    @cached_property
    def incidence_f(self) -> np.ndarray:
        """D as a C-contiguous float array for numeric kernels."""
        return np.ascontiguousarray(self.incidence, dtype=float)

    @cached_property
    def head_memberships(self) -> np.ndarray:
        """Integer left inverse H of D."""
        return left_inverse(self.graph)

    @cached_property
    def mass_vector(self) -> np.ndarray:
        return np.array(self.masses)

    @cached_property
    def inv_masses(self) -> np.ndarray:
        return 1.0 / self.mass_vector

    @cached_property
    def length_vector(self) -> np.ndarray:
        return np.array(self.lengths)

    @cached_property
    def edge_laplacian(self) -> np.ndarray:
        """L_e = D^T diag(1/m) D, the constant SPD factor of the multiplier system."""
        if self.edge_count == 0:
            return np.zeros((0, 0))
        return np.ascontiguousarray(
            node_weighted_edge_laplacian(self.incidence, self.inv_masses)
        )

    @cached_property
    def gravity_matrix(self) -> np.ndarray:
        """G = [0_n, g 1_n]; accelerations carry -G."""
        g = np.zeros((self.node_count, 2))
        g[:, 1] = self.gravity
        return g


@dataclass
class SystemState:
    """Node positions and velocities at one time instant (value semantics)."""

    t: float
    Q: np.ndarray
    Qdot: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.Qdot = np.asarray(self.Qdot, dtype=float)
        if self.Q.shape != self.Qdot.shape or self.Q.ndim != 2 or self.Q.shape[1] != 2:
            raise ValueError(f"bad state shapes {self.Q.shape}, {self.Qdot.shape}")

    def copy(self) -> "SystemState":
        return SystemState(self.t, self.Q.copy(), self.Qdot.copy())


@dataclass
class EdgeState:
    """Rod displacement vectors and their rates, one row per edge."""

    Qe: np.ndarray
    Qedot: np.ndarray


def edge_state(model: LinkageModel, state: SystemState) -> EdgeState:
    """Qe = D^T Q, Qedot = D^T Qdot."""
    if state.Q.shape[0] != model.node_count:
        raise ValueError(f"state has {state.Q.shape[0]} nodes, model has {model.node_count}")
    dt = model.incidence_f.T
    return EdgeState(Qe=dt @ state.Q, Qedot=dt @ state.Qdot)


def holonomic_residual(model: LinkageModel, state: SystemState, j: int) -> float:
    """Rod-length constraint value for edge j (1-based): 0.5 ||r_ej||^2 - 0.5 l_j^2."""
    r = state.Q.T @ model.incidence_f[:, j - 1]
    return 0.5 * float(r @ r) - 0.5 * model.lengths[j - 1] ** 2

def velocity_residual(model: LinkageModel, state: SystemState, j: int) -> float:
    """Rod-velocity constraint value for edge j: rdot_ej . r_ej."""
    d = model.incidence_f[:, j - 1]
    return float((state.Qdot.T @ d) @ (state.Q.T @ d))


def assemble_state_from_edges(
    model: LinkageModel,
    root_position,
    root_velocity,
    Qe,
    Qedot,
    t: float = 0.0,
    tol_c: float = TOL_POSITION,
    tol_v: float = TOL_VELOCITY,
) -> SystemState:
    """Build node coordinates from edge coordinates by walking the tree.

    Each node position is the root position plus the sum of rod vectors
    along the unique root path; same for velocities.  Inputs must satisfy
    the length and orthogonality constraints within tol_c / tol_v.
    """
    n, k = model.node_count, model.edge_count
    Qe = np.asarray(Qe, dtype=float).reshape(k, 2)
    Qedot = np.asarray(Qedot, dtype=float).reshape(k, 2)
    norms = np.linalg.norm(Qe, axis=1)
    bad = np.nonzero(np.abs(norms - model.length_vector) > tol_c)[0]
    if bad.size:
        j = int(bad[0])
        raise ConstraintViolation(
            f"edge {j + 1} has length {norms[j]:.12g}, expected {model.lengths[j]:.12g}"
        )
    radial = np.abs(np.sum(Qe * Qedot, axis=1))
    bad = np.nonzero(radial > tol_v)[0]
    if bad.size:
        j = int(bad[0])
        raise ConstraintViolation(
            f"edge {j + 1} velocity has radial component {radial[j]:.3g} > {tol_v:.3g}"
        )

    Q = np.empty((n, 2))
    Qdot = np.empty((n, 2))
    Q[model.graph.root - 1] = np.asarray(root_position, dtype=float)
    Qdot[model.graph.root - 1] = np.asarray(root_velocity, dtype=float)
    edge_into = model.graph.edge_into
    parents = model.graph.parents
    for i in model.graph.topological_order:
        if parents[i] < 0:
            continue
        j = edge_into[i]
        Q[i] = Q[parents[i]] + Qe[j]
        Qdot[i] = Qdot[parents[i]] + Qedot[j]
    return SystemState(t=t, Q=Q, Qdot=Qdot)


def validate_state(
    model: LinkageModel,
    state: SystemState,
    tol_c: float = TOL_POSITION,
    tol_v: float = TOL_VELOCITY,
) -> None:
    """Raise ConstraintViolation unless all rod constraints hold within tolerance."""
    for j in range(1, model.edge_count + 1):
        hc = holonomic_residual(model, state, j)
        if abs(hc) > tol_c:
            raise ConstraintViolation(f"edge {j} holonomic residual {hc:.3g} > {tol_c:.3g}")
        hv = velocity_residual(model, state, j)
        if abs(hv) > tol_v:
            raise ConstraintViolation(f"edge {j} velocity residual {hv:.3g} > {tol_v:.3g}")


def kinetic_and_potential_energy(model: LinkageModel, state: SystemState) -> tuple[float, float]:
    """(KE, PE) with PE = sum m_i g y_i; KE + PE is conserved when F = 0."""
    ke = 0.5 * float(np.sum(model.mass_vector * np.sum(state.Qdot**2, axis=1)))
    pe = model.gravity * float(np.sum(model.mass_vector * state.Q[:, 1]))
    return ke, pe
