"""Independent verification solvers that avoid the graph-operator route.

Two cross-checks for the primary dynamics: a saddle-point (KKT) multiplier
solve on vectorized coordinates, and a minimal-coordinate integrator for
chain-shaped linkages parameterized by root position and link angles.
Their numerics are deliberately different from the main path, so agreement
tolerances are looser than the internal algebraic identities.
"""

from __future__ import annotations

import numpy as np

from .dynamics import ForceLaw
from .model import LinkageModel, SystemState

#: Central-difference step for the mass-matrix derivatives (angles, rad).
FD_STEP = 1e-6


def kkt_lambda(model: LinkageModel, state: SystemState, F) -> np.ndarray:
    """Multipliers from the full saddle-point system on vectorized coordinates.

    Stacks [M_hat A^T; A 0] [qddot; lam] = [F_hat - M_hat G_hat; -c] where
    row j of A is the gradient of rod constraint j and c_j = |rdot_ej|^2.
    Solved densely with a general factorization; no graph operators used
    beyond reading off each rod's endpoint incidence signs.
    """
    n, k = model.node_count, model.edge_count
    F = np.asarray(F, dtype=float)
    q_dim = 2 * n
    m_hat = np.repeat(model.mass_vector, 2)

    A = np.zeros((k, q_dim))
    c = np.empty(k)
    for j in range(k):
        d = model.incidence_f[:, j]
        r_ej = state.Q.T @ d
        rd_ej = state.Qdot.T @ d
        for i in range(n):
            if d[i] != 0.0:
                A[j, 2 * i : 2 * i + 2] = d[i] * r_ej
        c[j] = rd_ej @ rd_ej

    g_hat = np.zeros(q_dim)
    g_hat[1::2] = model.gravity
    rhs = np.concatenate([F.reshape(-1) - m_hat * g_hat, -c])
    saddle = np.zeros((q_dim + k, q_dim + k))
    saddle[:q_dim, :q_dim] = np.diag(m_hat)
    saddle[:q_dim, q_dim:] = A.T
    saddle[q_dim:, :q_dim] = A
    try:
        sol = np.linalg.solve(saddle, rhs)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"singular saddle system (state off manifold): {exc}")
    return sol[q_dim:]


def _chain_sequence(model: LinkageModel) -> tuple[list[int], list[int]]:
    """(node order, edge order) from root to leaf; rejects branching trees."""
    g = model.graph
    nodes = [g.root - 1]
    edge_order: list[int] = []
    while True:
        kids = g.children[nodes[-1]]
        if not kids:
            break
        if len(kids) > 1:
            raise ValueError("minimal-coordinate oracle supports chains only")
        nodes.append(kids[0])
        edge_order.append(g.edge_into[kids[0]])
    return nodes, edge_order


def minimal_coordinate_chain(
    model: LinkageModel,
    initial_angles,
    initial_rates,
    force_law: ForceLaw,
    t_end: float,
    dt: float,
    root_position=(0.0, 0.0),
    root_velocity=(0.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a chain in (root position, link angle) coordinates.

    Angles are measured from the +x axis, listed root-to-leaf.  The
    equations of motion are assembled each step from the kinetic-energy
    mass matrix (exact Jacobian products) with its configuration
    derivatives taken by central differences of step FD_STEP.

    Returns (times, positions) with positions of shape (T, n, 2) in the
    model's original node numbering.
    """
    nodes, edge_order = _chain_sequence(model)
    n = model.node_count
    kk = len(edge_order)
    ells = model.length_vector[edge_order]
    m_chain = model.mass_vector[nodes]
    dof = 2 + kk
    gval = model.gravity

    def chain_positions(z):
        r = np.empty((n, 2))
        r[0] = z[:2]
        steps = ells[:, None] * np.column_stack([np.cos(z[2:]), np.sin(z[2:])])
        r[1:] = z[:2] + np.cumsum(steps, axis=0)
        return r

    # Chain position i depends on the angles of all upstream links j < i.
    lower = (np.arange(n)[:, None] > np.arange(kk)[None, :]).astype(float)

    def jacobians(angles):
        tang = ells[:, None] * np.column_stack([-np.sin(angles), np.cos(angles)])
        J = np.zeros((n, 2, dof))
        J[:, 0, 0] = 1.0
        J[:, 1, 1] = 1.0
        J[:, :, 2:] = lower[:, None, :] * tang.T[None, :, :]
        return J

    def mass_matrix(angles):
        J = jacobians(angles)
        return np.einsum("i,iax,iay->xy", m_chain, J, J)

    def accelerations(t, z, zd):
        angles = z[2:]
        J = jacobians(angles)
        M = np.einsum("i,iax,iay->xy", m_chain, J, J)

        dM = np.zeros((dof, dof, dof))  # dM[a] = dM/dz_a; zero for the root coords
        for c in range(kk):
            da = np.zeros(kk)
            da[c] = FD_STEP
            dM[2 + c] = (mass_matrix(angles + da) - mass_matrix(angles - da)) / (2 * FD_STEP)
        M_dot = np.einsum("axy,a->xy", dM, zd)
        grad_T = 0.5 * np.einsum("axy,x,y->a", dM, zd, zd)

        r = chain_positions(z)
        rdot = np.einsum("iax,x->ia", J, zd)
        Q_full = np.empty((n, 2))
        Qd_full = np.empty((n, 2))
        Q_full[nodes] = r
        Qd_full[nodes] = rdot
        F = np.asarray(force_law(t, SystemState(t, Q_full, Qd_full)), dtype=float)
        q_gen = np.einsum("iax,ia->x", J, F[nodes]) - gval * np.einsum("i,ix->x", m_chain, J[:, 1, :])

        return np.linalg.solve(M, q_gen - M_dot @ zd + grad_T)

    z = np.concatenate([np.asarray(root_position, dtype=float), np.asarray(initial_angles, dtype=float)])
    zd = np.concatenate([np.asarray(root_velocity, dtype=float), np.asarray(initial_rates, dtype=float)])
    if z.shape != (dof,) or zd.shape != (dof,):
        raise ValueError(f"expected {kk} angles and rates for this chain")

    steps = int(round(t_end / dt))
    times = np.empty(steps + 1)
    positions = np.empty((steps + 1, n, 2))
    h = dt
    for s in range(steps + 1):
        t = s * h
        times[s] = t
        pos = np.empty((n, 2))
        pos[nodes] = chain_positions(z)
        positions[s] = pos
        if s == steps:
            break
        a1 = accelerations(t, z, zd)
        k1q, k1v = zd, a1
        a2 = accelerations(t + h / 2, z + (h / 2) * k1q, zd + (h / 2) * k1v)
        k2q, k2v = zd + (h / 2) * k1v, a2
        a3 = accelerations(t + h / 2, z + (h / 2) * k2q, zd + (h / 2) * k2v)
        k3q, k3v = zd + (h / 2) * k2v, a3
        a4 = accelerations(t + h, z + h * k3q, zd + h * k3v)
        k4q, k4v = zd + h * k3v, a4
        z = z + (h / 6) * (k1q + 2 * k2q + 2 * k3q + k4q)
        zd = zd + (h / 6) * (k1v + 2 * k2v + 2 * k3v + k4v)

    return times, positions
