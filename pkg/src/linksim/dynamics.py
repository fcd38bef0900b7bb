"""Constrained dynamics: multipliers, constraint forces, accelerations, RK4.

The per-state evaluation is delegated to a kernel backend: a compiled
Cython extension when available, otherwise the pure-NumPy reference.
Set LINKSIM_PURE_PYTHON=1 to force the fallback, or call use_backend().
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import LinkageModel, SystemState, edge_state
from . import _kernel_py

_BACKENDS = {"python": _kernel_py}
try:
    from . import _kernel  # compiled extension; optional

    _BACKENDS["compiled"] = _kernel
except ImportError:
    pass

if os.environ.get("LINKSIM_PURE_PYTHON") or "compiled" not in _BACKENDS:
    _active = _BACKENDS["python"]
else:
    _active = _BACKENDS["compiled"]


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    return _active.NAME


def use_backend(name: str) -> None:
    """Switch the kernel backend ("python" or "compiled")."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]


class NotPositiveDefinite(RuntimeError):
    """The multiplier system lost positive definiteness (state off the manifold)."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class NonFiniteState(RuntimeError):
    """NaN or infinity appeared in the integrated state."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


ForceLaw = Callable[[float, SystemState], np.ndarray]


def _eval(model: LinkageModel, Q, Qdot, F, t: float | None = None):
    try:
        return _active.dyn_eval(
            model.incidence_f, model.inv_masses, model.edge_laplacian,
            model.gravity,
            np.ascontiguousarray(Q, dtype=float),
            np.ascontiguousarray(Qdot, dtype=float),
            np.ascontiguousarray(F, dtype=float),
        )
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc), t=t) from exc


def constraint_jacobian(model: LinkageModel, state: SystemState, j: int) -> np.ndarray:
    """Jacobian of the rod-length constraint j: A_j = Q^T d_j d_j^T (2 x n)."""
    d = model.incidence_f[:, j - 1]
    return np.outer(state.Q.T @ d, d)


def solve_lambda(model: LinkageModel, state: SystemState, F) -> np.ndarray:
    """Closed-form Lagrange multipliers via the SPD Hadamard-product system."""
    _, lam = _eval(model, state.Q, state.Qdot, F, t=state.t)
    return np.asarray(lam)


def constraint_forces(model: LinkageModel, state: SystemState, lam) -> np.ndarray:
    """Gamma = D diag(lam) D^T Q; rows are per-node internal rod forces."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (model.edge_count,):
        raise ValueError(f"expected {model.edge_count} multipliers, got shape {lam.shape}")
    qe = model.incidence_f.T @ state.Q
    return model.incidence_f @ (lam[:, None] * qe)


def node_accelerations(model: LinkageModel, state: SystemState, F) -> np.ndarray:
    """Qddot = -M^-1 Gamma + M^-1 F - G with multipliers solved in closed form."""
    qdd, _ = _eval(model, state.Q, state.Qdot, F, t=state.t)
    return np.asarray(qdd)


def edge_accelerations(model: LinkageModel, state: SystemState, F) -> np.ndarray:
    """Qeddot = -L_e diag(lam) Qe + D^T M^-1 F (edge form of the dynamics)."""
    lam = solve_lambda(model, state, F)
    es = edge_state(model, state)
    minv_f = np.asarray(F, dtype=float) * model.inv_masses[:, None]
    return -model.edge_laplacian @ (lam[:, None] * es.Qe) + model.incidence_f.T @ minv_f


@dataclass
class SimTrace:
    """Time-indexed record of an integration run.

    Arrays are indexed [sample, ...]; sample s is at time times[s].  F and
    lam hold the force and multipliers evaluated at that sample's state.
    """

    model: LinkageModel
    times: np.ndarray          # (T,)
    Q: np.ndarray              # (T, n, 2)
    Qdot: np.ndarray           # (T, n, 2)
    F: np.ndarray              # (T, n, 2)
    lam: np.ndarray            # (T, k)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, s: int) -> SystemState:
        return SystemState(float(self.times[s]), self.Q[s].copy(), self.Qdot[s].copy())


def _project_to_manifold(model: LinkageModel, Q, Qdot):
    """Renormalize rods to their lengths and strip radial rod velocities.

    Walks the tree from the root, keeping the root row of Q and Qdot.
    """
    root = model.graph.root - 1
    qe = model.incidence_f.T @ Q
    qed = model.incidence_f.T @ Qdot
    norms = np.linalg.norm(qe, axis=1)
    qe = qe * (model.length_vector / norms)[:, None]
    radial = np.sum(qe * qed, axis=1) / model.length_vector**2
    qed = qed - radial[:, None] * qe
    parents, edge_into = model.graph.parents, model.graph.edge_into
    for i in model.graph.topological_order:
        if i == root:
            continue
        j = edge_into[i]
        Q[i] = Q[parents[i]] + qe[j]
        Qdot[i] = Qdot[parents[i]] + qed[j]


def integrate(
    model: LinkageModel,
    initial_state: SystemState,
    force_law: ForceLaw,
    t_end: float,
    dt: float,
    projection: bool = False,
) -> SimTrace:
    """Fixed-step classical RK4 on the coupled (Q, Qdot) system.

    The force law is re-evaluated at every RK4 sub-stage time and state,
    preserving fourth order for time-varying controllers.  With
    projection=True the state is pulled back onto the constraint manifold
    after every step (off by default; drift then measures fidelity).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = int(round(t_end / dt))
    n, k = model.node_count, model.edge_count

    times = np.empty(steps + 1)
    Q_out = np.empty((steps + 1, n, 2))
    Qd_out = np.empty((steps + 1, n, 2))
    F_out = np.empty((steps + 1, n, 2))
    lam_out = np.empty((steps + 1, k))

    Q = initial_state.Q.copy()
    Qd = initial_state.Qdot.copy()
    t0 = initial_state.t
    h = dt

    def deriv(t, q, qd):
        f = np.asarray(force_law(t, SystemState(t, q, qd)), dtype=float)
        qdd, lam = _eval(model, q, qd, f, t=t)
        return np.asarray(qdd), f, np.asarray(lam)

    for s in range(steps):
        t = t0 + s * h
        if not (np.isfinite(Q).all() and np.isfinite(Qd).all()):
            raise NonFiniteState(f"non-finite state at t={t:.6g}", t=t)

        a1, f1, lam1 = deriv(t, Q, Qd)
        times[s] = t
        Q_out[s], Qd_out[s] = Q, Qd
        F_out[s], lam_out[s] = f1, lam1

        k1q, k1v = Qd, a1
        a2, _, _ = deriv(t + h / 2, Q + (h / 2) * k1q, Qd + (h / 2) * k1v)
        k2q, k2v = Qd + (h / 2) * k1v, a2
        a3, _, _ = deriv(t + h / 2, Q + (h / 2) * k2q, Qd + (h / 2) * k2v)
        k3q, k3v = Qd + (h / 2) * k2v, a3
        a4, _, _ = deriv(t + h, Q + h * k3q, Qd + h * k3v)
        k4q, k4v = Qd + h * k3v, a4

        Q = Q + (h / 6) * (k1q + 2 * k2q + 2 * k3q + k4q)
        Qd = Qd + (h / 6) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if projection and k > 0:
            _project_to_manifold(model, Q, Qd)

    t = t0 + steps * h
    if not (np.isfinite(Q).all() and np.isfinite(Qd).all()):
        raise NonFiniteState(f"non-finite state at t={t:.6g}", t=t)
    a_end, f_end, lam_end = deriv(t, Q, Qd)
    times[steps] = t
    Q_out[steps], Qd_out[steps] = Q, Qd
    F_out[steps], lam_out[steps] = f_end, lam_end

    return SimTrace(model=model, times=times, Q=Q_out, Qdot=Qd_out, F=F_out, lam=lam_out)
