"""Per-sample diagnostics and post-run summaries for simulation traces.

Covers constraint drift, tracking errors, energy bookkeeping, the
conditioning of the multiplier matrix J = L_e o Qe Qe^T, and the per-edge
network residual X_j of the closed-loop error dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import EdgeSetpoint
from .dynamics import SimTrace
from .model import LinkageModel, SystemState, kinetic_and_potential_energy


@dataclass
class DiagnosticsRow:
    """Scalar and per-edge diagnostics at one trace sample."""

    t: float
    constraint_drift: float        # max_j | |r_ej| - l_j |
    velocity_residual_max: float   # max_j | rdot_ej . r_ej |
    tracking_error: np.ndarray     # per-edge |e_cj|
    velocity_error: np.ndarray     # per-edge |e_vj|
    kinetic_energy: float
    potential_energy: float
    sigma_min_J: float             # smallest eigenvalue of L_e o Qe Qe^T
    residual_X: np.ndarray         # per-edge |X_j|
    lam: np.ndarray


def residual_vector(model: LinkageModel, state: SystemState, lam, j: int) -> np.ndarray:
    """Network residual of edge j's error dynamics: X_j = -Qe^T diag(lam) L_e e_j."""
    qe = model.incidence_f.T @ state.Q
    lam = np.asarray(lam, dtype=float)
    return -(qe.T * lam) @ model.edge_laplacian[:, j - 1]


def _residual_matrix(model: LinkageModel, qe: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """All X_j stacked as rows: -L_e diag(lam) Qe (L_e symmetric)."""
    return -model.edge_laplacian @ (lam[:, None] * qe)


def multiplier_matrix(model: LinkageModel, qe: np.ndarray) -> np.ndarray:
    """J = L_e o Qe Qe^T, the SPD matrix of the multiplier solve."""
    return model.edge_laplacian * (qe @ qe.T)


def bound_terms(model: LinkageModel, state: SystemState, lam) -> tuple[float, float, float]:
    """(sigma_min_J, sum of squared edge velocities, max |X_j|).

    The middle term equals the summed squared velocity errors only for a
    constant setpoint; the proportionality constants tying the three
    together are not pinned down, so only sigma_min_J > 0 is asserted.
    """
    qe = model.incidence_f.T @ state.Q
    qed = model.incidence_f.T @ state.Qdot
    sigma_min = float(np.linalg.eigvalsh(multiplier_matrix(model, qe))[0])
    assert sigma_min > 0.0, "multiplier matrix lost positive definiteness"
    x = _residual_matrix(model, qe, np.asarray(lam, dtype=float))
    return sigma_min, float(np.sum(qed * qed)), float(np.linalg.norm(x, axis=1).max(initial=0.0))


def compute_diagnostics(
    trace: SimTrace,
    setpoint: EdgeSetpoint | None = None,
    decimate: int = 1,
) -> list[DiagnosticsRow]:
    """Diagnostics for every decimate-th trace sample."""
    model = trace.model
    dt_mat = model.incidence_f.T
    lengths = model.length_vector
    rows = []
    for s in range(0, len(trace), decimate):
        t = float(trace.times[s])
        qe = dt_mat @ trace.Q[s]
        qed = dt_mat @ trace.Qdot[s]
        lam = trace.lam[s]
        if model.edge_count:
            drift = float(np.abs(np.linalg.norm(qe, axis=1) - lengths).max())
            vres = float(np.abs(np.sum(qe * qed, axis=1)).max())
            sigma_min = float(np.linalg.eigvalsh(multiplier_matrix(model, qe))[0])
            xnorm = np.linalg.norm(_residual_matrix(model, qe, lam), axis=1)
        else:
            drift, vres, sigma_min = 0.0, 0.0, np.inf
            xnorm = np.zeros(0)
        if setpoint is not None:
            ec = np.linalg.norm(qe - setpoint.position(t), axis=1)
            ev = np.linalg.norm(qed - setpoint.velocity(t), axis=1)
        else:
            ec = np.full(model.edge_count, np.nan)
            ev = np.full(model.edge_count, np.nan)
        ke, pe = kinetic_and_potential_energy(model, trace.state(s))
        rows.append(
            DiagnosticsRow(
                t=t,
                constraint_drift=drift,
                velocity_residual_max=vres,
                tracking_error=ec,
                velocity_error=ev,
                kinetic_energy=ke,
                potential_energy=pe,
                sigma_min_J=sigma_min,
                residual_X=xnorm,
                lam=np.asarray(lam).copy(),
            )
        )
    return rows


@dataclass
class RunSummary:
    """Post-run aggregate metrics."""

    duration: float
    samples: int
    max_constraint_drift: float
    mean_constraint_drift: float
    max_velocity_residual: float
    final_tracking_error: np.ndarray | None
    settling_time: float | None     # first t after which all |e_cj| stay below threshold
    settling_threshold: float
    energy_drift: float             # |E(t) - E(0)| max, relative to max(|E(0)|, 1e-12)
    min_sigma_min_J: float

    def as_dict(self) -> dict:
        d = {
            "duration": self.duration,
            "samples": self.samples,
            "max_constraint_drift": self.max_constraint_drift,
            "mean_constraint_drift": self.mean_constraint_drift,
            "max_velocity_residual": self.max_velocity_residual,
            "settling_threshold": self.settling_threshold,
            "energy_drift": self.energy_drift,
            "min_sigma_min_J": self.min_sigma_min_J,
        }
        d["settling_time"] = self.settling_time if self.settling_time is not None else "none"
        if self.final_tracking_error is not None:
            for j, e in enumerate(self.final_tracking_error, start=1):
                d[f"final_tracking_error_{j}"] = float(e)
        return d


def summarize(
    trace: SimTrace,
    setpoint: EdgeSetpoint | None = None,
    settling_threshold: float = 1e-2,
) -> RunSummary:
    """Aggregate a trace into a RunSummary; raises on an empty trace."""
    if len(trace) == 0:
        raise ValueError("cannot summarize an empty trace")
    diags = compute_diagnostics(trace, setpoint=setpoint)
    drift = np.array([d.constraint_drift for d in diags])
    vres = np.array([d.velocity_residual_max for d in diags])
    energy = np.array([d.kinetic_energy + d.potential_energy for d in diags])
    e_scale = max(abs(energy[0]), 1e-12)
    sigma = min(d.sigma_min_J for d in diags)

    settling = None
    final_err = None
    if setpoint is not None and trace.model.edge_count:
        err_max = np.array([d.tracking_error.max() for d in diags])
        final_err = diags[-1].tracking_error
        below = err_max < settling_threshold
        if below[-1] and len(diags) > 1:
            idx = len(below) - 1
            while idx > 0 and below[idx - 1]:
                idx -= 1
            settling = float(diags[idx].t)

    return RunSummary(
        duration=float(trace.times[-1] - trace.times[0]),
        samples=len(trace),
        max_constraint_drift=float(drift.max()),
        mean_constraint_drift=float(drift.mean()),
        max_velocity_residual=float(vres.max()),
        final_tracking_error=final_err,
        settling_time=settling,
        settling_threshold=settling_threshold,
        energy_drift=float(np.abs(energy - energy[0]).max() / e_scale),
        min_sigma_min_J=float(sigma),
    )
