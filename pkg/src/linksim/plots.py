"""Static SVG figures for a simulation run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analysis import DiagnosticsRow
from .control import EdgeSetpoint
from .dynamics import SimTrace


def plot_edge_tracking(trace: SimTrace, setpoint: EdgeSetpoint | None, path) -> None:
    """Edge-coordinate components vs time, one row of axes per edge,
    with dashed desired overlays when a setpoint is given."""
    model = trace.model
    k = model.edge_count
    if k == 0:
        return
    t = trace.times
    qe = np.einsum("nk,tnc->tkc", model.incidence_f, trace.Q)
    desired = None
    if setpoint is not None:
        desired = np.stack([setpoint.position(float(ti)) for ti in t])

    fig, axes = plt.subplots(k, 2, figsize=(9, 1.8 * k), sharex=True, squeeze=False)
    for j in range(k):
        for c, label in enumerate("xy"):
            ax = axes[j][c]
            ax.plot(t, qe[:, j, c], lw=1.0, label=f"edge {j + 1} {label}")
            if desired is not None:
                ax.plot(t, desired[:, j, c], "k--", lw=0.8, label="desired")
            ax.set_ylabel(f"$r_{{e{j + 1},{label}}}$ [m]")
            if j == 0 and c == 1:
                ax.legend(loc="upper right", fontsize=7)
    for ax in axes[-1]:
        ax.set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)


def plot_diagnostics(diags: list[DiagnosticsRow], out_dir) -> None:
    """constraint drift, smallest multiplier eigenvalue, and energy figures."""
    out_dir = Path(out_dir)
    t = np.array([d.t for d in diags])

    fig, ax = plt.subplots(figsize=(7, 3))
    ax.semilogy(t, np.maximum([d.constraint_drift for d in diags], 1e-18), lw=1.0)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("max rod-length drift [m]")
    fig.tight_layout()
    fig.savefig(out_dir / "constraint_drift.svg", format="svg")
    plt.close(fig)

    sigma = np.array([d.sigma_min_J for d in diags])
    if np.all(np.isfinite(sigma)):
        fig, ax = plt.subplots(figsize=(7, 3))
        ax.plot(t, sigma, lw=1.0)
        ax.set_xlabel("t [s]")
        ax.set_ylabel(r"$\sigma_{\min}(J)$")
        fig.tight_layout()
        fig.savefig(out_dir / "sigma_min.svg", format="svg")
        plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 3))
    ke = np.array([d.kinetic_energy for d in diags])
    pe = np.array([d.potential_energy for d in diags])
    ax.plot(t, ke, lw=1.0, label="kinetic")
    ax.plot(t, pe, lw=1.0, label="potential")
    ax.plot(t, ke + pe, lw=1.0, label="total")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("energy [J]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "energy.svg", format="svg")
    plt.close(fig)
