"""CSV trace emission: one row per sample, 17-significant-digit floats."""

from __future__ import annotations

import csv
from pathlib import Path

from .analysis import DiagnosticsRow
from .dynamics import SimTrace


def _f(x) -> str:
    return format(float(x), ".17g")


def write_trace_csv(trace: SimTrace, diags: list[DiagnosticsRow], path) -> None:
    """Write the trace with aligned per-sample diagnostics.

    diags must cover the same samples as the trace (no decimation).
    """
    if len(diags) != len(trace):
        raise ValueError(f"{len(diags)} diagnostics rows for {len(trace)} trace samples")
    model = trace.model
    n, k = model.node_count, model.edge_count

    header = ["t"]
    header += [f"q{i}_{c}" for i in range(1, n + 1) for c in "xy"]
    header += [f"v{i}_{c}" for i in range(1, n + 1) for c in "xy"]
    header += [f"qe{j}_{c}" for j in range(1, k + 1) for c in "xy"]
    header += [f"lambda{j}" for j in range(1, k + 1)]
    header += [f"ec_norm{j}" for j in range(1, k + 1)]
    header += [f"ev_norm{j}" for j in range(1, k + 1)]
    header += ["constraint_drift", "velocity_residual_max", "ke", "pe", "sigma_min_J"]
    header += [f"X_norm{j}" for j in range(1, k + 1)]

    dt_mat = model.incidence_f.T
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s, d in enumerate(diags):
            qe = dt_mat @ trace.Q[s]
            row = [_f(trace.times[s])]
            row += [_f(x) for x in trace.Q[s].reshape(-1)]
            row += [_f(x) for x in trace.Qdot[s].reshape(-1)]
            row += [_f(x) for x in qe.reshape(-1)]
            row += [_f(x) for x in trace.lam[s]]
            row += [_f(x) for x in d.tracking_error]
            row += [_f(x) for x in d.velocity_error]
            row += [
                _f(d.constraint_drift),
                _f(d.velocity_residual_max),
                _f(d.kinetic_energy),
                _f(d.potential_energy),
                _f(d.sigma_min_J),
            ]
            row += [_f(x) for x in d.residual_X]
            writer.writerow(row)
