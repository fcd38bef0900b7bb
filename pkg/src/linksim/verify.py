"""Invariant and oracle verification campaigns behind `linksim verify`.

Each check returns (name, passed, measured) where measured is a short
human-readable residual description; the CLI prints one line per check.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import analysis, control, dynamics, graph, oracle
from .model import LinkageModel, SystemState, assemble_state_from_edges
from .scenarios import dumbbell_scenario, five_link_scenario

CheckResult = tuple[str, bool, str]

FIVE_LINK_D = np.array(
    [
        [-1, -1, -1, 0, 0],
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [0, 0, 1, -1, -1],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
    ]
)
FIVE_LINK_H = np.array(
    [
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 1, 1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
    ]
)


def random_model(rng: np.random.Generator, max_nodes: int = 8) -> LinkageModel:
    n = int(rng.integers(2, max_nodes + 1))
    g = graph.random_arborescence(n, rng)
    return LinkageModel(
        graph=g,
        masses=tuple(rng.uniform(0.1, 2.0, n)),
        lengths=tuple(rng.uniform(0.2, 1.5, n - 1)),
        gravity=9.81,
    )


def random_valid_state(model: LinkageModel, rng: np.random.Generator) -> SystemState:
    """Random state exactly on the constraint manifold (random rod angles
    and angular rates, random root motion)."""
    k = model.edge_count
    ang = rng.uniform(0, 2 * np.pi, k)
    qe = model.length_vector[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    rates = rng.uniform(-2.0, 2.0, k)
    qedot = rates[:, None] * np.column_stack([-qe[:, 1], qe[:, 0]])
    return assemble_state_from_edges(
        model, rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2), qe, qedot
    )


def random_tangential_U(model: LinkageModel, qe: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rows orthogonal to the matching rod vectors, random magnitudes."""
    perp = np.column_stack([-qe[:, 1], qe[:, 0]]) / model.length_vector[:, None]
    return rng.uniform(-3.0, 3.0, model.edge_count)[:, None] * perp


# ---------------------------------------------------------------- graph

def check_five_link_matrices() -> CheckResult:
    scen = five_link_scenario()
    d = scen.model.incidence
    h = scen.model.head_memberships
    ok = (
        np.array_equal(d, FIVE_LINK_D)
        and np.array_equal(h, FIVE_LINK_H)
        and np.array_equal(h @ d, np.eye(5, dtype=np.int64))
    )
    return ("five-link D, H and H@D=I match exactly", ok, "integer-exact")


def check_random_graph_identities(trials: int = 50, max_nodes: int = 50) -> CheckResult:
    rng = np.random.default_rng(2024)
    worst_sv = np.inf
    for _ in range(trials):
        n = int(rng.integers(2, max_nodes + 1))
        g = graph.random_arborescence(n, rng)
        d = graph.incidence_matrix(g)
        h = graph.left_inverse(g)
        if not np.array_equal(h @ d, np.eye(n - 1, dtype=np.int64)):
            return ("random trees: H@D=I", False, f"failed at n={n}")
        if np.any(d.sum(axis=0) != 0):
            return ("random trees: 1^T D = 0", False, f"failed at n={n}")
        sv = np.linalg.svd(d.astype(float), compute_uv=False)[-1]
        worst_sv = min(worst_sv, sv)
        w = rng.uniform(0.1, 3.0, n)
        le = graph.node_weighted_edge_laplacian(d, w)
        if np.linalg.eigvalsh(le)[0] <= 0:
            return ("random trees: L_e SPD", False, f"failed at n={n}")
        for j in range(1, n):
            hc = graph.head_component(g, j)
            tc = graph.tail_component(g, j)
            if hc & tc or hc | tc != set(range(1, n + 1)):
                return ("random trees: head/tail partition", False, f"failed at n={n}")
    ok = worst_sv > 1e-10
    return ("random trees: H@D=I, 1^T D=0, rank, L_e SPD, partitions", ok,
            f"min singular value {worst_sv:.3e}")


# ------------------------------------------------------------- dynamics

def check_dumbbell_multiplier() -> CheckResult:
    m_a, m_b, ell, omega = 0.4, 1.3, 0.7, 3.0
    scen = dumbbell_scenario(m_a, m_b, ell, omega)
    mu = 1.0 / (1.0 / m_a + 1.0 / m_b)
    lam = dynamics.solve_lambda(scen.model, scen.initial_state, np.zeros((2, 2)))
    rel = abs(lam[0] - mu * omega**2) / (mu * omega**2)
    return ("spinning dumbbell multiplier = mu*omega^2", rel <= 1e-10, f"rel err {rel:.3e}")


def check_kkt_agreement(trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(trials):
        m = random_model(rng)
        st = random_valid_state(m, rng)
        F = rng.normal(0.0, 2.0, (m.node_count, 2))
        lam_a = dynamics.solve_lambda(m, st, F)
        lam_b = oracle.kkt_lambda(m, st, F)
        denom = max(np.linalg.norm(lam_b), 1e-12)
        worst = max(worst, np.linalg.norm(lam_a - lam_b) / denom)
    return (f"closed-form vs KKT multipliers on {trials} random states", worst <= 1e-8,
            f"worst rel err {worst:.3e}")


def check_dynamics_identities(trials: int = 25) -> CheckResult:
    rng = np.random.default_rng(11)
    worst = {"gamma": 0.0, "edge": 0.0, "second": 0.0, "colsum": 0.0}
    for _ in range(trials):
        m = random_model(rng)
        st = random_valid_state(m, rng)
        F = rng.normal(0.0, 2.0, (m.node_count, 2))
        lam = dynamics.solve_lambda(m, st, F)
        gamma = dynamics.constraint_forces(m, st, lam)
        gamma_sum = sum(
            lam[j - 1] * dynamics.constraint_jacobian(m, st, j).T
            for j in range(1, m.edge_count + 1)
        )
        worst["gamma"] = max(worst["gamma"], float(np.abs(gamma - gamma_sum).max()))
        worst["colsum"] = max(worst["colsum"], float(np.abs(gamma.sum(axis=0)).max()))
        qdd = dynamics.node_accelerations(m, st, F)
        qedd = dynamics.edge_accelerations(m, st, F)
        worst["edge"] = max(worst["edge"], float(np.abs(m.incidence_f.T @ qdd - qedd).max()))
        for j in range(1, m.edge_count + 1):
            d = m.incidence_f[:, j - 1]
            res = d @ qdd @ (st.Q.T @ d) + float(np.sum((st.Qdot.T @ d) ** 2))
            worst["second"] = max(worst["second"], abs(res))
    ok = (
        worst["gamma"] <= 1e-12
        and worst["colsum"] <= 1e-12
        and worst["edge"] <= 1e-10
        and worst["second"] <= 1e-8
    )
    return ("constraint-force, edge-acceleration and second-derivative identities", ok,
            f"residuals {worst}")


def check_conservation() -> CheckResult:
    scen = dumbbell_scenario(1.0, 1.0, 1.0, 2.0)
    trace = dynamics.integrate(scen.model, scen.initial_state, scen.force_law(), 2.0, 1e-3)
    summary = analysis.summarize(trace)
    return ("free dumbbell energy conservation over 2 s", summary.energy_drift <= 1e-5,
            f"relative drift {summary.energy_drift:.3e}")


# -------------------------------------------------------------- control

def check_assembly_equivalence(trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(trials):
        m = random_model(rng, max_nodes=10)
        st = random_valid_state(m, rng)
        qe = m.incidence_f.T @ st.Q
        U = random_tangential_U(m, qe, rng)
        cfg = control.ControllerConfig(
            kc=1.0, kv=1.0,
            leader_force=(lambda t, v=rng.normal(0, 1, 2): v),
        )
        f_struct = control.assemble_forces_structured(m, cfg, U, 0.0, qe)
        f_rec = control.assemble_forces_recursive(m, cfg, U, 0.0)
        worst = max(worst, float(np.abs(f_struct - f_rec).max()))
    return (f"recursive vs structured force assembly on {trials} random trees",
            worst <= 1e-10, f"worst row diff {worst:.3e}")


def check_multiplier_independence(trials: int = 50) -> CheckResult:
    rng = np.random.default_rng(31)
    worst_diag = 0.0
    worst_lam = 0.0
    for _ in range(trials):
        m = random_model(rng)
        st = random_valid_state(m, rng)
        qe = m.incidence_f.T @ st.Q
        U = random_tangential_U(m, qe, rng)
        cfg = control.ControllerConfig(
            kc=1.0, kv=1.0,
            leader_force=(lambda t, v=rng.normal(0, 1, 2): v),
        )
        F = control.assemble_forces_structured(m, cfg, U, 0.0, qe)
        plugged = m.incidence_f.T @ (F * m.inv_masses[:, None])
        worst_diag = max(worst_diag, float(np.abs(np.sum(plugged * qe, axis=1)).max()))
        lam_f = dynamics.solve_lambda(m, st, F)
        lam_0 = dynamics.solve_lambda(m, st, np.zeros((m.node_count, 2)))
        worst_lam = max(worst_lam, float(np.abs(lam_f - lam_0).max()))
    ok = worst_diag <= 1e-10 and worst_lam <= 1e-10
    return ("control forces leave the multipliers unchanged", ok,
            f"diag residual {worst_diag:.3e}, lambda diff {worst_lam:.3e}")


# --------------------------------------------------------------- oracle

def check_chain_oracle() -> CheckResult:
    scen = dumbbell_scenario(0.8, 1.1, 0.9, 1.5)
    trace = dynamics.integrate(scen.model, scen.initial_state, scen.force_law(), 2.0, 1e-3)
    st0 = scen.initial_state
    r_e = st0.Q[1] - st0.Q[0]
    angle = np.arctan2(r_e[1], r_e[0])
    rate = 1.5
    times, pos = oracle.minimal_coordinate_chain(
        scen.model, [angle], [rate], scen.force_law(), 2.0, 1e-3,
        root_position=st0.Q[0], root_velocity=st0.Qdot[0],
    )
    err = float(np.abs(pos - trace.Q).max())
    return ("dumbbell trajectory vs minimal-coordinate oracle over 2 s",
            err <= 1e-6, f"max position diff {err:.3e}")


SUITES: dict[str, list[Callable[[], CheckResult]]] = {
    "graph": [check_five_link_matrices, check_random_graph_identities],
    "dynamics": [
        check_dumbbell_multiplier,
        check_kkt_agreement,
        check_dynamics_identities,
        check_conservation,
    ],
    "control": [check_assembly_equivalence, check_multiplier_independence],
    "oracle": [check_kkt_agreement, check_chain_oracle],
}


def run_suite(name: str, report=print) -> bool:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    all_ok = True
    for suite in names:
        for check in SUITES[suite]:
            title, ok, measured = check()
            all_ok &= ok
            report(f"[{'PASS' if ok else 'FAIL'}] {suite}: {title} ({measured})")
    return all_ok
