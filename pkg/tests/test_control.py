"""Projection, per-edge control, force assemblies, closed loop."""

import numpy as np
import pytest

from linksim import (
    ControllerConfig,
    EdgeSetpoint,
    OrthogonalityViolation,
    assemble_forces_recursive,
    assemble_forces_structured,
    closed_loop_force_law,
    edge_state,
    follower_force_recursive,
    integrate,
    projection,
    solve_lambda,
)
from linksim.graph import validate_arborescence
from linksim.model import LinkageModel, assemble_state_from_edges
from linksim.verify import random_model, random_tangential_U, random_valid_state


def chain3_model():
    return LinkageModel(
        validate_arborescence(3, [(1, 2), (2, 3)]), (0.5, 1.0, 2.0), (0.4, 0.6)
    )


class TestProjection:
    def test_horizontal_rod(self):
        p = projection([0.2, 0.0], 0.2)
        assert np.allclose(p, [[0.0, 0.0], [0.0, 1.0]])

    def test_vertical_rod(self):
        p = projection([0.0, -0.2], 0.2)
        assert np.allclose(p, [[1.0, 0.0], [0.0, 0.0]])

    def test_diagonal_rod(self):
        l = 0.3
        p = projection([l / np.sqrt(2), l / np.sqrt(2)], l)
        assert np.allclose(p, [[0.5, -0.5], [-0.5, 0.5]])

    def test_idempotent_and_annihilating(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            ang = rng.uniform(0, 2 * np.pi)
            l = rng.uniform(0.1, 2.0)
            r = l * np.array([np.cos(ang), np.sin(ang)])
            p = projection(r, l)
            assert np.abs(p - p.T).max() <= 1e-15
            assert np.abs(p @ p - p).max() <= 1e-12
            assert np.abs(p @ r).max() <= 1e-12


class TestEdgeControl:
    def setup_method(self):
        self.cfg = ControllerConfig(kc=4.0, kv=2.0)
        self.cfg_ff = ControllerConfig(kc=4.0, kv=2.0, feedforward=True)

    def test_zero_error_zero_output(self):
        from linksim.control import edge_control

        sp = EdgeSetpoint.constant([[0.2, 0.0]])
        es = type("ES", (), {"Qe": np.array([[0.2, 0.0]]), "Qedot": np.zeros((1, 2))})
        u = edge_control(self.cfg, sp, es, 1, 0.0)
        assert np.abs(u).max() <= 1e-15

    def test_feedforward_term_projected(self):
        from linksim.control import edge_control

        r = np.array([0.2, 0.0])
        acc = np.array([1.0, 3.0])
        sp = EdgeSetpoint(
            position=lambda t: r[None, :],
            velocity=lambda t: np.zeros((1, 2)),
            acceleration=lambda t: acc[None, :],
        )
        es = type("ES", (), {"Qe": r[None, :].copy(), "Qedot": np.zeros((1, 2))})
        u = edge_control(self.cfg_ff, sp, es, 1, 0.0)
        assert np.allclose(u, projection(r, 0.2) @ acc)

    def test_always_orthogonal_to_rod(self):
        from linksim.control import edge_control

        rng = np.random.default_rng(1)
        for _ in range(20):
            ang = rng.uniform(0, 2 * np.pi)
            r = 0.3 * np.array([np.cos(ang), np.sin(ang)])
            sp = EdgeSetpoint.constant(rng.normal(size=(1, 2)))
            es = type(
                "ES", (), {"Qe": r[None, :].copy(), "Qedot": rng.normal(size=(1, 2))}
            )
            u = edge_control(self.cfg, sp, es, 1, 0.0)
            assert abs(u @ r) <= 1e-10


class TestStructuredAssembly:
    def test_pure_gravity_compensation(self):
        m = chain3_model()
        st = random_valid_state(m, np.random.default_rng(2))
        qe = m.incidence_f.T @ st.Q
        cfg = ControllerConfig(kc=1.0, kv=1.0)
        F = assemble_forces_structured(m, cfg, np.zeros((2, 2)), 0.0, qe)
        expected = np.column_stack([np.zeros(3), m.mass_vector * m.gravity])
        assert np.abs(F - expected).max() <= 1e-12

    def test_leader_row_exact(self):
        m = chain3_model()
        rng = np.random.default_rng(3)
        st = random_valid_state(m, rng)
        qe = m.incidence_f.T @ st.Q
        fl = np.array([0.37, -1.24])
        cfg = ControllerConfig(kc=1.0, kv=1.0, leader_force=lambda t: fl)
        U = random_tangential_U(m, qe, rng)
        F = assemble_forces_structured(m, cfg, U, 0.0, qe)
        assert F[0, 0] == fl[0]
        assert F[0, 1] == fl[1] + m.masses[0] * m.gravity

    def test_plug_identity(self):
        # D^T M^-1 F = U for arbitrary orthogonality-satisfying U.
        rng = np.random.default_rng(4)
        for _ in range(20):
            m = random_model(rng, max_nodes=10)
            st = random_valid_state(m, rng)
            qe = m.incidence_f.T @ st.Q
            U = random_tangential_U(m, qe, rng)
            cfg = ControllerConfig(kc=1.0, kv=1.0, leader_force=lambda t: np.array([0.5, -0.2]))
            F = assemble_forces_structured(m, cfg, U, 0.0, qe)
            plugged = m.incidence_f.T @ (F * m.inv_masses[:, None])
            assert np.abs(plugged - U).max() <= 1e-10

    def test_follower_rows_with_zero_U(self):
        # At the setpoint with U=0, follower forces are m_i*(f_l/m_1 + g*e_y).
        m = chain3_model()
        st = random_valid_state(m, np.random.default_rng(5))
        qe = m.incidence_f.T @ st.Q
        fl = np.array([0.0, 0.5])
        cfg = ControllerConfig(kc=1.0, kv=1.0, leader_force=lambda t: fl)
        F = assemble_forces_structured(m, cfg, np.zeros((2, 2)), 0.0, qe)
        for i in (1, 2):
            expected = m.masses[i] * (fl / m.masses[0] + np.array([0.0, m.gravity]))
            assert np.abs(F[i] - expected).max() <= 1e-12

    def test_rejects_non_orthogonal_U(self):
        m = chain3_model()
        st = random_valid_state(m, np.random.default_rng(6))
        qe = m.incidence_f.T @ st.Q
        cfg = ControllerConfig(kc=1.0, kv=1.0)
        with pytest.raises(OrthogonalityViolation):
            assemble_forces_structured(m, cfg, qe.copy(), 0.0, qe)


class TestRecursiveAssembly:
    def test_zero_u_scaled_passthrough(self):
        m = chain3_model()
        cfg = ControllerConfig(kc=1.0, kv=1.0)
        bar_parent = np.array([1.0, -2.0])
        f, bar = follower_force_recursive(m, cfg, 2, bar_parent, np.zeros(2))
        assert np.allclose(bar, m.masses[1] / m.masses[0] * bar_parent)
        assert np.allclose(f, bar + [0.0, m.masses[1] * m.gravity])

    def test_chain_unrolled_twice(self):
        # bar_f3 = m3*(f_l/m1 + u_a + u_b) on the 1->2->3 chain.
        m = chain3_model()
        fl = np.array([0.3, 0.7])
        u_a, u_b = np.array([0.1, -0.2]), np.array([-0.4, 0.5])
        cfg = ControllerConfig(kc=1.0, kv=1.0, leader_force=lambda t: fl)
        _, bar2 = follower_force_recursive(m, cfg, 2, fl, u_a)
        f3, bar3 = follower_force_recursive(m, cfg, 3, bar2, u_b)
        expected = m.masses[2] * (fl / m.masses[0] + u_a + u_b)
        assert np.abs(bar3 - expected).max() <= 1e-14

    def test_root_rejected(self):
        m = chain3_model()
        cfg = ControllerConfig(kc=1.0, kv=1.0)
        with pytest.raises(ValueError):
            follower_force_recursive(m, cfg, 1, np.zeros(2), np.zeros(2))

    def test_matches_structured_on_random_trees(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            m = random_model(rng, max_nodes=10)
            st = random_valid_state(m, rng)
            qe = m.incidence_f.T @ st.Q
            U = random_tangential_U(m, qe, rng)
            fl = rng.normal(size=2)
            cfg = ControllerConfig(kc=1.0, kv=1.0, leader_force=lambda t, v=fl: v)
            f_struct = assemble_forces_structured(m, cfg, U, 0.0, qe)
            f_rec = assemble_forces_recursive(m, cfg, U, 0.0)
            assert np.abs(f_struct - f_rec).max() <= 1e-10


class TestClosedLoop:
    def test_equilibrium_at_setpoint(self):
        m = chain3_model()
        qe_d = np.array([[0.4, 0.0], [0.0, -0.6]])
        st = assemble_state_from_edges(m, (0, 0), (0, 0), qe_d, np.zeros((2, 2)))
        cfg = ControllerConfig(kc=10.0, kv=10.0)
        law = closed_loop_force_law(m, cfg, EdgeSetpoint.constant(qe_d))
        F = law(0.0, st)
        expected = np.column_stack([np.zeros(3), m.mass_vector * m.gravity])
        assert np.abs(F - expected).max() <= 1e-12
        # The setpoint is an equilibrium: simulate and stay put.
        trace = integrate(m, st, law, 1.0, 1e-3)
        qe = np.einsum("nk,tnc->tkc", m.incidence_f, trace.Q)
        assert np.abs(qe - qe_d).max() <= 1e-9

    def test_multiplier_independence_along_run(self):
        m = chain3_model()
        qe_d = np.array([[0.4, 0.0], [0.0, -0.6]])
        st = assemble_state_from_edges(
            m, (0, 0), (0, 0),
            [[0.0, -0.4], [0.6, 0.0]], np.zeros((2, 2)),
        )
        cfg = ControllerConfig(kc=10.0, kv=10.0, leader_force=lambda t: np.array([0.1, 0.2]))
        law = closed_loop_force_law(m, cfg, EdgeSetpoint.constant(qe_d))
        trace = integrate(m, st, law, 0.5, 1e-3)
        for s in range(0, len(trace), 100):
            state = trace.state(s)
            lam_f = solve_lambda(m, state, trace.F[s])
            lam_0 = solve_lambda(m, state, np.zeros((3, 2)))
            assert np.abs(lam_f - lam_0).max() <= 1e-10

    def test_error_dynamics_identity(self):
        # edot_vj from the node dynamics equals
        # -kc P_j e_cj - kv P_j e_vj + X_j for a constant setpoint.
        from linksim.analysis import residual_vector

        m = chain3_model()
        qe_d = np.array([[0.4, 0.0], [0.0, -0.6]])
        st = assemble_state_from_edges(
            m, (0, 0), (0, 0),
            [[0.0, -0.4], [0.6, 0.0]],
            np.array([[0.2, 0.0], [0.0, 0.3]]),
        )
        cfg = ControllerConfig(kc=10.0, kv=10.0)
        sp = EdgeSetpoint.constant(qe_d)
        law = closed_loop_force_law(m, cfg, sp)
        F = law(st.t, st)
        lam = solve_lambda(m, st, F)
        from linksim import edge_accelerations

        qedd = edge_accelerations(m, st, F)  # = edot_v for constant setpoint
        es = edge_state(m, st)
        for j in range(1, 3):
            p = projection(es.Qe[j - 1], np.linalg.norm(es.Qe[j - 1]))
            e_c = es.Qe[j - 1] - qe_d[j - 1]
            e_v = es.Qedot[j - 1]
            rhs = -cfg.kc * p @ e_c - cfg.kv * p @ e_v + residual_vector(m, st, lam, j)
            assert np.abs(qedd[j - 1] - rhs).max() <= 1e-8
