"""Built-in scenarios and the config-driven scenario builder."""

import math

import numpy as np
import pytest

from linksim import (
    edge_state,
    five_link_scenario,
    scenario_from_config,
    two_link_scenario,
    validate_state,
)
from linksim.scenarios import ConfigError, dumbbell_scenario, flapping_setpoint


class TestTwoLink:
    def setup_method(self):
        self.scen = two_link_scenario()

    def test_model_parameters(self):
        m = self.scen.model
        assert m.graph.edges == ((1, 2), (1, 3))
        assert m.masses == (0.7, 0.2, 0.2)
        assert m.lengths == (0.1, 0.1)
        assert m.gravity == 9.81
        assert self.scen.controller.kc == 10.0
        assert self.scen.controller.kv == 10.0
        assert not self.scen.controller.feedforward

    def test_leader_force_sinusoid(self):
        fl = self.scen.controller.leader_force
        assert np.allclose(fl(0.0), [0.0, 0.5])
        assert np.allclose(fl(1.0), [0.0, -0.5])
        assert abs(fl(0.5)[1]) <= 1e-15

    def test_initial_state_hangs_down(self):
        es = edge_state(self.scen.model, self.scen.initial_state)
        assert np.allclose(es.Qe, [[0.0, -0.1], [0.0, -0.1]])
        assert not es.Qedot.any()
        validate_state(self.scen.model, self.scen.initial_state)

    def test_setpoint_constant(self):
        sp = self.scen.setpoint
        for t in (0.0, 1.3, 7.0):
            assert np.allclose(sp.position(t), [[-0.1, 0.0], [0.1, 0.0]])
            assert not sp.velocity(t).any()


class TestFiveLink:
    def setup_method(self):
        self.scen = five_link_scenario()

    def test_model_parameters(self):
        m = self.scen.model
        assert m.graph.edges == ((1, 2), (1, 3), (1, 4), (4, 5), (4, 6))
        assert m.masses == (0.7, 0.2, 0.2, 0.5, 0.1, 0.1)
        assert m.lengths == (0.3,) * 5
        assert self.scen.controller.feedforward

    def test_leader_force_is_sine(self):
        fl = self.scen.controller.leader_force
        for t in np.linspace(0, 2, 17):
            assert fl(t)[0] == 0.0
            assert fl(t)[1] == pytest.approx(math.sin(2 * math.pi * t), abs=1e-12)

    def test_setpoint_at_zero(self):
        # theta(0) = 3pi/16 + pi/16 = pi/4.
        sp = self.scen.setpoint
        l, th = 0.3, math.pi / 4
        c, s = l * math.cos(th), l * math.sin(th)
        expected = [[-c, -s], [c, -s], [0.0, l], [-c, s], [c, s]]
        assert np.allclose(sp.position(0.0), expected)
        assert not sp.velocity(0.0).any()  # theta_dot(0) = 0

    def test_setpoint_row_norms_constant(self):
        sp = self.scen.setpoint
        for t in np.linspace(0, 10, 41):
            norms = np.linalg.norm(sp.position(t), axis=1)
            assert np.abs(norms - 0.3).max() <= 1e-12

    def test_setpoint_velocity_tangential(self):
        sp = self.scen.setpoint
        for t in np.linspace(0, 10, 41):
            dots = np.sum(sp.position(t) * sp.velocity(t), axis=1)
            assert np.abs(dots).max() <= 1e-12

    def test_setpoint_derivatives_by_finite_difference(self):
        sp = self.scen.setpoint
        h = 1e-6
        for t in (0.3, 1.7, 4.2):
            v_fd = (sp.position(t + h) - sp.position(t - h)) / (2 * h)
            a_fd = (sp.velocity(t + h) - sp.velocity(t - h)) / (2 * h)
            assert np.abs(v_fd - sp.velocity(t)).max() <= 1e-6
            assert np.abs(a_fd - sp.acceleration(t)).max() <= 1e-6

    def test_center_link_on_target_initially(self):
        es = edge_state(self.scen.model, self.scen.initial_state)
        sp = self.scen.setpoint.position(0.0)
        assert np.allclose(es.Qe[2], sp[2])
        assert not np.allclose(es.Qe[0], sp[0])


class TestDumbbell:
    def test_com_at_origin_and_still(self):
        scen = dumbbell_scenario(0.4, 1.3, 0.7, 3.0)
        st = scen.initial_state
        m = np.array([0.4, 1.3])
        com = m @ st.Q / m.sum()
        com_v = m @ st.Qdot / m.sum()
        assert np.abs(com).max() <= 1e-15
        assert np.abs(com_v).max() <= 1e-12

    def test_rigid_rotation_velocities(self):
        omega = 3.0
        scen = dumbbell_scenario(0.4, 1.3, 0.7, omega)
        st = scen.initial_state
        for i in range(2):
            expected = omega * np.array([-st.Q[i, 1], st.Q[i, 0]])
            assert np.abs(st.Qdot[i] - expected).max() <= 1e-12

    def test_no_controller(self):
        scen = dumbbell_scenario()
        assert scen.controller is None
        F = scen.force_law()(0.0, scen.initial_state)
        assert not F.any()

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            dumbbell_scenario(m_a=-1.0)


class TestConfigBuilder:
    def base_cfg(self):
        return {
            "graph": {"edges": [[1, 2]]},
            "model": {"masses": [1.0, 2.0], "lengths": [0.5]},
        }

    def test_defaults(self):
        scen = scenario_from_config(self.base_cfg())
        assert scen.duration == 10.0
        assert scen.dt == 1e-3
        assert not scen.projection
        assert scen.model.gravity == 9.81
        es = edge_state(scen.model, scen.initial_state)
        assert np.allclose(es.Qe, [[0.0, -0.5]])  # hangs down by default

    def test_directions_normalized(self):
        cfg = self.base_cfg()
        cfg["initial"] = {"edge_directions": [[3.0, 4.0]]}
        scen = scenario_from_config(cfg)
        es = edge_state(scen.model, scen.initial_state)
        assert np.allclose(es.Qe, [[0.3, 0.4]])

    def test_rates_give_tangential_velocity(self):
        cfg = self.base_cfg()
        cfg["initial"] = {"edge_directions": [[1.0, 0.0]], "edge_rates": [2.0]}
        scen = scenario_from_config(cfg)
        es = edge_state(scen.model, scen.initial_state)
        assert np.allclose(es.Qedot, [[0.0, 1.0]])

    def test_missing_sections(self):
        with pytest.raises(ConfigError):
            scenario_from_config({"graph": {"edges": [[1, 2]]}})

    def test_zero_direction_rejected(self):
        cfg = self.base_cfg()
        cfg["initial"] = {"edge_directions": [[0.0, 0.0]]}
        with pytest.raises(ConfigError):
            scenario_from_config(cfg)

    def test_controller_requires_setpoint(self):
        cfg = self.base_cfg()
        cfg["controller"] = {"kc": 1.0, "kv": 1.0}
        with pytest.raises(ConfigError):
            scenario_from_config(cfg)

    def test_unknown_trajectory(self):
        cfg = self.base_cfg()
        cfg["controller"] = {"kc": 1.0, "kv": 1.0}
        cfg["setpoint"] = {"trajectory": "nope"}
        with pytest.raises(ConfigError):
            scenario_from_config(cfg)


def test_flapping_setpoint_needs_five_edges():
    with pytest.raises(ConfigError):
        flapping_setpoint([0.3] * 4, 1.0, 1.0, 0.0)
