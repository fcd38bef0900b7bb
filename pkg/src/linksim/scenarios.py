"""Ready-to-run scenario definitions and the config-dict scenario builder.

Every scenario is fully described by a plain config dict (the same
structure the TOML files use), so the built-ins export, reload and re-run
identically.  Initial conditions are given as per-edge unit directions
and angular rates plus the root position/velocity, and assembled onto the
constraint manifold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .control import ControllerConfig, EdgeSetpoint, closed_loop_force_law, zero_force_law
from .dynamics import ForceLaw
from .graph import validate_arborescence
from .model import LinkageModel, SystemState, assemble_state_from_edges


class ConfigError(ValueError):
    """Malformed scenario configuration."""


@dataclass
class Scenario:
    """A model, an initial state, a (possibly absent) controller, and run settings."""

    name: str
    model: LinkageModel
    initial_state: SystemState
    controller: ControllerConfig | None
    setpoint: EdgeSetpoint | None
    duration: float
    dt: float
    projection: bool
    config: dict

    def force_law(self) -> ForceLaw:
        if self.controller is None:
            return zero_force_law(self.model)
        return closed_loop_force_law(self.model, self.controller, self.setpoint)


def _sinusoid_force(spec: dict) -> Callable[[float], np.ndarray]:
    """Per-axis a*cos(omega*t + phase) leader force from config coefficients."""
    ax = spec.get("x", {})
    ay = spec.get("y", {})
    coeffs = [
        (float(a.get("amp", 0.0)), float(a.get("omega", 0.0)), float(a.get("phase", 0.0)))
        for a in (ax, ay)
    ]

    def f(t: float) -> np.ndarray:
        return np.array([a * math.cos(w * t + p) for a, w, p in coeffs])

    return f


def flapping_setpoint(
    lengths,
    theta_amp: float,
    theta_omega: float,
    theta_offset: float,
) -> EdgeSetpoint:
    """Five-edge sinusoidal "flapping" trajectory with analytic derivatives.

    Edge rows swing by theta(t) = amp*cos(omega*t) + offset: rows 1 and 2
    point down-left/down-right, row 3 is the constant vertical center
    link, rows 4 and 5 point up-left/up-right.
    """
    l = np.asarray(lengths, dtype=float)
    if l.shape != (5,):
        raise ConfigError("the flapping trajectory requires exactly 5 edges")
    sx = np.array([-1.0, 1.0, 0.0, -1.0, 1.0])
    sy = np.array([-1.0, -1.0, 0.0, 1.0, 1.0])

    def theta(t):
        return theta_amp * math.cos(theta_omega * t) + theta_offset

    def theta_dot(t):
        return -theta_amp * theta_omega * math.sin(theta_omega * t)

    def theta_ddot(t):
        return -theta_amp * theta_omega**2 * math.cos(theta_omega * t)

    def position(t: float) -> np.ndarray:
        th = theta(t)
        out = np.column_stack([sx * l * math.cos(th), sy * l * math.sin(th)])
        out[2] = (0.0, l[2])
        return out

    def velocity(t: float) -> np.ndarray:
        th, thd = theta(t), theta_dot(t)
        out = np.column_stack([-sx * l * math.sin(th) * thd, sy * l * math.cos(th) * thd])
        out[2] = (0.0, 0.0)
        return out

    def acceleration(t: float) -> np.ndarray:
        th, thd, thdd = theta(t), theta_dot(t), theta_ddot(t)
        c, s = math.cos(th), math.sin(th)
        out = np.column_stack(
            [-sx * l * (c * thd**2 + s * thdd), sy * l * (-s * thd**2 + c * thdd)]
        )
        out[2] = (0.0, 0.0)
        return out

    return EdgeSetpoint(position=position, velocity=velocity, acceleration=acceleration)


def scenario_from_config(cfg: dict, name: str = "custom") -> Scenario:
    """Build a validated, manifold-consistent Scenario from a config dict."""
    try:
        graph_cfg = cfg["graph"]
        model_cfg = cfg["model"]
        sim_cfg = cfg.get("sim", {})
        init_cfg = cfg.get("initial", {})
        edges = [(int(t), int(h)) for t, h in graph_cfg["edges"]]
        masses = [float(m) for m in model_cfg["masses"]]
        lengths = [float(l) for l in model_cfg["lengths"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario config: {exc}") from exc

    graph = validate_arborescence(len(masses), edges)
    model = LinkageModel(
        graph=graph,
        masses=tuple(masses),
        lengths=tuple(lengths),
        gravity=float(model_cfg.get("gravity", 9.81)),
    )

    k = model.edge_count
    dirs = np.asarray(init_cfg.get("edge_directions", [[0.0, -1.0]] * k), dtype=float)
    if dirs.shape != (k, 2):
        raise ConfigError(f"expected {k} edge directions, got shape {dirs.shape}")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms == 0):
        raise ConfigError("edge directions must be nonzero")
    qe = dirs / norms[:, None] * model.length_vector[:, None]
    rates = np.asarray(init_cfg.get("edge_rates", [0.0] * k), dtype=float)
    qedot = rates[:, None] * np.column_stack([-qe[:, 1], qe[:, 0]])
    initial_state = assemble_state_from_edges(
        model,
        init_cfg.get("root_position", (0.0, 0.0)),
        init_cfg.get("root_velocity", (0.0, 0.0)),
        qe,
        qedot,
    )

    controller = None
    setpoint = None
    if "controller" in cfg:
        ctl_cfg = cfg["controller"]
        controller = ControllerConfig(
            kc=float(ctl_cfg["kc"]),
            kv=float(ctl_cfg["kv"]),
            leader_force=_sinusoid_force(ctl_cfg.get("leader_force", {})),
            feedforward=bool(ctl_cfg.get("feedforward", False)),
        )
        sp_cfg = cfg.get("setpoint")
        if sp_cfg is None:
            raise ConfigError("a [setpoint] section is required with [controller]")
        if "constant" in sp_cfg:
            setpoint = EdgeSetpoint.constant(sp_cfg["constant"])
        elif sp_cfg.get("trajectory") == "five_link_flap":
            setpoint = flapping_setpoint(
                model.lengths,
                theta_amp=float(sp_cfg["theta_amp"]),
                theta_omega=float(sp_cfg["theta_omega"]),
                theta_offset=float(sp_cfg["theta_offset"]),
            )
        else:
            raise ConfigError(f"unrecognized setpoint section: {sorted(sp_cfg)}")

    return Scenario(
        name=str(cfg.get("name", name)),
        model=model,
        initial_state=initial_state,
        controller=controller,
        setpoint=setpoint,
        duration=float(sim_cfg.get("duration", 10.0)),
        dt=float(sim_cfg.get("dt", 1e-3)),
        projection=bool(sim_cfg.get("projection", False)),
        config=cfg,
    )


def two_link_config() -> dict:
    return {
        "name": "two_link",
        "graph": {"edges": [[1, 2], [1, 3]]},
        "model": {"masses": [0.7, 0.2, 0.2], "lengths": [0.1, 0.1], "gravity": 9.81},
        "controller": {
            "kc": 10.0,
            "kv": 10.0,
            "feedforward": False,
            "leader_force": {"y": {"amp": 0.5, "omega": math.pi, "phase": 0.0}},
        },
        "setpoint": {"constant": [[-0.1, 0.0], [0.1, 0.0]]},
        "sim": {"duration": 10.0, "dt": 1e-3, "projection": False},
        "initial": {
            "root_position": [0.0, 0.0],
            "root_velocity": [0.0, 0.0],
            "edge_directions": [[0.0, -1.0], [0.0, -1.0]],
            "edge_rates": [0.0, 0.0],
        },
    }


def five_link_config() -> dict:
    # sin(2*pi*t) written as cos(2*pi*t - pi/2).
    return {
        "name": "five_link",
        "graph": {"edges": [[1, 2], [1, 3], [1, 4], [4, 5], [4, 6]]},
        "model": {
            "masses": [0.7, 0.2, 0.2, 0.5, 0.1, 0.1],
            "lengths": [0.3, 0.3, 0.3, 0.3, 0.3],
            "gravity": 9.81,
        },
        "controller": {
            "kc": 10.0,
            "kv": 10.0,
            "feedforward": True,
            "leader_force": {"y": {"amp": 1.0, "omega": 2 * math.pi, "phase": -math.pi / 2}},
        },
        "setpoint": {
            "trajectory": "five_link_flap",
            "theta_amp": 3 * math.pi / 16,
            "theta_omega": math.pi,
            "theta_offset": math.pi / 16,
        },
        "sim": {"duration": 10.0, "dt": 1e-3, "projection": False},
        "initial": {
            "root_position": [0.0, 0.0],
            "root_velocity": [0.0, 0.0],
            # Vertical start, each link pointing toward the sign of its
            # desired y-component at t=0; the center link starts on target.
            "edge_directions": [
                [0.0, -1.0],
                [0.0, -1.0],
                [0.0, 1.0],
                [0.0, 1.0],
                [0.0, 1.0],
            ],
            "edge_rates": [0.0] * 5,
        },
    }


def dumbbell_config(m_a: float = 1.0, m_b: float = 1.0, length: float = 1.0, omega: float = 2.0) -> dict:
    """Two masses on one rod, spinning about their center of mass, F = 0."""
    total = m_a + m_b
    return {
        "name": "dumbbell",
        "graph": {"edges": [[1, 2]]},
        "model": {"masses": [m_a, m_b], "lengths": [length], "gravity": 9.81},
        "sim": {"duration": 10.0, "dt": 1e-3, "projection": False},
        "initial": {
            # Root placed so the center of mass starts at the origin.
            "root_position": [-m_b * length / total, 0.0],
            "root_velocity": [0.0, -omega * m_b * length / total],
            "edge_directions": [[1.0, 0.0]],
            "edge_rates": [omega],
        },
    }


def two_link_scenario() -> Scenario:
    return scenario_from_config(two_link_config())


def five_link_scenario() -> Scenario:
    return scenario_from_config(five_link_config())


def dumbbell_scenario(
    m_a: float = 1.0, m_b: float = 1.0, length: float = 1.0, omega: float = 2.0
) -> Scenario:
    for v in (m_a, m_b, length):
        if v <= 0:
            raise ValueError("dumbbell parameters must be positive")
    return scenario_from_config(dumbbell_config(m_a, m_b, length, omega))


BUILTIN_SCENARIOS: dict[str, Callable[[], dict]] = {
    "two_link": two_link_config,
    "five_link": five_link_config,
    "dumbbell": dumbbell_config,
}
