"""linksim: planar tree-linked rigid-rod dynamics and decentralized control.

Point masses joined by massless rigid rods in a rooted-tree topology,
integrated in over-parameterized node coordinates with closed-form
Lagrange multipliers, and regulated by a leader-follower controller
acting on the rod displacement (edge) coordinates.
"""

from .graph import (
    Arborescence,
    CycleDetected,
    Disconnected,
    GraphError,
    MultipleParents,
    WrongEdgeCount,
    head_component,
    incidence_matrix,
    left_inverse,
    node_weighted_edge_laplacian,
    tail_component,
    validate_arborescence,
    weighted_graph_laplacian,
)
from .model import (
    ConstraintViolation,
    EdgeState,
    LinkageModel,
    SystemState,
    assemble_state_from_edges,
    edge_state,
    holonomic_residual,
    kinetic_and_potential_energy,
    validate_state,
    velocity_residual,
)
from .dynamics import (
    NonFiniteState,
    NotPositiveDefinite,
    SimTrace,
    backend_name,
    constraint_forces,
    constraint_jacobian,
    edge_accelerations,
    integrate,
    node_accelerations,
    solve_lambda,
    use_backend,
)
from .control import (
    ControllerConfig,
    EdgeSetpoint,
    OrthogonalityViolation,
    assemble_forces_recursive,
    assemble_forces_structured,
    closed_loop_force_law,
    edge_control,
    follower_force_recursive,
    projection,
)
from .scenarios import (
    Scenario,
    dumbbell_scenario,
    five_link_scenario,
    scenario_from_config,
    two_link_scenario,
)
from .analysis import bound_terms, compute_diagnostics, residual_vector, summarize
from .oracle import kkt_lambda, minimal_coordinate_chain

__version__ = "0.1.0"
