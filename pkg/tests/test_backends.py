"""Compiled and pure-Python kernel backends must be interchangeable."""

import numpy as np
import pytest

from linksim import SystemState, node_accelerations, solve_lambda
from linksim.dynamics import available_backends, backend_name, use_backend
from linksim.verify import random_model, random_valid_state

pytestmark = pytest.mark.skipif(
    "compiled" not in available_backends(),
    reason="compiled kernel not built",
)


@pytest.fixture
def restore_backend():
    original = backend_name()
    yield
    use_backend(original)


def test_both_backends_listed():
    assert set(available_backends()) == {"compiled", "python"}


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        use_backend("fortran")


def test_backends_agree_on_random_states(restore_backend):
    rng = np.random.default_rng(11)
    for _ in range(30):
        m = random_model(rng, max_nodes=12)
        st = random_valid_state(m, rng)
        F = rng.normal(0, 3, (m.node_count, 2))
        use_backend("compiled")
        qdd_c = node_accelerations(m, st, F)
        lam_c = solve_lambda(m, st, F)
        use_backend("python")
        qdd_p = node_accelerations(m, st, F)
        lam_p = solve_lambda(m, st, F)
        assert np.abs(qdd_c - qdd_p).max() <= 1e-12
        assert np.abs(lam_c - lam_p).max() <= 1e-12


def test_both_raise_on_degenerate_state(restore_backend):
    from linksim import LinkageModel, NotPositiveDefinite
    from linksim.graph import validate_arborescence

    m = LinkageModel(validate_arborescence(2, [(1, 2)]), (1.0, 1.0), (0.5,))
    st = SystemState(0.0, np.zeros((2, 2)), np.zeros((2, 2)))
    for name in ("compiled", "python"):
        use_backend(name)
        with pytest.raises(NotPositiveDefinite):
            solve_lambda(m, st, np.zeros((2, 2)))


def test_non_contiguous_input_accepted(restore_backend):
    m = random_model(np.random.default_rng(13), max_nodes=6)
    st = random_valid_state(m, np.random.default_rng(13))
    wide = np.zeros((m.node_count, 4))
    wide[:, :2] = st.Q
    view = SystemState(0.0, wide[:, :2], st.Qdot.copy())
    for name in available_backends():
        use_backend(name)
        lam = solve_lambda(m, view, np.zeros((m.node_count, 2)))
        assert np.isfinite(lam).all()
