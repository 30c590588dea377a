import numpy as np
import pytest

from taskrepair.dmp import (
    DmpSkillController,
    GOAL_TOLERANCE,
    chain_demonstrations,
    dmp_rollout,
    fit_dmp,
    load_controller,
    rollout_batch,
    save_controller,
)
from taskrepair.feasibility import abstract_lenient

F = frozenset


def test_zero_weights_attractor_is_straight_segment():
    ctrl = DmpSkillController(dims=2)
    path = dmp_rollout(ctrl, (0.5, 0.5), (2.5, 2.5))
    assert path.shape == (50, 2)
    assert np.allclose(path[0], (0.5, 0.5))
    assert np.linalg.norm(path[-1] - (2.5, 2.5)) < GOAL_TOLERANCE
    # equal per-dimension gains keep the motion on the chord
    d = path - path[0]
    cross = d[:, 0] * 2.0 - d[:, 1] * 2.0
    assert np.abs(cross).max() < 1e-9
    # monotone progress toward the goal
    dist = np.linalg.norm(path - np.array([2.5, 2.5]), axis=1)
    assert np.all(np.diff(dist) < 1e-12)


def test_start_equals_goal_is_fixed_point():
    ctrl = DmpSkillController(dims=2)
    path = dmp_rollout(ctrl, (1.0, 1.0), (1.0, 1.0))
    assert np.abs(path - 1.0).max() < GOAL_TOLERANCE


def test_fit_reproduces_single_demonstration():
    t = np.linspace(0, 1, 90)
    demo = np.stack([t * 2.0, np.sin(np.pi * t)], axis=1)
    ctrl = fit_dmp([demo])
    path = dmp_rollout(ctrl, demo[0], demo[-1])
    resampled = np.stack(
        [np.interp(np.linspace(0, 1, 50), t, demo[:, k]) for k in range(2)], axis=1
    )
    assert np.abs(path - resampled).max() < 0.15


def test_straight_line_demo_needs_little_forcing():
    t = np.linspace(0, 1, 60)
    demo = np.stack([t, t], axis=1)
    ctrl = fit_dmp([demo])
    zero = DmpSkillController(dims=2, n_basis=ctrl.n_basis)
    dev = dmp_rollout(ctrl, (0, 0), (1, 1)) - dmp_rollout(zero, (0, 0), (1, 1))
    assert np.abs(dev).max() < 0.05


def test_fit_rejects_mismatched_dimensions():
    with pytest.raises(ValueError):
        fit_dmp([np.zeros((10, 2)), np.zeros((10, 3))])


def test_fit_rejects_zero_length_demo():
    with pytest.raises(ValueError):
        fit_dmp([np.ones((10, 2))])


def test_rollout_batch_shapes():
    ctrl = DmpSkillController(dims=2)
    out = rollout_batch(ctrl, np.zeros((5, 2)), np.ones((5, 2)))
    assert out.shape == (5, 50, 2)
    stacked = rollout_batch(
        ctrl, np.zeros((5, 2)), np.ones((5, 2)), weights=np.zeros((3, ctrl.n_basis, 2))
    )
    assert stacked.shape == (3, 5, 50, 2)


def test_fitted_corner_controller_reabstracts_to_chain(
    l2r_controller, nine_grounding, eq5_constraint
):
    # re-roll from fresh endpoint pairs and check the symbolic chain
    rng = np.random.default_rng(5)
    chain = (
        F({"x0", "y0"}),
        F({"x1", "y0"}),
        F({"x2", "y0"}),
        F({"x2", "y1"}),
        F({"x2", "y2"}),
    )
    good = 0
    trials = 40
    for _ in range(trials):
        start = nine_grounding.sample_state_region(chain[0], rng, interior=0.2)
        goal = nine_grounding.sample_state_region(chain[-1], rng, interior=0.2)
        trace = abstract_lenient(
            dmp_rollout(l2r_controller, start, goal), nine_grounding
        )
        seen = tuple(dict.fromkeys(trace))
        if seen == chain:
            good += 1
    assert good / trials >= 0.95


def test_chain_demonstrations_follow_skill(l2r, nine_grounding):
    demos = chain_demonstrations(l2r, nine_grounding, count=5, seed=3)
    assert len(demos) == 5
    for demo in demos:
        assert nine_grounding.abstract(demo[0]) == F({"x0", "y0"})
        assert nine_grounding.abstract(demo[-1]) == F({"x2", "y2"})


def test_controller_round_trips_through_plain_data(l2r_controller):
    data = save_controller(l2r_controller)
    back = load_controller(data)
    assert back.dims == l2r_controller.dims
    assert np.allclose(back.weights, l2r_controller.weights)
    a = dmp_rollout(l2r_controller, (0.5, 0.5), (2.5, 2.5))
    b = dmp_rollout(back, (0.5, 0.5), (2.5, 2.5))
    assert np.allclose(a, b)
