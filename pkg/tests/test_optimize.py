import numpy as np
import pytest

from taskrepair.dmp import dmp_rollout
from taskrepair.feasibility import abstract_lenient, check_feasibility
from taskrepair.optimize import OptimizeConfig, _RobustnessModel, repair_trajectory
from taskrepair.trajectories import TrajectoryConstraint

F = frozenset


def _polyline(wps, n=50):
    wps = np.asarray(wps, dtype=float)
    seg = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(wps, axis=0), axis=1))])
    t = np.linspace(0, seg[-1], n)
    return np.stack([np.interp(t, seg, wps[:, k]) for k in range(2)], axis=1)


def test_robustness_separates_detour_from_forbidden_corridor(
    nine_grounding, eq5_constraint
):
    model = _RobustnessModel(eq5_constraint, nine_grounding, beta=10.0)
    stair = _polyline([(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (2.5, 1.5), (2.5, 2.5)])
    corridor = _polyline([(0.5, 0.5), (2.5, 0.5), (2.5, 2.5)])  # through x2,y0
    margin = model.violation(corridor[None])[0] - model.violation(stair[None])[0]
    assert margin > 0.05


@pytest.mark.slow
def test_reroute_through_center(l2r_controller, nine_grounding, eq5_constraint):
    # published repair target: bottom-corridor controller rerouted upward
    fixed = repair_trajectory(
        l2r_controller, eq5_constraint, nine_grounding, OptimizeConfig(seed=0)
    )
    trace = abstract_lenient(
        dmp_rollout(fixed, (0.5, 0.5), (2.5, 2.5)), nine_grounding
    )
    cells = list(dict.fromkeys(trace))
    assert F({"x1", "y1"}) in cells
    assert F({"x2", "y0"}) not in cells
    verdict = check_feasibility(
        fixed, eq5_constraint, nine_grounding, samples=100, seed=9
    )
    assert verdict.pass_fraction >= 0.9
    assert verdict.accepted


@pytest.mark.slow
def test_already_satisfied_constraint_keeps_weights(l2r_controller, nine_grounding):
    chain = [
        F({"x0", "y0"}),
        F({"x1", "y0"}),
        F({"x2", "y0"}),
        F({"x2", "y1"}),
        F({"x2", "y2"}),
    ]
    own = TrajectoryConstraint.from_chain(
        "L2R", [chain[0]], {chain[i]: {chain[i + 1]} for i in range(4)}, [chain[-1]]
    )
    fixed = repair_trajectory(
        l2r_controller, own, nine_grounding, OptimizeConfig(seed=0, epochs=40)
    )
    # proximity dominates once the constraint is met: the table stays put
    assert np.abs(fixed.weights - l2r_controller.weights).max() < 1e-6


def test_zero_ltl_weight_returns_base_rollouts(
    l2r_controller, nine_grounding, eq5_constraint
):
    fixed = repair_trajectory(
        l2r_controller,
        eq5_constraint,
        nine_grounding,
        OptimizeConfig(seed=0, ltl_weight=0.0, epochs=20),
    )
    a = dmp_rollout(fixed, (0.5, 0.5), (2.5, 2.5))
    b = dmp_rollout(l2r_controller, (0.5, 0.5), (2.5, 2.5))
    assert np.abs(a - b).max() < 1e-9


@pytest.mark.slow
def test_rollout_endpoint_preserved_by_optimization(
    l2r_controller, nine_grounding, eq5_constraint
):
    fixed = repair_trajectory(
        l2r_controller, eq5_constraint, nine_grounding, OptimizeConfig(seed=1, epochs=30)
    )
    for start, goal in [((0.5, 0.5), (2.5, 2.5)), ((0.2, 0.8), (2.9, 2.2))]:
        before = dmp_rollout(l2r_controller, start, goal)[-1]
        after = dmp_rollout(fixed, start, goal)[-1]
        assert np.linalg.norm(before - after) < 1e-8
