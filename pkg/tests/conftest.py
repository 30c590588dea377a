import numpy as np
import pytest

from taskrepair.grounding import grid_grounding
from taskrepair.parser import parse_formula
from taskrepair.skills import Skill
from taskrepair.vocabulary import Vocabulary

F = frozenset

L2R_CHAIN = [
    F({"x0", "y0"}),
    F({"x1", "y0"}),
    F({"x2", "y0"}),
    F({"x2", "y1"}),
    F({"x2", "y2"}),
]
R2L_CHAIN = [
    F({"x2", "y2"}),
    F({"x1", "y2"}),
    F({"x0", "y2"}),
    F({"x0", "y1"}),
    F({"x0", "y0"}),
]
EQ5_CHAIN = [
    F({"x0", "y0"}),
    F({"x1", "y0"}),
    F({"x1", "y1"}),
    F({"x2", "y1"}),
    F({"x2", "y2"}),
]


def chain_map(states):
    return {states[i]: {states[i + 1]} for i in range(len(states) - 1)}


@pytest.fixture(scope="session")
def nine_vocab():
    return Vocabulary(
        ("x0", "x1", "x2", "y0", "y1", "y2"), (), ("pi_L2R", "pi_R2L")
    )


@pytest.fixture(scope="session")
def nine_grounding():
    return grid_grounding()


@pytest.fixture(scope="session")
def l2r():
    return Skill("L2R", "pi_L2R", [L2R_CHAIN[0]], [L2R_CHAIN[-1]], chain_map(L2R_CHAIN))


@pytest.fixture(scope="session")
def r2l():
    return Skill("R2L", "pi_R2L", [R2L_CHAIN[0]], [R2L_CHAIN[-1]], chain_map(R2L_CHAIN))


@pytest.fixture(scope="session")
def nine_task_formulas(nine_vocab):
    p = lambda t: parse_formula(t, nine_vocab)  # noqa: E731
    return {
        "env_init": p("x0 & y0 & !x1 & !x2 & !y1 & !y2"),
        "sys_init": p("x0 & y0"),
        "sys_liveness": [p("x2 & y2"), p("x0 & y0")],
        "sys_user": [p("G(!(x2 & y0))"), p("G(!X(x2 & y0))")],
    }


@pytest.fixture(scope="session")
def nine_spec(nine_vocab, nine_grounding, l2r, r2l, nine_task_formulas):
    from taskrepair.encoding import encode_spec

    return encode_spec(
        nine_vocab,
        nine_grounding,
        [l2r, r2l],
        env_init=nine_task_formulas["env_init"],
        sys_init=nine_task_formulas["sys_init"],
        sys_liveness=nine_task_formulas["sys_liveness"],
        sys_user=nine_task_formulas["sys_user"],
    )


@pytest.fixture(scope="session")
def nine_game(nine_spec, nine_vocab):
    from taskrepair.game import build_game

    return build_game(nine_spec, nine_vocab)


@pytest.fixture(scope="session")
def nine_relations(nine_spec, nine_vocab):
    from taskrepair.repair.loop import spec_relations

    return spec_relations(nine_spec, nine_vocab)


@pytest.fixture(scope="session")
def l2r_demos(nine_grounding):
    """Synthetic corner-path demonstrations for the original skill."""
    rng = np.random.default_rng(1)
    centers = [(0.5, 0.5), (1.5, 0.5), (2.5, 0.5), (2.5, 1.5), (2.5, 2.5)]
    demos = []
    for _ in range(60):
        wps = np.array(centers) + rng.uniform(-0.25, 0.25, size=(5, 2))
        seg = np.concatenate(
            [[0.0], np.cumsum(np.linalg.norm(np.diff(wps, axis=0), axis=1))]
        )
        t = np.linspace(0.0, seg[-1], 80)
        demos.append(
            np.stack([np.interp(t, seg, wps[:, k]) for k in range(2)], axis=1)
        )
    return demos


@pytest.fixture(scope="session")
def l2r_controller(l2r_demos):
    from taskrepair.dmp import fit_dmp

    return fit_dmp(l2r_demos)


@pytest.fixture(scope="session")
def eq5_constraint():
    from taskrepair.trajectories import TrajectoryConstraint

    return TrajectoryConstraint.from_chain(
        "L2R", [EQ5_CHAIN[0]], chain_map(EQ5_CHAIN), [EQ5_CHAIN[-1]]
    )
