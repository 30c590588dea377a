"""Standalone property suites: repair monotonicity, closure, determinism."""

import random

import numpy as np
import pytest

from taskrepair.dmp import DmpSkillController, dmp_rollout, fit_dmp
from taskrepair.game import compute_winning_states
from taskrepair.parser import parse_formula
from taskrepair.repair.constraints import make_constraints
from taskrepair.repair.postcondition import modify_postconditions
from taskrepair.repair.precondition import modify_preconditions
from taskrepair.vocabulary import Vocabulary, enumerate_states

F = frozenset


@pytest.fixture(scope="module")
def repair_inputs(nine_game, nine_relations, nine_vocab, nine_grounding):
    winning = compute_winning_states(nine_game)
    constraints = make_constraints(nine_vocab, nine_grounding)
    return nine_game, nine_relations, winning, constraints


def test_precondition_repair_grows_mutable_monotonically(repair_inputs):
    game, rels, winning, constraints = repair_inputs
    for seed in range(12):
        _, tau_s2 = modify_preconditions(
            game.tau_env,
            rels.env_hard,
            rels.sys_mutable,
            rels.sys_hard,
            winning.per_liveness[0],
            (),
            constraints,
            seed,
        )
        assert tau_s2.pairs >= rels.sys_mutable.pairs


def test_hard_relations_bit_identical_across_repairs(repair_inputs):
    game, rels, winning, constraints = repair_inputs
    env_hard_before = frozenset(rels.env_hard.pairs)
    sys_hard_before = frozenset(rels.sys_hard.pairs)
    for seed in range(6):
        modify_preconditions(
            game.tau_env,
            rels.env_hard,
            rels.sys_mutable,
            rels.sys_hard,
            winning.per_liveness[0],
            (),
            constraints,
            seed,
        )
        modify_postconditions(
            game.tau_env,
            rels.sys_mutable,
            winning.per_liveness[0],
            (),
            constraints,
            seed,
        )
    assert frozenset(rels.env_hard.pairs) == env_hard_before
    assert frozenset(rels.sys_hard.pairs) == sys_hard_before


def _user_variant(state, user_props, sigma):
    return frozenset(p for p in state if p not in user_props) | sigma


def test_user_proposition_closure_of_selected_changes(nine_grounding):
    # with a user proposition declared, every added transition exists in
    # every user-bit variant
    vocab = Vocabulary(
        ("x0", "x1", "x2", "y0", "y1", "y2"), ("pi_react",), ("pi_L2R", "pi_R2L")
    )
    from taskrepair.encoding import encode_spec
    from taskrepair.game import blocked_liveness, build_game
    from taskrepair.repair.loop import spec_relations
    from taskrepair.skills import Skill

    chain = [
        F({"x0", "y0"}),
        F({"x1", "y0"}),
        F({"x2", "y0"}),
        F({"x2", "y1"}),
        F({"x2", "y2"}),
    ]
    back = [
        F({"x2", "y2"}),
        F({"x1", "y2"}),
        F({"x0", "y2"}),
        F({"x0", "y1"}),
        F({"x0", "y0"}),
    ]
    l2r = Skill("L2R", "pi_L2R", [chain[0]], [chain[-1]],
                {chain[i]: {chain[i + 1]} for i in range(4)})
    r2l = Skill("R2L", "pi_R2L", [back[0]], [back[-1]],
                {back[i]: {back[i + 1]} for i in range(4)})
    p = lambda t: parse_formula(t, vocab)  # noqa: E731
    spec = encode_spec(
        vocab, nine_grounding, [l2r, r2l],
        env_init=p("x0 & y0 & !x1 & !x2 & !y1 & !y2"),
        sys_init=p("x0 & y0"),
        sys_liveness=[p("pi_react -> x2 & y2"), p("!pi_react -> x0 & y0")],
        sys_user=[p("G(!(x2 & y0))"), p("G(!X(x2 & y0))")],
    )
    game = build_game(spec, vocab)
    rels = spec_relations(spec, vocab)
    winning = compute_winning_states(game)
    goal = blocked_liveness(game, winning)
    constraints = make_constraints(vocab, nine_grounding)
    user = set(vocab.user_inputs)
    sigmas = enumerate_states(vocab.user_inputs)
    for seed in range(6):
        tau_e2, tau_s2 = modify_preconditions(
            game.tau_env,
            rels.env_hard,
            rels.sys_mutable,
            rels.sys_hard,
            winning.per_liveness[goal],
            vocab.user_inputs,
            constraints,
            seed,
        )
        for added in (tau_s2.pairs - rels.sys_mutable.pairs,
                      tau_e2.pairs - game.tau_env.pairs):
            for a, b in added:
                for sigma in sigmas:
                    assert (
                        _user_variant(a, user, sigma),
                        _user_variant(b, user, sigma),
                    ) in added


def test_repair_operations_deterministic_for_seed(repair_inputs):
    game, rels, winning, constraints = repair_inputs
    for seed in (0, 7, 23):
        first = modify_postconditions(
            game.tau_env, rels.sys_mutable, winning.per_liveness[0], (),
            constraints, seed,
        )
        second = modify_postconditions(
            game.tau_env, rels.sys_mutable, winning.per_liveness[0], (),
            constraints, seed,
        )
        assert first == second


def test_dmp_endpoint_invariants():
    rng = np.random.default_rng(11)
    demos = []
    for _ in range(8):
        wps = np.array([(0.4, 0.4), (1.5, 0.6), (2.4, 2.4)]) + rng.normal(0, 0.05, (3, 2))
        t = np.linspace(0, 1, 70)
        seg = np.concatenate([[0], np.cumsum(np.linalg.norm(np.diff(wps, axis=0), axis=1))])
        tt = np.linspace(0, seg[-1], 70)
        demos.append(
            np.stack([np.interp(tt, seg, wps[:, k]) for k in range(2)], axis=1)
        )
    ctrl = fit_dmp(demos)
    for _ in range(10):
        start = rng.random(2) * 3
        goal = rng.random(2) * 3
        path = dmp_rollout(ctrl, start, goal)
        assert len(path) == ctrl.timesteps
        assert np.allclose(path[0], start)
        assert np.linalg.norm(path[-1] - goal) < 0.05


def test_strategy_export_deterministic(nine_vocab, nine_grounding, r2l, nine_task_formulas):
    from taskrepair.encoding import encode_spec
    from taskrepair.game import build_game, extract_strategy
    from taskrepair.skills import Skill
    from taskrepair.workbench.report import strategy_table

    eq5 = [
        F({"x0", "y0"}),
        F({"x1", "y0"}),
        F({"x1", "y1"}),
        F({"x2", "y1"}),
        F({"x2", "y2"}),
    ]
    fixed = Skill("L2R", "pi_L2R", [eq5[0]], [eq5[-1]],
                  {eq5[i]: {eq5[i + 1]} for i in range(4)})
    spec = encode_spec(
        nine_vocab, nine_grounding, [fixed, r2l],
        env_init=nine_task_formulas["env_init"],
        sys_init=nine_task_formulas["sys_init"],
        sys_liveness=nine_task_formulas["sys_liveness"],
        sys_user=nine_task_formulas["sys_user"],
    )
    game = build_game(spec, nine_vocab)
    a = strategy_table(extract_strategy(game))
    b = strategy_table(extract_strategy(game))
    assert a == b
