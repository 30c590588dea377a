import pytest

from taskrepair.errors import DisconnectedChainError
from taskrepair.game import GameStructure, compute_winning_states, extract_strategy
from taskrepair.repair.constraints import make_constraints
from taskrepair.repair.postcondition import modify_postconditions
from taskrepair.repair.precondition import modify_preconditions
from taskrepair.repair.suggestions import (
    SkillSuggestion,
    apply_suggestion,
    extract_suggestions,
)

F = frozenset

EQ5 = {
    F({"x0", "y0"}): {F({"x1", "y0"})},
    F({"x1", "y0"}): {F({"x1", "y1"})},
    F({"x1", "y1"}): {F({"x2", "y1"})},
    F({"x2", "y1"}): {F({"x2", "y2"})},
}


@pytest.fixture(scope="module")
def repaired_game(nine_game, nine_relations, nine_vocab, nine_grounding):
    """Drive the published two-step repair to a realizable game."""
    constraints = make_constraints(nine_vocab, nine_grounding)
    winning = compute_winning_states(nine_game)
    for seed in range(300):
        tau_e2, tau_s2 = modify_preconditions(
            nine_game.tau_env,
            nine_relations.env_hard,
            nine_relations.sys_mutable,
            nine_relations.sys_hard,
            winning.per_liveness[0],
            (),
            constraints,
            seed,
        )
        if (F({"x1", "y1", "pi_L2R"}), F({"x2", "y1", "pi_L2R"})) in tau_s2.pairs:
            break
    game2 = GameStructure(
        vocab=nine_game.vocab,
        theta_init=nine_game.theta_init,
        tau_env=tau_e2,
        tau_sys=tau_s2.intersection(nine_relations.sys_hard),
        env_liveness=nine_game.env_liveness,
        sys_liveness=nine_game.sys_liveness,
    )
    w2 = compute_winning_states(game2)
    for seed in range(200):
        tau_e3 = modify_postconditions(
            tau_e2, tau_s2, w2.per_liveness[0], (), constraints, seed
        )
        if (F({"x1", "y0", "pi_L2R"}), F({"x2", "y0"})) in tau_e2.pairs - tau_e3.pairs:
            break
    return GameStructure(
        vocab=nine_game.vocab,
        theta_init=nine_game.theta_init,
        tau_env=tau_e3,
        tau_sys=game2.tau_sys,
        env_liveness=nine_game.env_liveness,
        sys_liveness=nine_game.sys_liveness,
    )


def test_extracted_suggestion_is_published_chain(
    repaired_game, nine_game, nine_relations, l2r, r2l
):
    strategy = extract_strategy(repaired_game)
    suggestions = extract_suggestions(
        strategy, nine_game.tau_env, nine_relations.sys_mutable, [l2r, r2l]
    )
    assert [s.base_skill for s in suggestions] == ["L2R"]
    sug = suggestions[0]
    # the unchanged head and tail are part of the reported chain
    assert sug.pre_init == {F({"x0", "y0"})}
    assert {k: set(v) for k, v in sug.post_map.items()} == EQ5
    assert sug.post_final == {F({"x2", "y2"})}


def test_unmodified_strategy_yields_no_suggestions(
    nine_vocab, nine_grounding, l2r, r2l, nine_task_formulas
):
    from taskrepair.encoding import encode_spec
    from taskrepair.game import build_game
    from taskrepair.repair.loop import spec_relations
    from taskrepair.parser import parse_formula

    p = lambda t: parse_formula(t, nine_vocab)  # noqa: E731
    spec = encode_spec(
        nine_vocab,
        nine_grounding,
        [l2r, r2l],
        env_init=nine_task_formulas["env_init"],
        sys_init=nine_task_formulas["sys_init"],
        sys_liveness=[p("x2 & y2"), p("x0 & y0")],
    )
    game = build_game(spec, nine_vocab)
    rels = spec_relations(spec, nine_vocab)
    strategy = extract_strategy(game)
    assert (
        extract_suggestions(strategy, game.tau_env, rels.sys_mutable, [l2r, r2l])
        == []
    )


def test_disconnected_chain_is_an_error():
    with pytest.raises(DisconnectedChainError):
        SkillSuggestion(
            base_skill="L2R",
            activation_prop="pi_L2R",
            pre_init={F({"x0", "y0"})},
            post_map={F({"x1", "y0"}): {F({"x2", "y0"})}},
            post_final={F({"x2", "y0"})},
        ).validate_connected()


def test_apply_suggestion_replaces_structure(l2r):
    sug = SkillSuggestion(
        base_skill="L2R",
        activation_prop="pi_L2R",
        pre_init={F({"x0", "y0"})},
        post_map=EQ5,
        post_final={F({"x2", "y2"})},
    )
    fixed = apply_suggestion(l2r, sug)
    assert fixed.name == "L2R"
    assert fixed.successors(F({"x1", "y0"})) == {F({"x1", "y1"})}
    assert fixed.only_intermediate == {
        F({"x1", "y0"}),
        F({"x1", "y1"}),
        F({"x2", "y1"}),
    }
