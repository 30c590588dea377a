import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taskrepair.errors import CapacityError, NonSafetyFormulaError
from taskrepair.formulas import print_formula
from taskrepair.parser import parse_formula
from taskrepair.relations import full_relation, relation_of
from taskrepair.semantics import compile_step, eval_step, state_formula
from taskrepair.vocabulary import Vocabulary, enumerate_states

F = frozenset
VOCAB = Vocabulary(("x0", "x1", "x2", "y0", "y1", "y2"), (), ("pi_L2R", "pi_R2L"))
WORLD = VOCAB.world_inputs


def test_state_formula_full_conjunction():
    # positives in canonical order, then the negated remainder
    f = state_formula(F({"x0", "y0"}), WORLD)
    assert print_formula(f) == "x0 & y0 & !x1 & !x2 & !y1 & !y2"


def test_state_formula_empty_state():
    assert print_formula(state_formula(F(), ("p",))) == "!p"


def test_state_formula_singleton():
    assert print_formula(state_formula(F({"p"}), ("p",))) == "p"


def test_eval_step_negated_transition():
    f = parse_formula("G(!(x2 & y0 & pi_L2R & X(x2) & X(y0)))", VOCAB)
    assert eval_step(f, {"x2", "y0", "pi_L2R"}, {"x2", "y0"}) is False


def test_eval_step_vacuous_implication():
    f = parse_formula("G(pi_L2R -> X(pi_L2R))", VOCAB)
    assert eval_step(f, set(), set()) is True


def test_eval_step_chain_clause():
    f = parse_formula("G(x0 & y0 -> X(x1 & y0))", VOCAB)
    assert eval_step(f, {"x0", "y0"}, {"x1", "y0"}) is True


def test_eval_step_rejects_liveness():
    with pytest.raises(NonSafetyFormulaError):
        eval_step(parse_formula("G(F(x0))", VOCAB), set(), set())


def test_eval_step_rejects_until():
    with pytest.raises(NonSafetyFormulaError):
        eval_step(parse_formula("x0 U x1", VOCAB), {"x0"}, {"x1"})


def test_state_formula_identifies_its_state():
    sigma = F({"x1", "y2"})
    f = state_formula(sigma, WORLD)
    for other in enumerate_states(WORLD):
        assert eval_step(f, other, set()) == (other == sigma)


def test_relation_of_tautology_one_prop():
    rel = relation_of(parse_formula("G(true)", None), VOCAB, ("x0",), ("x0",))
    assert len(rel) == 4


def test_relation_of_fig3c_changes():
    # the published change constraint restricted to its target states
    f = parse_formula("G(x2 & !X(x0 | x2)) & G(y1 & !X(y0))", VOCAB)
    rel = relation_of(f, VOCAB, WORLD, WORLD)
    sources = {a for a, _ in rel.pairs}
    for a in sources:
        assert {"x2", "y1"} <= a
    allowed_next = {
        b for a, b in rel.pairs if a == F({"x2", "y1"})
    }
    full_cells = {b for b in allowed_next if len({p for p in b if p.startswith("x")}) == 1
                  and len({p for p in b if p.startswith("y")}) == 1}
    assert F({"x1", "y1"}) in full_cells
    assert F({"x1", "y2"}) in full_cells
    assert not any("x2" in b or "x0" in b or "y0" in b for b in allowed_next)


def test_relation_capacity_guard():
    with pytest.raises(CapacityError):
        relation_of(
            parse_formula("G(true)", None), VOCAB, VOCAB.all_props, VOCAB.all_props,
            bound=1 << 10,
        )


def test_relation_matches_brute_force_cross_product():
    # the compiled relation equals filtering all pairs by the recursive
    # evaluator (two independent evaluation paths)
    two = Vocabulary(("a", "b"), (), ())
    f = parse_formula("G((a -> X(b)) & !(a & b))", two)
    rel = relation_of(f, two, ("a", "b"), ("a", "b"))
    brute = {
        (x, y)
        for x in enumerate_states(("a", "b"))
        for y in enumerate_states(("a", "b"))
        if eval_step(f, x, y)
    }
    assert rel.pairs == brute


def test_relation_intersection_of_conjunction():
    two = Vocabulary(("a", "b"), (), ())
    f1 = parse_formula("G(a -> X(b))", two)
    f2 = parse_formula("G(!(a & b))", two)
    both = relation_of([f1, f2], two, ("a", "b"), ("a", "b"))
    r1 = relation_of(f1, two, ("a", "b"), ("a", "b"))
    r2 = relation_of(f2, two, ("a", "b"), ("a", "b"))
    assert both == r1.intersection(r2)


def test_relation_iteration_deterministic():
    rel = full_relation(VOCAB, ("x0", "x1"), ("x0",))
    assert list(rel) == list(rel)
    assert [tuple(sorted(a)) for a, _ in rel][:4] == [(), (), ("x0",), ("x0",)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**16 - 1))
def test_compiled_step_equals_recursive_eval(mask_pair):
    two = Vocabulary(("a", "b", "c"), (), ())
    f = parse_formula("G((a | X(c)) & (b -> X(a)) <-> !c)", two)
    fn = compile_step(f, two.all_props, two.all_props)
    now_mask = mask_pair & 0b111
    next_mask = (mask_pair >> 3) & 0b111
    now = {p for i, p in enumerate(two.all_props) if now_mask & (1 << i)}
    nxt = {p for i, p in enumerate(two.all_props) if next_mask & (1 << i)}
    assert fn(now_mask, next_mask) == eval_step(f, now, nxt)
