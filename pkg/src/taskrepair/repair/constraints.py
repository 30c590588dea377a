"""User and feedback constraints consulted only by the repair process."""

from __future__ import annotations

from dataclasses import dataclass

from ..formulas import And, Next, Prop, conj, disj
from ..relations import TransitionRelation, relation_of
from ..semantics import state_formula
from ..vocabulary import Vocabulary


@dataclass(frozen=True)
class RepairConstraints:
    """poss_changes: how input states may be rewritten (inputs -> inputs').

    disallowed: skill transitions known to be infeasible (all props ->
    inputs'), grown automatically from physical feedback.  Neither relation
    is ever consulted during synthesis.
    """

    poss_changes: TransitionRelation
    disallowed: TransitionRelation

    def with_disallowed(self, disallowed):
        return RepairConstraints(poss_changes=self.poss_changes, disallowed=disallowed)


def default_poss_changes(vocab: Vocabulary, grounding, bound=None) -> TransitionRelation:
    """Every input rewrite whose target is a realizable world abstraction.

    The current state is unconstrained; the rewritten state's world part must
    be the abstraction of some workspace point (which in particular respects
    all grounding mutual exclusions), and user propositions are free.
    """
    from ..vocabulary import enumerate_states, project

    if grounding is None:
        from ..formulas import TRUE

        kwargs = {} if bound is None else {"bound": bound}
        return relation_of(TRUE, vocab, "inputs", "inputs", **kwargs)
    realizable = grounding.realizable_states()
    world = set(vocab.world_inputs)
    inputs = vocab.inputs
    targets = [
        s for s in enumerate_states(inputs) if project(s, world) in realizable
    ]
    pairs = [(a, b) for a in enumerate_states(inputs) for b in targets]
    return TransitionRelation(pairs, inputs, inputs)


def empty_disallowed(vocab: Vocabulary) -> TransitionRelation:
    return TransitionRelation([], vocab.all_props, vocab.inputs)


def make_constraints(vocab, grounding, poss_changes=None, disallowed=None):
    if poss_changes is None:
        poss_changes = default_poss_changes(vocab, grounding)
    if disallowed is None:
        disallowed = empty_disallowed(vocab)
    return RepairConstraints(poss_changes=poss_changes, disallowed=disallowed)


def add_disallowed(
    constraints: RepairConstraints, failures, vocab: Vocabulary
) -> RepairConstraints:
    """Record physically failed transitions.

    Each failure is (pre_state including the activation proposition,
    successor world-state set); every matching (state, next-input) pair is
    added, leaving user propositions and other outputs unconstrained.
    """
    if not failures:
        return constraints
    world = vocab.world_inputs
    extra = set(constraints.disallowed.pairs)
    for pre_full, successors in failures:
        pre_full = frozenset(pre_full)
        pre_world = frozenset(p for p in pre_full if p in set(world))
        acts = [p for p in pre_full if p in set(vocab.outputs)]
        pattern = And(
            And(state_formula(pre_world, world), conj(Prop(a) for a in acts)),
            Next(
                disj(
                    state_formula(frozenset(s), world)
                    for s in vocab.sort_states(successors)
                )
            ),
        )
        rel = relation_of(pattern, vocab, "all", "inputs")
        extra |= rel.pairs
    return constraints.with_disallowed(
        TransitionRelation(extra, vocab.all_props, vocab.inputs)
    )
