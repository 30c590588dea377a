"""Encoding of skills into the reactive specification.

Environment side: each visited non-final state of an active skill forces the
next world state into its observed successor set.  System side: a skill may
only be activated when its initial precondition holds next or it is mid
execution, and it must keep running from intermediate states.  Hard side:
skill mutual exclusion, grounding mutual exclusions, the frame axiom, and any
user constraints verbatim.
"""

from __future__ import annotations

from .formulas import Always, Iff, Implies, Next, Not, Prop, conj, disj
from .gr1 import GR1Spec
from .grounding import Grounding
from .semantics import state_formula, state_literals
from .vocabulary import Vocabulary


def _sorted_states(states, vocab):
    return vocab.sort_states(states)


def encode_skill_env(skill, vocab: Vocabulary):
    """Postcondition clauses for one skill (one per visited non-final state)."""
    world = vocab.world_inputs
    clauses = []
    for state in _sorted_states(skill.unique_states - skill.post_final, vocab):
        ante = conj([Prop(skill.activation_prop)] + state_literals(state, world))
        succ = disj(
            state_formula(s, world)
            for s in _sorted_states(skill.successors(state), vocab)
        )
        clauses.append(Always(Implies(ante, Next(succ))))
    return clauses


def _intermediate_triples(skill, vocab):
    """(pre, post) pairs ranging over only-intermediate posts, in canonical order."""
    out = []
    for post in _sorted_states(skill.only_intermediate, vocab):
        for pre in _sorted_states(skill.predecessors(post), vocab):
            out.append((pre, post))
    return out


def encode_skills_sys(skills, vocab: Vocabulary):
    """Activation gating and continuation obligations for a set of skills.

    Returns (choose, continues): choose is one formula conjoining the per
    skill gating clauses; continues is the list of per-transition
    continuation clauses.
    """
    world = vocab.world_inputs
    choose_clauses = []
    continues = []
    for skill in skills:
        pi = Prop(skill.activation_prop)

        def triple(pre, post):
            return conj(
                state_literals(pre, world) + [pi, Next(state_formula(post, world))]
            )

        disjuncts = [
            Next(state_formula(pre, world))
            for pre in _sorted_states(skill.pre_init, vocab)
        ]
        disjuncts.extend(
            triple(pre, post) for pre, post in _intermediate_triples(skill, vocab)
        )
        choose_clauses.append(
            Always(Implies(Not(disj(disjuncts)), Not(Next(pi))))
        )
        for pre, post in _intermediate_triples(skill, vocab):
            continues.append(Always(Implies(triple(pre, post), Next(pi))))
    return conj(choose_clauses), continues


def build_hard_constraints(
    vocab: Vocabulary,
    grounding: Grounding,
    skills,
    sys_user=(),
    env_user=(),
):
    """Unmodifiable safety formulas for both players.

    System side: at most one skill active, then user safeties verbatim.
    Environment side: mutual exclusion for disjointly-grounded propositions,
    the frame axiom, then user assumptions verbatim.
    """
    from .formulas import And

    env_hard = []
    sys_hard = []

    # mutexes bind every step, so both the current and the chosen next state
    # are constrained (otherwise a player could "win" by steering into a
    # state that contradicts the other side's assumptions)
    outs = [s.activation_prop for s in skills]
    for i, a in enumerate(outs):
        for b in outs[i + 1 :]:
            sys_hard.append(Always(Not(And(Prop(a), Prop(b)))))
            sys_hard.append(Always(Not(Next(And(Prop(a), Prop(b))))))

    if grounding is not None:
        for a, b in grounding.mutual_exclusions():
            env_hard.append(Always(Not(And(Prop(a), Prop(b)))))
            env_hard.append(Always(Not(Next(And(Prop(a), Prop(b))))))

    frame_ante = conj(Not(Prop(p)) for p in outs)
    frame_cons = conj(Iff(Prop(p), Next(Prop(p))) for p in vocab.world_inputs)
    env_hard.append(Always(Implies(frame_ante, frame_cons)))

    sys_hard.extend(sys_user)
    env_hard.extend(env_user)
    return env_hard, sys_hard


def encode_spec(
    vocab: Vocabulary,
    grounding: Grounding,
    skills,
    env_init,
    sys_init,
    sys_liveness,
    env_liveness=(),
    sys_user=(),
    env_user=(),
) -> GR1Spec:
    """Assemble the full specification for a task over a set of skills."""
    env_mutable = []
    for skill in skills:
        env_mutable.extend(encode_skill_env(skill, vocab))
    choose, continues = encode_skills_sys(skills, vocab)
    sys_mutable = [choose] + continues
    env_hard, sys_hard = build_hard_constraints(
        vocab, grounding, skills, sys_user=sys_user, env_user=env_user
    )
    return GR1Spec(
        env_init=env_init,
        sys_init=sys_init,
        env_safety_mutable=env_mutable,
        env_safety_hard=env_hard,
        sys_safety_mutable=sys_mutable,
        sys_safety_hard=sys_hard,
        env_liveness=list(env_liveness),
        sys_liveness=list(sys_liveness),
    )
