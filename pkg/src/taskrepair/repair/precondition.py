"""Relaxing skill preconditions so winning skills become reachable.

Works purely on explicit transition relations: find the skill transitions
that are guaranteed to enter the winning set and whose sources are reachable,
pick an allowed rewrite of their precondition, then graft the rewritten
precondition into the system relation (with the transitions that reach it)
and pin its outcome in the environment relation.  The hard relations are
never modified.
"""

from __future__ import annotations

import random

from ..relations import TransitionRelation
from ..vocabulary import enumerate_states, state_to_mask


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


class _Ctx:
    """Slice layout shared by the repair relation algebra."""

    def __init__(self, tau_e, tau_s_mutable, user_props):
        self.all_props = tuple(tau_e.domain_slice)
        self.inputs = tuple(tau_e.codomain_slice)
        in_set = set(self.inputs)
        self.outputs = tuple(p for p in self.all_props if p not in in_set)
        self.user_props = tuple(user_props)
        self.in_set = in_set
        self.out_set = set(self.outputs)
        self.input_states = enumerate_states(self.inputs)
        self.output_states = enumerate_states(self.outputs)
        del tau_s_mutable

    def inp(self, state):
        return frozenset(p for p in state if p in self.in_set)

    def out(self, state):
        return frozenset(p for p in state if p in self.out_set)

    def key_state(self, s):
        return state_to_mask(s, self.all_props)

    def key_input(self, s):
        return state_to_mask(s, self.inputs)

    def sort_change_tuples(self, tuples):
        return sorted(
            tuples,
            key=lambda t: (
                self.key_state(t[0]),
                self.key_state(t[1]),
                self.key_input(t[2]),
            ),
        )


def reachable_env(tau_e, tau_s_mutable, ctx):
    """Environment transitions whose source has a predecessor.

    A state is reachable here when some mutable system transition lands on it
    while being consistent with the environment relation.
    """
    env_pairs = tau_e.pairs
    reach_states = set()
    for a, b in tau_s_mutable.pairs:
        if (a, ctx.inp(b)) in env_pairs:
            reach_states.add(b)
    return {(a, c) for a, c in env_pairs if a in reach_states}


def user_closure(tuples, ctx):
    """One copy of each change tuple per assignment to the user propositions."""
    user_props = ctx.user_props
    if not user_props:
        return set(tuples)
    user_set = set(user_props)
    out = set()
    for sigma_u in enumerate_states(user_props):
        for (a, b, c) in tuples:
            a2 = frozenset(p for p in a if p not in user_set) | sigma_u
            b2 = frozenset(p for p in b if p not in user_set) | sigma_u
            c2 = frozenset(p for p in c if p not in user_set) | sigma_u
            out.add((a2, b2, c2))
    return out


def always_win_and_reachable(tau_e, tau_s_mutable, winning, ctx):
    """Mutable skill transitions forced into the winning set from reachable
    sources; the candidates whose preconditions may be rewritten."""
    env_reach = reachable_env(tau_e, tau_s_mutable, ctx)

    # env choices answerable into the winning set
    can_win = set()
    for a, b in tau_s_mutable.pairs:
        if b in winning:
            can_win.add((a, ctx.inp(b)))

    env_by_src = {}
    for a, c in tau_e.pairs:
        env_by_src.setdefault(a, set()).add(c)

    # vacuously-winning sources (no environment choice) never pass the
    # reachability test below, so only sources with choices are considered
    always_wins = set()
    for a, choices in env_by_src.items():
        if not ctx.out(a):
            continue
        if all((a, c) in can_win for c in choices):
            always_wins.add(a)

    out = set()
    for a, b in tau_s_mutable.pairs:
        if a in always_wins and b in winning and (a, ctx.inp(b)) in env_reach:
            out.add((a, b))
    return out, env_reach


def _pre_skills(env_reach, changing_outputs, ctx):
    return {a for a, _c in env_reach if ctx.out(a) in changing_outputs}


def _final_posts(env_reach, ctx):
    """(output, input-state) pairs acting as final postconditions: reached by
    the skill but with no reachable outgoing transition."""
    incoming = set()
    sources = set()
    for a, c in env_reach:
        o = ctx.out(a)
        incoming.add((o, c))
        sources.add((o, ctx.inp(a)))
    return {oc for oc in incoming if oc not in sources}


def find_allowable_changes(
    awr, env_reach, tau_s_hard, constraints, ctx
):
    poss = constraints.poss_changes.pairs
    banned = constraints.disallowed.pairs
    hard = tau_s_hard.pairs
    changing = {ctx.out(a) for a, _b in awr}
    pre_skills = _pre_skills(env_reach, changing, ctx)
    final_posts = _final_posts(env_reach, ctx)

    tuples = set()
    for a, b in awr:
        i1, o1 = ctx.inp(a), ctx.out(a)
        i2 = ctx.inp(b)
        for i3 in ctx.input_states:
            if i3 == i2:
                continue
            if (i1, i3) not in poss:
                continue
            cand = frozenset(i3 | o1)
            if (cand, i2) in banned:
                continue
            if cand in pre_skills:
                continue
            if (cand, b) not in hard:
                continue
            if (cand, b) in awr:
                continue
            if (o1, i3) in final_posts:
                continue
            tuples.add((a, b, i3))
    return tuples


def modify_preconditions(
    tau_e: TransitionRelation,
    tau_e_hard: TransitionRelation,
    tau_s_mutable: TransitionRelation,
    tau_s_hard: TransitionRelation,
    winning,
    user_props,
    constraints,
    rng_seed,
):
    """One precondition-relaxation step.

    ``winning`` is the per-goal attractor for the currently blocked liveness,
    given as a set of full states.  Returns (tau_e', tau_s_mutable');
    unchanged inputs signal that no allowable change exists.
    """
    ctx = _Ctx(tau_e, tau_s_mutable, user_props)
    winning = {frozenset(s) for s in winning}
    rng = _rng(rng_seed)

    awr, env_reach = always_win_and_reachable(tau_e, tau_s_mutable, winning, ctx)
    allowable = find_allowable_changes(awr, env_reach, tau_s_hard, constraints, ctx)
    if not allowable:
        return tau_e, tau_s_mutable

    chosen = rng.choice(ctx.sort_change_tuples(allowable))

    # gather the sibling next-output variants of the chosen transition
    a0, b0, i3 = chosen
    i2 = ctx.inp(b0)
    selected = {
        (a0, b, i3)
        for a, b in tau_s_mutable.pairs
        if a == a0 and ctx.inp(b) == i2
    }
    selected = user_closure(selected, ctx)

    new_skill = {(frozenset(i3x | ctx.out(a)), b) for a, b, i3x in selected}
    old_skill = {(a, b) for a, b, _ in selected}
    old_sources = {a for a, _b in old_skill}
    new_sources = {a for a, _b in new_skill}

    # transitions that reach the original precondition, retargeted at the new one
    mut_pairs = tau_s_mutable.pairs
    old_pre_pre = {a for a, b in mut_pairs if b in old_sources}
    new_pre_pre = {(a, src) for a in old_pre_pre for src in new_sources}

    # Keep the new activation from overriding the obligation to finish a
    # skill mid-execution: drop reaching transitions whose (source, next
    # input) combination is only legal for some current outputs -- those are
    # exactly the moves a continue obligation elsewhere would veto.
    only_input = {ctx.inp(b) for _a, b in new_pre_pre}
    if only_input:
        mut_by_key = {}
        for a, b in mut_pairs:
            mut_by_key.setdefault((ctx.inp(a), ctx.inp(b), ctx.out(b)), set()).add(
                ctx.out(a)
            )
        all_outs = set(ctx.output_states)
        diff_same_pre = {
            key
            for key, outs in mut_by_key.items()
            if key[1] in only_input and outs == all_outs
        }
        remove = set()
        for a, b in mut_pairs:
            ib = ctx.inp(b)
            if ib not in only_input:
                continue
            if (ctx.inp(a), ib, ctx.out(b)) not in diff_same_pre:
                remove.add((a, ib))
        new_pre_pre = {
            (a, b) for a, b in new_pre_pre if (a, ctx.inp(b)) not in remove
        }

    tau_s_new = TransitionRelation(
        mut_pairs | new_pre_pre | new_skill,
        tau_s_mutable.domain_slice,
        tau_s_mutable.codomain_slice,
    )

    # environment: pin the new precondition to the original outcome and add
    # the transitions that let it be reached
    old_pre_new = {
        a
        for a, c in env_reach
        if frozenset(c | ctx.out(a)) in old_sources
    }
    env_pre_new = {
        (a, ctx.inp(src))
        for a in old_pre_new
        for src in new_sources
        if ctx.out(src) == ctx.out(a)
    }
    env_new_skill = {(a, ctx.inp(b)) for a, b in new_skill}
    kept = {(a, c) for a, c in tau_e.pairs if a not in new_sources}
    env_pairs = (kept | env_new_skill | env_pre_new) & tau_e_hard.pairs
    tau_e_new = TransitionRelation(
        env_pairs, tau_e.domain_slice, tau_e.codomain_slice
    )
    return tau_e_new, tau_s_new
