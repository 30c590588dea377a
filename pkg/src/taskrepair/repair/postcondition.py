"""Redirecting skill outcomes that cannot reach the winning set.

Reachable skill transitions that neither start in nor land in the winning
set get their postcondition rewritten to a winning state, subject to the
change and infeasibility constraints; the environment relation swaps the
original outcome for the redirected one.  Redirects must either reduce the
skill's nondeterminism (land on an existing branch) or introduce a state the
skill does not already visit.
"""

from __future__ import annotations

from ..relations import TransitionRelation
from .precondition import _Ctx, _rng, reachable_env, user_closure


def find_not_winning(tau_e, tau_s_mutable, winning, ctx):
    """Reachable skill transitions that cannot reach the winning set."""
    env_reach = reachable_env(tau_e, tau_s_mutable, ctx)
    skills = {
        (a, b)
        for a, b in tau_s_mutable.pairs
        if (a, ctx.inp(b)) in env_reach and ctx.out(a)
    }
    not_winning = {(a, b) for a, b in skills if b not in winning and a not in winning}
    return not_winning, env_reach


def find_allowable_redirects(
    not_winning, env_reach, tau_s_mutable, winning, constraints, ctx
):
    """Candidate (transition, rewritten postcondition) tuples.

    ``kind`` distinguishes redirects that collapse onto an existing branch
    ("reduce") from those that introduce a state new to the skill ("change").
    """
    cur_pres = {a for a, _c in env_reach}
    poss = constraints.poss_changes.pairs
    banned = constraints.disallowed.pairs
    mut = tau_s_mutable.pairs

    tuples = {}
    for a, b in not_winning:
        i1 = ctx.inp(a)
        i2, o2 = ctx.inp(b), ctx.out(b)
        for i3 in ctx.input_states:
            if i3 == i1 or i3 == i2:
                continue
            if (i2, i3) not in poss:
                continue
            if (a, i3) in banned:
                continue
            target = frozenset(i3 | o2)
            if target not in winning:
                continue
            if (a, target) not in mut:
                continue
            already_in_skill = frozenset(i3 | ctx.out(a)) in cur_pres
            reduces = (a, i3) in env_reach
            if already_in_skill and not reduces:
                continue
            tuples[(a, b, i3)] = "reduce" if reduces else "change"
    return tuples


def modify_postconditions(
    tau_e: TransitionRelation,
    tau_s_mutable: TransitionRelation,
    winning,
    user_props,
    constraints,
    rng_seed,
):
    """One postcondition-redirect step; an unchanged tau_e signals no change."""
    ctx = _Ctx(tau_e, tau_s_mutable, user_props)
    winning = {frozenset(s) for s in winning}
    rng = _rng(rng_seed)

    not_winning, env_reach = find_not_winning(tau_e, tau_s_mutable, winning, ctx)
    if not not_winning:
        return tau_e
    tuples = find_allowable_redirects(
        not_winning, env_reach, tau_s_mutable, winning, constraints, ctx
    )
    if not tuples:
        return tau_e

    chosen = rng.choice(ctx.sort_change_tuples(tuples))
    selected = user_closure({chosen}, ctx)

    env_add = {(a, i3) for a, _b, i3 in selected}
    env_old = {(a, ctx.inp(b)) for a, b, _i3 in selected}
    pairs = (tau_e.pairs - env_old) | env_add
    return TransitionRelation(pairs, tau_e.domain_slice, tau_e.codomain_slice)
