"""Brute-force winning-set computation by explicit backward induction.

Deliberately naive: the game graph is fully enumerated into plain dictionaries
of frozensets and every sweep recomputes memberships from scratch with literal
quantifier loops.  Used only as an independent test oracle.
"""

from __future__ import annotations

from .errors import CapacityError
from .formulas import TRUE
from .game import GameStructure, WinningSet
from .semantics import eval_bool

ORACLE_STATE_BOUND = 4096


def _graph(game: GameStructure):
    all_props = game.vocab.all_props
    if (1 << len(all_props)) > ORACLE_STATE_BOUND:
        raise CapacityError(
            f"oracle limited to {ORACLE_STATE_BOUND} states, got 2^{len(all_props)}"
        )
    from .vocabulary import enumerate_states

    states = enumerate_states(all_props)
    env_moves = {s: set() for s in states}
    for a, b in game.tau_env.pairs:
        env_moves[a].add(b)
    sys_moves = {s: {} for s in states}
    in_set = set(game.vocab.inputs)
    for a, b in game.tau_sys.pairs:
        key = frozenset(p for p in b if p in in_set)
        sys_moves[a].setdefault(key, set()).add(b)
    return states, env_moves, sys_moves


def _can_force(state, target, env_moves, sys_moves, strict):
    """One-step forcing: every env move answerable into target."""
    choices = env_moves[state]
    if not choices:
        return not strict
    for ib in choices:
        replies = sys_moves[state].get(ib, set())
        if not any(r in target for r in replies):
            return False
    return True


def _force_reach(goal_states, env_moves, sys_moves, states, strict):
    """States from which visiting goal_states is forced, by naive sweeps."""
    reach = set(goal_states)
    changed = True
    while changed:
        changed = False
        for s in states:
            if s in reach:
                continue
            if _can_force(s, reach, env_moves, sys_moves, strict):
                reach.add(s)
                changed = True
    return reach


def oracle_winning_states(game: GameStructure) -> WinningSet:
    """Same semantics as compute_winning_states, computed independently."""
    states, env_moves, sys_moves = _graph(game)
    goals = game.sys_liveness or [TRUE]

    z = set(states)
    while True:
        new_z = set(states)
        for j_formula in goals:
            # goal layer: goal states able to continue inside z
            goal_layer = {
                s
                for s in states
                if eval_bool(j_formula, s)
                and _can_force(s, z, env_moves, sys_moves, strict=False)
            }
            y = _force_reach(goal_layer, env_moves, sys_moves, states, strict=False)
            new_z &= y
        if new_z == z:
            break
        z = new_z

    per = {}
    for j, j_formula in enumerate(goals):
        goal_layer = {
            s
            for s in states
            if eval_bool(j_formula, s)
            and _can_force(s, set(states), env_moves, sys_moves, strict=True)
        }
        per[j] = frozenset(
            _force_reach(goal_layer, env_moves, sys_moves, states, strict=True)
        )

    return WinningSet(states=frozenset(z), per_liveness=per)
