"""Extracting skill modifications from a repaired strategy.

A deterministic strategy of the repaired game is replayed; transitions it
uses that the original relations lack (and environment outcomes the repaired
relations dropped) are grouped per skill and rebuilt into transition chains
of the same shape as a skill record.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DisconnectedChainError
from ..game import Strategy
from ..skills import Skill


@dataclass(frozen=True)
class SkillSuggestion:
    """A modified transition chain for one skill."""

    base_skill: str
    activation_prop: str
    pre_init: frozenset
    post_map: dict
    post_final: frozenset
    provenance: tuple = ()
    added_sys: frozenset = frozenset()  # new system pairs (state, state')
    added_env: frozenset = frozenset()  # new environment pairs (state, input')
    removed_env: frozenset = frozenset()  # dropped environment pairs

    def __post_init__(self):
        object.__setattr__(
            self, "pre_init", frozenset(frozenset(s) for s in self.pre_init)
        )
        object.__setattr__(
            self, "post_final", frozenset(frozenset(s) for s in self.post_final)
        )
        object.__setattr__(
            self,
            "post_map",
            {
                frozenset(k): frozenset(frozenset(x) for x in v)
                for k, v in self.post_map.items()
            },
        )

    @property
    def unique_states(self):
        out = set(self.pre_init) | set(self.post_final)
        for k, vs in self.post_map.items():
            out.add(k)
            out.update(vs)
        return frozenset(out)

    def successors(self, state):
        return self.post_map.get(frozenset(state), frozenset())

    def chain_edges(self):
        edges = []
        for src in sorted(self.post_map, key=sorted):
            for dst in sorted(self.post_map[src], key=sorted):
                edges.append((src, dst))
        return edges

    def validate_connected(self):
        states = self.unique_states
        # forward reach from initial preconditions
        seen = set(self.pre_init)
        frontier = list(self.pre_init)
        while frontier:
            s = frontier.pop()
            for nxt in self.post_map.get(s, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if seen != states:
            raise DisconnectedChainError(
                f"suggestion for {self.base_skill!r}: states "
                f"{sorted(sorted(s) for s in states - seen)} unreachable from "
                "the initial preconditions"
            )
        # backward reach from final postconditions
        rev = {}
        for src, dsts in self.post_map.items():
            for dst in dsts:
                rev.setdefault(dst, set()).add(src)
        seen_b = set(self.post_final)
        frontier = list(self.post_final)
        while frontier:
            s = frontier.pop()
            for prv in rev.get(s, ()):
                if prv not in seen_b:
                    seen_b.add(prv)
                    frontier.append(prv)
        if seen_b != states:
            raise DisconnectedChainError(
                f"suggestion for {self.base_skill!r}: states "
                f"{sorted(sorted(s) for s in states - seen_b)} reach no final "
                "postcondition"
            )


def extract_suggestions(
    strategy: Strategy,
    tau_e_orig,
    tau_s_mutable_orig,
    skills,
) -> list:
    """Per-skill modification chains needed by a repaired strategy.

    Skills whose strategy usage matches the original relations exactly are
    omitted.  Raises DisconnectedChainError if a rebuilt chain does not hang
    together, which indicates a repair bookkeeping bug.
    """
    game = strategy.game
    vocab = game.vocab
    world = set(vocab.world_inputs)
    out_set = set(vocab.outputs)
    by_prop = {s.activation_prop: s for s in skills}

    def w(state):
        return frozenset(p for p in state if p in world)

    def outs(state):
        return frozenset(p for p in state if p in out_set)

    # replay every strategy move
    visited_states = {strategy.initial}
    transitions = set()
    for (state, env_choice, _goal), out in strategy.moves.items():
        nxt = frozenset(env_choice | out)
        transitions.add((state, nxt))
        visited_states.add(state)
        visited_states.add(nxt)

    env_new_by_prop = {}
    sys_new_by_prop = {}
    env_removed_by_prop = {}
    active_states_by_prop = {}

    for state, nxt in sorted(transitions, key=lambda ab: (sorted(ab[0]), sorted(ab[1]))):
        cur_out = outs(state)
        nxt_out = outs(nxt)
        for pi in cur_out:
            active_states_by_prop.setdefault(pi, set()).add(state)
        env_pair = (state, frozenset(p for p in nxt if p in set(vocab.inputs)))
        if cur_out and env_pair not in tau_e_orig.pairs:
            for pi in cur_out:
                env_new_by_prop.setdefault(pi, set()).add(env_pair)
        if (state, nxt) not in tau_s_mutable_orig.pairs:
            for pi in nxt_out | cur_out:
                sys_new_by_prop.setdefault(pi, set()).add((state, nxt))

    # environment outcomes dropped by the repair (reduced nondeterminism)
    for pi, states in active_states_by_prop.items():
        for state in states:
            orig_succ = tau_e_orig.successors(state)
            new_succ = game.tau_env.successors(state)
            dropped = orig_succ - new_succ
            if dropped:
                for d in dropped:
                    env_removed_by_prop.setdefault(pi, set()).add((state, d))

    suggestions = []
    for pi in sorted(set(env_new_by_prop) | set(sys_new_by_prop) | set(env_removed_by_prop)):
        base = by_prop.get(pi)
        if base is None:
            continue
        active = active_states_by_prop.get(pi, set())
        if not active and not sys_new_by_prop.get(pi):
            continue

        post_map = {}
        for state in active:
            succs = game.tau_env.successors(state)
            key = w(state)
            post_map.setdefault(key, set()).update(w(s) for s in succs)

        pre_init = set()
        if pi in outs(strategy.initial):
            pre_init.add(w(strategy.initial))
        for state, nxt in transitions:
            if pi not in outs(state) and pi in outs(nxt):
                pre_init.add(w(nxt))

        chain_states = set(pre_init) | set(post_map)
        for vs in post_map.values():
            chain_states.update(vs)
        post_final = frozenset(s for s in chain_states if not post_map.get(s))

        suggestion = SkillSuggestion(
            base_skill=base.name,
            activation_prop=pi,
            pre_init=pre_init,
            post_map=post_map,
            post_final=post_final,
            provenance=(
                f"new-sys:{len(sys_new_by_prop.get(pi, ()))}",
                f"new-env:{len(env_new_by_prop.get(pi, ()))}",
                f"pruned-env:{len(env_removed_by_prop.get(pi, ()))}",
            ),
            added_sys=frozenset(sys_new_by_prop.get(pi, ())),
            added_env=frozenset(env_new_by_prop.get(pi, ())),
            removed_env=frozenset(env_removed_by_prop.get(pi, ())),
        )
        suggestion.validate_connected()
        suggestions.append(suggestion)
    return suggestions


def apply_suggestion(skill: Skill, suggestion: SkillSuggestion) -> Skill:
    """Rebuild the skill record with the suggested transition chain."""
    return skill.replace_structure(
        pre_init=suggestion.pre_init,
        post_final=suggestion.post_final,
        post_map={k: set(v) for k, v in suggestion.post_map.items()},
    )
