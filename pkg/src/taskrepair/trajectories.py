"""Trajectory-level constraints, abstraction, and monitors for suggestions.

A suggestion's chain becomes a conjunction of per-precondition implications
(from each visited non-final state, the next sample stays put or moves to an
observed successor) plus a global membership in the chain's states.  The
same structure drives both the satisfaction check used for acceptance and
the per-transition monitors used to localize failures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grounding import Grounding


@dataclass(frozen=True)
class TrajectoryConstraint:
    """Per-precondition implications plus chain membership for one skill."""

    skill: str
    implications: tuple  # ((pre_state, allowed_next_states), ...) sorted
    unique_states: frozenset
    initial_states: frozenset = frozenset()
    final_states: frozenset = frozenset()

    @staticmethod
    def from_chain(skill_name, pre_init, post_map, post_final):
        unique = set(pre_init) | set(post_final)
        for src, dsts in post_map.items():
            unique.add(src)
            unique.update(dsts)
        imps = []
        for src in sorted(post_map, key=sorted):
            if src in post_final:
                continue
            allowed = frozenset({src}) | frozenset(post_map[src])
            imps.append((src, allowed))
        return TrajectoryConstraint(
            skill=skill_name,
            implications=tuple(imps),
            unique_states=frozenset(unique),
            initial_states=frozenset(frozenset(s) for s in pre_init),
            final_states=frozenset(frozenset(s) for s in post_final),
        )

    def transitions(self):
        """(pre, successor set) pairs in a canonical order."""
        return [
            (pre, frozenset(allowed - {pre})) for pre, allowed in self.implications
        ]


def suggestion_to_constraint(suggestion) -> TrajectoryConstraint:
    """Both conjunct families for a suggestion's transition chain."""
    suggestion.validate_connected()
    return TrajectoryConstraint.from_chain(
        suggestion.base_skill,
        suggestion.pre_init,
        suggestion.post_map,
        suggestion.post_final,
    )


def constraint_for_skill(skill) -> TrajectoryConstraint:
    return TrajectoryConstraint.from_chain(
        skill.name, skill.pre_init, skill.post_map, skill.post_final
    )


def abstract_trajectory(trajectory, grounding: Grounding):
    """Pointwise abstraction of a rollout, keeping dwell steps."""
    return grounding.abstract_many(trajectory)


def constraint_formulas(constraint: TrajectoryConstraint, world_props):
    """The constraint as printable formulas: one clause per implication plus
    the global chain-membership disjunction."""
    from .formulas import Always, Implies, Next, disj
    from .semantics import state_formula

    clauses = []
    for pre, allowed in constraint.implications:
        ordered = [pre] + sorted(allowed - {pre}, key=sorted)
        clauses.append(
            Always(
                Implies(
                    state_formula(pre, world_props),
                    Next(disj(state_formula(s, world_props) for s in ordered)),
                )
            )
        )
    index = {p: i for i, p in enumerate(world_props)}
    ordered_unique = sorted(
        constraint.unique_states, key=lambda s: tuple(sorted(index[p] for p in s))
    )
    clauses.append(
        Always(disj(state_formula(s, world_props) for s in ordered_unique))
    )
    return clauses


def constraint_satisfied(symbol_trace, constraint: TrajectoryConstraint) -> bool:
    """Direct evaluation of the full constraint over a symbolic trace."""
    trace = [frozenset(s) for s in symbol_trace]
    for s in trace:
        if s not in constraint.unique_states:
            return False
    allowed = dict(constraint.implications)
    for now, nxt in zip(trace, trace[1:]):
        if now in allowed and nxt not in allowed[now]:
            return False
    return True


def monitor_trace(symbol_trace, skill_or_suggestion):
    """Per-transition monitor results for one symbolic trace.

    For each (precondition -> successors) transition of the chain, reports
    True when every step leaving that precondition stays put or lands in a
    successor; None when the precondition is never visited before the final
    sample.  A separate "unique" entry reports chain membership of every
    sample.
    """
    if isinstance(skill_or_suggestion, TrajectoryConstraint):
        constraint = skill_or_suggestion
    elif hasattr(skill_or_suggestion, "base_skill"):
        constraint = suggestion_to_constraint(skill_or_suggestion)
    else:
        constraint = constraint_for_skill(skill_or_suggestion)
    trace = [frozenset(s) for s in symbol_trace]
    results = {}
    for pre, allowed in constraint.implications:
        verdict = None
        for now, nxt in zip(trace, trace[1:]):
            if now != pre:
                continue
            ok = nxt in allowed
            verdict = ok if verdict is None else (verdict and ok)
        results[(pre, frozenset(allowed - {pre}))] = verdict
    results["unique"] = all(s in constraint.unique_states for s in trace)
    return results
