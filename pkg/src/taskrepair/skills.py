"""Skill records with intermediate-state structure and trace-based learning."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SkillStructureError, TraceError
from .grounding import Grounding


def _freeze_states(states):
    return frozenset(frozenset(s) for s in states)


def _freeze_map(m):
    return {frozenset(k): _freeze_states(v) for k, v in m.items()}


@dataclass(frozen=True)
class Skill:
    """Named action over symbolic world states.

    post_map sends each visited non-final state to its possible successors;
    pre_map is maintained as its exact inverse.  edge_counts optionally
    records how many training traces exhibited each edge.
    """

    name: str
    activation_prop: str
    pre_init: frozenset
    post_final: frozenset
    post_map: dict
    pre_map: dict = field(default=None)
    edge_counts: dict = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "pre_init", _freeze_states(self.pre_init))
        object.__setattr__(self, "post_final", _freeze_states(self.post_final))
        object.__setattr__(self, "post_map", _freeze_map(self.post_map))
        pre_map = {}
        for src, dsts in self.post_map.items():
            for dst in dsts:
                pre_map.setdefault(dst, set()).add(src)
        pre_map = {k: frozenset(v) for k, v in pre_map.items()}
        if self.pre_map is not None and _freeze_map(self.pre_map) != pre_map:
            raise SkillStructureError(
                f"skill {self.name!r}: pre_map is not the inverse of post_map"
            )
        object.__setattr__(self, "pre_map", pre_map)
        if self.edge_counts is not None:
            object.__setattr__(
                self,
                "edge_counts",
                {
                    (frozenset(a), frozenset(b)): int(c)
                    for (a, b), c in self.edge_counts.items()
                },
            )
        self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def unique_states(self):
        out = set(self.pre_init) | set(self.post_final)
        for src, dsts in self.post_map.items():
            out.add(src)
            out.update(dsts)
        return frozenset(out)

    @property
    def only_intermediate(self):
        return self.unique_states - self.pre_init - self.post_final

    def successors(self, state):
        return self.post_map.get(frozenset(state), frozenset())

    def predecessors(self, state):
        return self.pre_map.get(frozenset(state), frozenset())

    def validate(self):
        if not self.pre_init:
            raise SkillStructureError(f"skill {self.name!r}: empty initial precondition")
        if not self.post_final:
            raise SkillStructureError(f"skill {self.name!r}: empty final postcondition")
        for fin in self.post_final:
            if self.post_map.get(fin):
                raise SkillStructureError(
                    f"skill {self.name!r}: final postcondition has successors"
                )
        # every final state reachable from every initial precondition
        for start in self.pre_init:
            seen = {start}
            frontier = [start]
            while frontier:
                s = frontier.pop()
                for nxt in self.post_map.get(s, ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            for fin in self.post_final:
                if fin not in seen:
                    raise SkillStructureError(
                        f"skill {self.name!r}: final state {sorted(fin)} unreachable "
                        f"from initial precondition {sorted(start)}"
                    )
        # non-final visited states must have a way forward
        for s in self.unique_states - self.post_final:
            if not self.post_map.get(s):
                raise SkillStructureError(
                    f"skill {self.name!r}: non-final state {sorted(s)} has no successors"
                )

    def replace_structure(self, pre_init, post_final, post_map):
        return Skill(
            name=self.name,
            activation_prop=self.activation_prop,
            pre_init=pre_init,
            post_final=post_final,
            post_map=post_map,
        )


@dataclass(frozen=True)
class ExecutionTrace:
    """Continuous samples of one skill execution, start to termination."""

    samples: tuple

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in p) for p in self.samples)
        if not pts:
            raise TraceError("empty trace")
        object.__setattr__(self, "samples", pts)


def abstract_trace(trace: ExecutionTrace, grounding: Grounding, collapse=True):
    """Symbolic trace of an execution; consecutive duplicates collapsed."""
    states = [grounding.abstract(p) for p in trace.samples]
    if not collapse:
        return states
    out = [states[0]]
    for s in states[1:]:
        if s != out[-1]:
            out.append(s)
    return out


def learn_intermediate_structure(traces, grounding: Grounding, skill: Skill) -> Skill:
    """Populate post_map/pre_map from executions of a pre/post-declared skill.

    Dwell inside one grounding cell contributes no edge; consecutive distinct
    abstractions become post_map edges regardless of spatial adjacency.
    """
    post_map = {}
    counts = {}
    for idx, trace in enumerate(traces):
        states = abstract_trace(trace, grounding, collapse=True)
        if states[0] not in skill.pre_init:
            raise TraceError(
                f"starts at {sorted(states[0])}, not an initial precondition", idx
            )
        if states[-1] not in skill.post_final:
            raise TraceError(
                f"ends at {sorted(states[-1])}, not a final postcondition", idx
            )
        for a, b in zip(states, states[1:]):
            post_map.setdefault(a, set()).add(b)
            counts[(a, b)] = counts.get((a, b), 0) + 1
    return Skill(
        name=skill.name,
        activation_prop=skill.activation_prop,
        pre_init=skill.pre_init,
        post_final=skill.post_final,
        post_map=post_map,
        edge_counts=counts,
    )
