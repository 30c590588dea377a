"""Run reports and strategy tables in the workbench output format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

REPORT_SCHEMA = "task-repair-report/1"
STRATEGY_SCHEMA = "task-strategy-table/1"

EXIT_REALIZABLE = 0
EXIT_REPAIRED = 1
EXIT_EXHAUSTED = 2
EXIT_VALIDATION = 10
EXIT_CAPACITY = 11
EXIT_IO = 12
EXIT_INTERNAL = 13

STATUS_EXIT = {
    "realizable-as-given": EXIT_REALIZABLE,
    "repaired": EXIT_REPAIRED,
    "exhausted": EXIT_EXHAUSTED,
}


def _state_list(state):
    return sorted(state)


def suggestion_record(suggestion):
    return {
        "skill": suggestion.base_skill,
        "activation": suggestion.activation_prop,
        "pre_init": sorted(map(_state_list, suggestion.pre_init)),
        "post_final": sorted(map(_state_list, suggestion.post_final)),
        "post_map": [
            {
                "from": _state_list(src),
                "to": sorted(map(_state_list, suggestion.post_map[src])),
            }
            for src in sorted(suggestion.post_map, key=sorted)
        ],
        "provenance": list(suggestion.provenance),
    }


@dataclass
class RepairReport:
    """Chronological record of one pipeline run."""

    schema: str = REPORT_SCHEMA
    status: str = "exhausted"
    seed: int = 0
    events: list = field(default_factory=list)
    suggestions: list = field(default_factory=list)
    feasibility: list = field(default_factory=list)
    disallowed: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        return STATUS_EXIT.get(self.status, EXIT_INTERNAL)

    def to_json(self, include_timings=True):
        data = {
            "schema": self.schema,
            "status": self.status,
            "seed": self.seed,
            "events": self.events,
            "suggestions": self.suggestions,
            "feasibility": self.feasibility,
            "disallowed": self.disallowed,
        }
        if include_timings:
            data["timings"] = self.timings
        return json.dumps(data, indent=2, sort_keys=True)

    def digest_json(self):
        """Report serialization with timing fields removed (for determinism
        comparisons)."""
        events = [
            {k: v for k, v in e.items() if k != "seconds"} for e in self.events
        ]
        data = {
            "schema": self.schema,
            "status": self.status,
            "seed": self.seed,
            "events": events,
            "suggestions": self.suggestions,
            "feasibility": self.feasibility,
            "disallowed": self.disallowed,
        }
        return json.dumps(data, indent=2, sort_keys=True)

    def write(self, path):
        Path(path).write_text(self.to_json() + "\n")


def verdict_record(skill, verdict):
    return {
        "skill": skill,
        "pass_fraction": verdict.pass_fraction,
        "threshold": verdict.threshold,
        "samples": verdict.samples,
        "kinematic_ok": verdict.kinematic_ok,
        "accepted": verdict.accepted,
        "per_transition": [
            {
                "from": _state_list(pre),
                "to": sorted(map(_state_list, succs)),
                "successes": counts[0],
                "attempts": counts[1],
            }
            for (pre, succs), counts in sorted(
                verdict.per_transition.items(), key=lambda kv: sorted(kv[0][0])
            )
        ],
    }


def strategy_table(strategy):
    """Deterministic transition table of an extracted strategy."""
    moves = []
    for (state, env_next, goal), out in sorted(
        strategy.moves.items(), key=lambda kv: (sorted(kv[0][0]), sorted(kv[0][1]), kv[0][2])
    ):
        moves.append(
            {
                "state": _state_list(state),
                "env_next": _state_list(env_next),
                "goal": goal,
                "sys_next": _state_list(out),
            }
        )
    return {
        "schema": STRATEGY_SCHEMA,
        "initial": _state_list(strategy.initial),
        "initial_goal": strategy.initial_goal,
        "moves": moves,
    }


def write_strategy(strategy, path):
    Path(path).write_text(json.dumps(strategy_table(strategy), indent=2) + "\n")
