"""The encode / synthesize / repair / feasibility-check loop.

Each outer iteration re-encodes the currently committed skills, checks
realizability, and if needed runs seeded symbolic-repair attempts in both
operation orderings (preconditions first, postconditions first).  Extracted
suggestions go to a pluggable physical-feasibility callback; rejected ones
feed their failing transitions back as disallowed constraints and the loop
continues.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace

from ..errors import RepairExhaustedError
from ..formulas import TRUE
from ..game import (
    GameStructure,
    blocked_liveness,
    build_game,
    compute_winning_states,
    extract_strategy,
    is_realizable,
)
from ..gr1 import GR1Spec
from ..relations import TransitionRelation, relation_of
from ..encoding import encode_spec
from .constraints import RepairConstraints, add_disallowed, make_constraints
from .postcondition import modify_postconditions
from .precondition import modify_preconditions
from .suggestions import apply_suggestion, extract_suggestions


@dataclass(frozen=True)
class TaskSpec:
    """Task-level inputs: vocabulary, grounding, and the user formulas."""

    vocab: object
    grounding: object
    env_init: object = TRUE
    sys_init: object = TRUE
    sys_liveness: tuple = ()
    env_liveness: tuple = ()
    sys_user_safety: tuple = ()
    env_user_safety: tuple = ()


@dataclass
class RepairConfig:
    seed: int = 0
    max_iterations: int = 20
    inner_budget: int = 20
    check_suggestion: object = None  # fn(suggestion, log) -> (accepted, failures)
    relation_bound: int = None


@dataclass
class RepairOutcome:
    status: str  # realizable-as-given | repaired
    suggestions: list
    game: GameStructure
    skills: dict  # committed skill records by name
    constraints: RepairConstraints
    events: list = field(default_factory=list)


@dataclass
class _Relations:
    env_mutable: TransitionRelation
    env_hard: TransitionRelation
    sys_mutable: TransitionRelation
    sys_hard: TransitionRelation

    @property
    def env_effective(self):
        return self.env_mutable.intersection(self.env_hard)

    def sys_effective(self, mutable=None):
        return (mutable or self.sys_mutable).intersection(self.sys_hard)


def spec_relations(spec: GR1Spec, vocab, bound=None) -> _Relations:
    kw = {} if bound is None else {"bound": bound}
    return _Relations(
        env_mutable=relation_of(spec.env_safety_mutable or [TRUE], vocab, "all", "inputs", **kw),
        env_hard=relation_of(spec.env_safety_hard or [TRUE], vocab, "all", "inputs", **kw),
        sys_mutable=relation_of(spec.sys_safety_mutable or [TRUE], vocab, "all", "all", **kw),
        sys_hard=relation_of(spec.sys_safety_hard or [TRUE], vocab, "all", "all", **kw),
    )


def _game_with(base: GameStructure, tau_env, tau_sys) -> GameStructure:
    return GameStructure(
        vocab=base.vocab,
        theta_init=base.theta_init,
        tau_env=tau_env,
        tau_sys=tau_sys,
        env_liveness=base.env_liveness,
        sys_liveness=base.sys_liveness,
    )


def _attempt_seed(seed, outer, ordering):
    return (seed * 10007 + outer * 101 + (0 if ordering == "pre-first" else 1)) & 0x7FFFFFFF


def symbolic_attempt(
    base_game,
    rels: _Relations,
    user_props,
    constraints,
    ordering,
    seed,
    budget,
    log,
):
    """Alternate precondition/postcondition modifications until realizable.

    Returns (tau_env', tau_sys_mutable') on success, None when stuck or out
    of budget.
    """
    rng = random.Random(seed)
    tau_e = rels.env_effective
    tau_s_mut = rels.sys_mutable
    ops = ["pre", "post"] if ordering == "pre-first" else ["post", "pre"]
    stuck_streak = 0
    for step in range(budget):
        game = _game_with(base_game, tau_e, rels.sys_effective(tau_s_mut))
        if is_realizable(game):
            return tau_e, tau_s_mut
        winning = compute_winning_states(game)
        j = blocked_liveness(game, winning)
        if j is None:
            j = 0
        z = winning.per_liveness[j]
        op = ops[step % 2]
        if op == "pre":
            tau_e2, tau_s2 = modify_preconditions(
                tau_e,
                rels.env_hard,
                tau_s_mut,
                rels.sys_hard,
                z,
                user_props,
                constraints,
                rng,
            )
            changed = tau_e2 != tau_e or tau_s2 != tau_s_mut
            tau_e, tau_s_mut = tau_e2, tau_s2
        else:
            tau_e2 = modify_postconditions(
                tau_e, tau_s_mut, z, user_props, constraints, rng
            )
            changed = tau_e2 != tau_e
            tau_e = tau_e2
        log.append(
            {
                "phase": "symbolic",
                "ordering": ordering,
                "step": step,
                "op": op,
                "goal": j,
                "changed": changed,
            }
        )
        if changed:
            stuck_streak = 0
        else:
            stuck_streak += 1
            if stuck_streak >= 2:
                return None
    game = _game_with(base_game, tau_e, rels.sys_effective(tau_s_mut))
    if is_realizable(game):
        return tau_e, tau_s_mut
    return None


def repair(task: TaskSpec, skills, constraints=None, config=None):
    """Run the full repair loop over a task and its skills.

    ``config.check_suggestion`` decides physical feasibility; None accepts
    every suggestion (symbolic-only mode).  Returns a RepairOutcome or raises
    RepairExhaustedError with the accumulated constraints and attempt log.
    """
    config = config or RepairConfig()
    if constraints is None:
        constraints = make_constraints(task.vocab, task.grounding)
    committed = {s.name: s for s in skills}
    order = [s.name for s in skills]
    user_props = task.vocab.user_inputs
    events = []
    accepted = []
    base_game = None  # rebuilt only when a commit changes the skills
    rels = None

    for outer in range(config.max_iterations):
        t0 = time.perf_counter()
        if base_game is None:
            spec = encode_spec(
                task.vocab,
                task.grounding,
                [committed[n] for n in order],
                env_init=task.env_init,
                sys_init=task.sys_init,
                sys_liveness=list(task.sys_liveness),
                env_liveness=list(task.env_liveness),
                sys_user=list(task.sys_user_safety),
                env_user=list(task.env_user_safety),
            )
            base_game = build_game(spec, task.vocab, bound=config.relation_bound)
            rels = spec_relations(spec, task.vocab, bound=config.relation_bound)
        realizable = is_realizable(base_game)
        events.append(
            {
                "phase": "synthesize",
                "iteration": outer,
                "realizable": realizable,
                "seconds": time.perf_counter() - t0,
            }
        )
        if realizable:
            status = "realizable-as-given" if outer == 0 and not accepted else "repaired"
            return RepairOutcome(
                status=status,
                suggestions=accepted,
                game=base_game,
                skills=dict(committed),
                constraints=constraints,
                events=events,
            )

        result = None
        hard_stuck = 0
        for ordering in ("pre-first", "post-first"):
            log = []
            got = symbolic_attempt(
                base_game,
                rels,
                user_props,
                constraints,
                ordering,
                _attempt_seed(config.seed, outer, ordering),
                config.inner_budget,
                log,
            )
            events.extend(
                {**entry, "iteration": outer} for entry in log
            )
            if got is not None:
                result = got
                break
            if log and not any(e["changed"] for e in log):
                hard_stuck += 1
        if result is None:
            if hard_stuck == 2:
                raise RepairExhaustedError(
                    "no symbolic modification is allowed by the constraints",
                    disallowed=constraints.disallowed,
                    attempts=events,
                )
            continue

        tau_e_new, tau_s_mut_new = result
        repaired_game = _game_with(
            base_game, tau_e_new, rels.sys_effective(tau_s_mut_new)
        )
        strategy = extract_strategy(repaired_game)
        suggestions = extract_suggestions(
            strategy,
            rels.env_effective,
            rels.sys_mutable,
            [committed[n] for n in order],
        )
        events.append(
            {
                "phase": "suggest",
                "iteration": outer,
                "count": len(suggestions),
                "skills": [s.base_skill for s in suggestions],
            }
        )

        for sug in suggestions:
            if config.check_suggestion is None:
                ok, failures = True, []
            else:
                ok, failures = config.check_suggestion(sug, events)
            if ok:
                committed[sug.base_skill] = apply_suggestion(
                    committed[sug.base_skill], sug
                )
                accepted.append(sug)
                base_game = None  # skills changed: re-encode next iteration
                events.append(
                    {
                        "phase": "feasibility",
                        "iteration": outer,
                        "skill": sug.base_skill,
                        "accepted": True,
                    }
                )
            else:
                constraints = add_disallowed(constraints, failures, task.vocab)
                events.append(
                    {
                        "phase": "feasibility",
                        "iteration": outer,
                        "skill": sug.base_skill,
                        "accepted": False,
                        "failures": len(failures),
                    }
                )

    raise RepairExhaustedError(
        f"repair budget of {config.max_iterations} iterations exhausted",
        disallowed=constraints.disallowed,
        attempts=events,
    )
