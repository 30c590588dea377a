"""The full encode / synthesize / repair / feasibility pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dmp import chain_demonstrations, dmp_rollout, fit_dmp, rollout_batch
from ..errors import RepairExhaustedError, SamplerExhaustedError
from ..feasibility import (
    CHECKERS,
    HolonomicChecker,
    ReachableBoxChecker,
    abstract_lenient,
    check_feasibility,
    endpoint_sampler,
    failing_transitions_to_constraints,
)
from ..game import extract_strategy
from ..optimize import OptimizeConfig, repair_trajectory
from ..parser import parse_formula
from ..relations import relation_of
from ..repair import RepairConfig, TaskSpec, repair
from ..repair.constraints import default_poss_changes, make_constraints
from ..trajectories import constraint_satisfied, suggestion_to_constraint
from ..vocabulary import Vocabulary
from .files import WorkbenchSpec, load_workbench_spec
from .report import (
    RepairReport,
    suggestion_record,
    verdict_record,
    write_strategy,
)


@dataclass
class TrajectoryDump:
    """Sampled rollouts of one feasibility check, for plotting."""

    skill: str
    kind: str  # base | repaired
    satisfied: list  # per-rollout bool
    paths: np.ndarray  # (B, T, dims)


@dataclass
class PipelineResult:
    report: RepairReport
    outcome: object = None
    strategy: object = None
    controllers: dict = field(default_factory=dict)
    dumps: list = field(default_factory=list)

    @property
    def exit_code(self):
        return self.report.exit_code


def _build_checker(run):
    if run.checker == "reachable-box":
        box = run.checker_box
        return ReachableBoxChecker(box["lo"], box["hi"])
    return HolonomicChecker()


def make_physical_checker(
    spec: WorkbenchSpec,
    controllers,
    report: RepairReport,
    dumps,
    checker=None,
):
    """Feasibility callback for the repair loop.

    Optimizes the base controller of the suggested skill against the chain
    constraint, samples rollouts, and either commits the new controller or
    emits the failing transitions for the disallowed relation.
    """
    run = spec.run
    checker = checker or _build_checker(run)
    counter = {"n": 0}

    def check(suggestion, events):
        counter["n"] += 1
        call_seed = run.seed * 1009 + counter["n"]
        constraint = suggestion_to_constraint(suggestion)
        base = controllers[suggestion.base_skill]
        try:
            repaired = repair_trajectory(
                base,
                constraint,
                spec.grounding,
                OptimizeConfig(seed=call_seed, epochs=run.epochs),
            )
            verdict = check_feasibility(
                repaired,
                constraint,
                spec.grounding,
                kinematic_checker=checker,
                samples=run.samples,
                threshold=run.threshold,
                seed=call_seed + 1,
            )
        except SamplerExhaustedError as e:
            report.feasibility.append(
                {
                    "skill": suggestion.base_skill,
                    "accepted": False,
                    "error": str(e),
                }
            )
            failures = [
                (frozenset(pre | {suggestion.activation_prop}), succs)
                for pre, succs in constraint.transitions()
            ]
            return False, failures

        report.feasibility.append(verdict_record(suggestion.base_skill, verdict))
        dumps.append(_dump(suggestion, repaired, constraint, spec, run, call_seed + 1))
        if verdict.accepted:
            controllers[suggestion.base_skill] = repaired
            return True, []
        failures = failing_transitions_to_constraints(
            verdict,
            suggestion.base_skill,
            suggestion.activation_prop,
            robustness_threshold=run.threshold,
        )
        if not failures:
            failures = [
                (frozenset(pre | {suggestion.activation_prop}), succs)
                for pre, succs in constraint.transitions()
            ]
        return False, failures

    return check


def _dump(suggestion, ctrl, constraint, spec, run, seed):
    sampler = endpoint_sampler(constraint, spec.grounding, seed=seed)
    pairs = [sampler() for _ in range(min(run.samples, 50))]
    paths = rollout_batch(
        ctrl, np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    )
    satisfied = [
        constraint_satisfied(abstract_lenient(paths[b], spec.grounding), constraint)
        for b in range(len(paths))
    ]
    return TrajectoryDump(
        skill=suggestion.base_skill, kind="repaired", satisfied=satisfied, paths=paths
    )


def fit_controllers(spec: WorkbenchSpec):
    """Base controllers per skill, bootstrapped from chain demonstrations."""
    out = {}
    for skill in spec.skills:
        demos = chain_demonstrations(
            skill,
            spec.grounding,
            count=spec.run.demos_per_skill,
            seed=spec.run.seed * 7919 + hash(skill.name) % 1000,
        )
        out[skill.name] = fit_dmp(demos)
    return out


def run_loaded(spec: WorkbenchSpec) -> PipelineResult:
    """Execute the pipeline on an already-validated workbench spec."""
    t0 = time.perf_counter()
    report = RepairReport(seed=spec.run.seed)
    task = TaskSpec(
        vocab=spec.vocab,
        grounding=spec.grounding,
        env_init=spec.env_init,
        sys_init=spec.sys_init,
        sys_liveness=tuple(spec.sys_liveness),
        env_liveness=tuple(spec.env_liveness),
        sys_user_safety=tuple(spec.sys_safety),
        env_user_safety=tuple(spec.env_safety),
    )

    poss = None
    if spec.poss_changes_text:
        poss = relation_of(
            [parse_formula(t, spec.vocab) for t in spec.poss_changes_text],
            spec.vocab,
            "inputs",
            "inputs",
        ).intersection(default_poss_changes(spec.vocab, spec.grounding))
    disallowed = None
    if spec.disallowed_text:
        from ..formulas import Not, conj
        from ..relations import TransitionRelation

        banned = set()
        for t in spec.disallowed_text:
            f = parse_formula(t, spec.vocab)
            # files carry G(!(pattern)); the banned pairs satisfy the pattern
            body = f
            from ..formulas import Always

            if isinstance(body, Always):
                body = body.arg
            if isinstance(body, Not):
                body = body.arg
            banned |= relation_of(body, spec.vocab, "all", "inputs").pairs
        disallowed = TransitionRelation(banned, spec.vocab.all_props, spec.vocab.inputs)
    constraints = make_constraints(
        spec.vocab, spec.grounding, poss_changes=poss, disallowed=disallowed
    )

    controllers = {}
    dumps = []
    check = None
    if spec.run.trajectory_checks:
        t_fit = time.perf_counter()
        controllers = fit_controllers(spec)
        report.timings["fit_controllers"] = time.perf_counter() - t_fit
        for skill in spec.skills:
            dumps.append(_base_dump(skill, controllers[skill.name], spec))
        check = make_physical_checker(spec, controllers, report, dumps)

    config = RepairConfig(
        seed=spec.run.seed,
        max_iterations=spec.run.max_iterations,
        check_suggestion=check,
    )
    strategy = None
    try:
        outcome = repair(task, spec.skills, constraints=constraints, config=config)
        report.status = outcome.status
        report.events = outcome.events
        report.suggestions = [suggestion_record(s) for s in outcome.suggestions]
        report.disallowed = _disallowed_records(outcome.constraints)
        strategy = extract_strategy(outcome.game)
    except RepairExhaustedError as e:
        report.status = "exhausted"
        report.events = e.attempts
        if e.disallowed is not None:
            report.disallowed = _disallowed_records_rel(e.disallowed)
        outcome = None
    report.timings["total"] = time.perf_counter() - t0
    return PipelineResult(
        report=report,
        outcome=outcome,
        strategy=strategy,
        controllers=controllers,
        dumps=dumps,
    )


def _base_dump(skill, ctrl, spec):
    from ..trajectories import constraint_for_skill

    constraint = constraint_for_skill(skill)
    sampler = endpoint_sampler(constraint, spec.grounding, seed=spec.run.seed)
    pairs = [sampler() for _ in range(min(spec.run.samples, 50))]
    paths = rollout_batch(
        ctrl, np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    )
    satisfied = [
        constraint_satisfied(abstract_lenient(paths[b], spec.grounding), constraint)
        for b in range(len(paths))
    ]
    return TrajectoryDump(skill=skill.name, kind="base", satisfied=satisfied, paths=paths)


def _disallowed_records(constraints):
    return _disallowed_records_rel(constraints.disallowed)


def _disallowed_records_rel(rel):
    return [
        {"state": sorted(a), "next_inputs": sorted(b)}
        for a, b in rel
    ]


def run(spec_path, out_dir=None) -> PipelineResult:
    """Load, validate, execute, and write artifacts for one spec file."""
    spec = load_workbench_spec(spec_path)
    result = run_loaded(spec)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.report.write(out / "report.json")
        if result.strategy is not None:
            write_strategy(result.strategy, out / "strategy.json")
        from .plots import emit_plots

        emit_plots(result, spec.grounding, out / "plots")
    return result
