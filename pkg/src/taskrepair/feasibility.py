"""Sampling-based feasibility checking of repaired controllers.

Rollouts from sampled endpoint pairs are abstracted and scored against the
chain constraint; per-transition monitors localize which skill transitions
fail, and a pluggable kinematic checker vets the waypoints themselves.  A
controller is accepted when the satisfied fraction clears the threshold and
the kinematic check passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dmp import DmpSkillController, rollout_batch
from .errors import SamplerExhaustedError
from .grounding import Box, Grounding
from .trajectories import TrajectoryConstraint, constraint_satisfied

PASS_THRESHOLD = 0.9
DEFAULT_SAMPLES = 100

OUT_OF_WORKSPACE = frozenset({"__out_of_workspace__"})


class HolonomicChecker:
    """Always-feasible point robot: any waypoint sequence can be followed."""

    name = "holonomic"

    def feasible_mask(self, points):
        return np.ones(len(points), dtype=bool)


class ReachableBoxChecker:
    """Rejects waypoints outside a configurable reachable region."""

    name = "reachable-box"

    def __init__(self, lo, hi):
        self.region = Box(tuple(lo), tuple(hi))

    def feasible_mask(self, points):
        return np.asarray(self.region.contains_many(points), dtype=bool)


CHECKERS = {
    "holonomic": lambda **kw: HolonomicChecker(),
    "reachable-box": lambda lo, hi, **kw: ReachableBoxChecker(lo, hi),
}


@dataclass
class FeasibilityVerdict:
    pass_fraction: float
    per_transition: dict  # (pre, successor set) -> (successes, attempts)
    kinematic_ok: bool
    accepted: bool
    samples: int = 0
    threshold: float = PASS_THRESHOLD


ENDPOINT_INTERIOR = 0.2


def endpoint_sampler(
    constraint: TrajectoryConstraint,
    grounding: Grounding,
    seed=0,
    interior=ENDPOINT_INTERIOR,
):
    """Sampler of (start, goal) pairs from the chain's endpoint regions.

    Points are drawn away from region faces (``interior``): a skill starts
    where the previous motion converged, which is never exactly on a cell
    boundary.
    """
    rng = np.random.default_rng(seed)
    starts = sorted(constraint.initial_states, key=sorted)
    goals = sorted(constraint.final_states, key=sorted)
    if not starts or not goals:
        raise SamplerExhaustedError("constraint has no endpoint states to sample")

    def sample():
        s = starts[rng.integers(len(starts))]
        g = goals[rng.integers(len(goals))]
        return (
            grounding.sample_state_region(s, rng, interior=interior),
            grounding.sample_state_region(g, rng, interior=interior),
        )

    return sample


def abstract_lenient(trajectory, grounding: Grounding):
    """Pointwise abstraction mapping out-of-workspace samples to a sentinel."""
    pts = np.asarray(trajectory, dtype=float)
    lo = np.asarray(grounding.workspace.lo)
    hi = np.asarray(grounding.workspace.hi)
    inside = np.all((pts >= lo) & (pts <= hi), axis=-1)
    names = sorted(grounding.regions)
    member = {n: grounding.regions[n].contains_many(pts) for n in names}
    out = []
    for i in range(len(pts)):
        if not inside[i]:
            out.append(OUT_OF_WORKSPACE)
        else:
            out.append(frozenset(n for n in names if member[n][i]))
    return out


def check_feasibility(
    ctrl: DmpSkillController,
    constraint: TrajectoryConstraint,
    grounding: Grounding,
    sampler=None,
    kinematic_checker=None,
    samples=DEFAULT_SAMPLES,
    threshold=PASS_THRESHOLD,
    seed=0,
) -> FeasibilityVerdict:
    """Roll out sampled endpoint pairs and score the constraint.

    per_transition counts, for each chain transition, the rollouts that both
    satisfied its monitor and kept the involved waypoints kinematically
    feasible.  kinematic_ok requires every constraint-satisfying rollout to
    be fully executable.
    """
    if sampler is None:
        sampler = endpoint_sampler(constraint, grounding, seed=seed)
    checker = kinematic_checker or HolonomicChecker()

    pairs = [sampler() for _ in range(samples)]
    starts = np.array([p[0] for p in pairs])
    goals = np.array([p[1] for p in pairs])
    paths = rollout_batch(ctrl, starts, goals)  # (B, T, d)

    transitions = constraint.transitions()
    counts = {t: [0, 0] for t in transitions}
    n_pass = 0
    kin_ok = True
    allowed_map = dict(constraint.implications)

    for b in range(len(paths)):
        trace = abstract_lenient(paths[b], grounding)
        mask = checker.feasible_mask(paths[b])
        satisfied = constraint_satisfied(trace, constraint)
        if satisfied:
            n_pass += 1
            if not bool(mask.all()):
                kin_ok = False
        for pre, succs in transitions:
            allowed = allowed_map[pre]
            attempted = False
            ok = True
            for k in range(len(trace) - 1):
                if trace[k] != pre:
                    continue
                attempted = True
                if trace[k + 1] not in allowed:
                    ok = False
                if not (mask[k] and mask[k + 1]):
                    ok = False
            if attempted:
                counts[(pre, succs)][0] += 1 if ok else 0
                counts[(pre, succs)][1] += 1

    fraction = n_pass / float(samples) if samples else 0.0
    verdict = FeasibilityVerdict(
        pass_fraction=fraction,
        per_transition={t: tuple(c) for t, c in counts.items()},
        kinematic_ok=kin_ok,
        accepted=(fraction >= threshold) and kin_ok,
        samples=samples,
        threshold=threshold,
    )
    return verdict


def failing_transitions_to_constraints(
    verdict: FeasibilityVerdict,
    skill_name,
    activation_prop,
    robustness_threshold=PASS_THRESHOLD,
):
    """Transitions whose per-rollout success rate fell below the threshold.

    Emitted in the shape expected by the disallowed-constraint recorder:
    (precondition state including the activation proposition, successors).
    Transitions no rollout ever attempted are left alone -- there is no
    evidence against them, and banning them would poison feasible chains
    that share those segments.
    """
    out = []
    for (pre, succs), (good, attempts) in sorted(
        verdict.per_transition.items(), key=lambda kv: (sorted(kv[0][0]),)
    ):
        if attempts == 0:
            continue
        if good / attempts < robustness_threshold:
            out.append((frozenset(pre | {activation_prop}), succs))
    del skill_name
    return out
