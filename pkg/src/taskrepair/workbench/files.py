"""Loading and validation of the workbench file formats.

All files are YAML with a ``format`` discriminator line; field names are
frozen and documented in FORMATS.md at the repository root.  Validation is
total: any malformed input raises SpecValidationError naming the file and
field, and nothing is partially loaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import SpecValidationError
from ..grounding import Ball, Box, Grounding
from ..parser import parse_formula
from ..skills import ExecutionTrace, Skill, learn_intermediate_structure
from ..vocabulary import Vocabulary

SPEC_FORMAT = "task-workbench/1"
GROUNDING_FORMAT = "task-grounding/1"
SKILL_FORMAT = "task-skill/1"


def _load_yaml(path, expected_format, where):
    path = Path(path)
    if not path.exists():
        raise SpecValidationError(f"file not found: {path}", where=where)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise SpecValidationError(f"invalid YAML: {e}", where=str(path)) from e
    if not isinstance(data, dict):
        raise SpecValidationError("top level must be a mapping", where=str(path))
    if data.get("format") != expected_format:
        raise SpecValidationError(
            f"format must be {expected_format!r}, got {data.get('format')!r}",
            where=f"{path}:format",
        )
    return data


def _need(data, key, where):
    if key not in data:
        raise SpecValidationError(f"missing field {key!r}", where=where)
    return data[key]


def _str_list(value, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SpecValidationError("expected a list of strings", where=where)
    return value


def load_grounding_file(path) -> Grounding:
    data = _load_yaml(path, GROUNDING_FORMAT, str(path))
    where = str(path)
    ws = _need(data, "workspace", where)
    try:
        workspace = Box(tuple(ws["lo"]), tuple(ws["hi"]))
    except (KeyError, TypeError, SpecValidationError) as e:
        raise SpecValidationError(f"bad workspace: {e}", where=f"{where}:workspace") from e
    regions = {}
    for name, spec in _need(data, "regions", where).items():
        rw = f"{where}:regions.{name}"
        if not isinstance(spec, dict) or len(spec) != 1:
            raise SpecValidationError("region must be a box or ball mapping", where=rw)
        kind, body = next(iter(spec.items()))
        try:
            if kind == "box":
                regions[name] = Box(tuple(body["lo"]), tuple(body["hi"]))
            elif kind == "ball":
                regions[name] = Ball(tuple(body["center"]), float(body["radius"]))
            else:
                raise SpecValidationError(f"unknown region kind {kind!r}", where=rw)
        except (KeyError, TypeError) as e:
            raise SpecValidationError(f"bad region: {e}", where=rw) from e
    try:
        return Grounding(regions=regions, workspace=workspace)
    except SpecValidationError as e:
        raise SpecValidationError(str(e), where=where) from e


def _state(value, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SpecValidationError(
            "state must be a list of proposition names", where=where
        )
    return frozenset(value)


def _load_trace(path):
    points = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        points.append(tuple(float(v) for v in parts))
    return ExecutionTrace(tuple(points))


def load_skill_file(path, grounding=None) -> Skill:
    data = _load_yaml(path, SKILL_FORMAT, str(path))
    where = str(path)
    name = _need(data, "name", where)
    activation = _need(data, "activation", where)
    pre_init = [_state(s, f"{where}:pre_init") for s in _need(data, "pre_init", where)]
    post_final = [
        _state(s, f"{where}:post_final") for s in _need(data, "post_final", where)
    ]

    transitions = data.get("transitions")
    traces = data.get("traces")
    if transitions is None and traces is None:
        raise SpecValidationError(
            "skill needs either explicit transitions or trace files", where=where
        )
    if transitions is not None:
        post_map = {}
        for i, edge in enumerate(transitions):
            ew = f"{where}:transitions[{i}]"
            if not isinstance(edge, dict) or "from" not in edge or "to" not in edge:
                raise SpecValidationError("edge needs from/to", where=ew)
            src = _state(edge["from"], ew)
            dsts = {_state(t, ew) for t in edge["to"]}
            post_map.setdefault(src, set()).update(dsts)
        return Skill(
            name=name,
            activation_prop=activation,
            pre_init=pre_init,
            post_final=post_final,
            post_map=post_map,
        )
    if grounding is None:
        raise SpecValidationError(
            "trace-defined skill requires a grounding", where=where
        )
    base = Path(path).parent
    parsed = [_load_trace(base / t) for t in _str_list(traces, f"{where}:traces")]
    draft = Skill(
        name=name,
        activation_prop=activation,
        pre_init=pre_init,
        post_final=post_final,
        post_map={p: set(post_final) for p in pre_init},
    )
    return learn_intermediate_structure(parsed, grounding, draft)


@dataclass
class RunConfig:
    seed: int = 0
    max_iterations: int = 20
    samples: int = 100
    threshold: float = 0.9
    epochs: int = 100
    checker: str = "holonomic"
    checker_box: dict = None
    demos_per_skill: int = 60
    trajectory_checks: bool = True


@dataclass
class WorkbenchSpec:
    """Everything a pipeline run needs, loaded and validated."""

    vocab: Vocabulary
    grounding: Grounding
    skills: list
    env_init: object
    sys_init: object
    env_safety: list
    sys_safety: list
    env_liveness: list
    sys_liveness: list
    poss_changes_text: list
    disallowed_text: list
    run: RunConfig
    path: str = ""


_RUN_RANGES = {
    "seed": (0, 2**31 - 1),
    "max_iterations": (1, 10_000),
    "samples": (1, 100_000),
    "threshold": (0.0, 1.0),
    "epochs": (0, 100_000),
    "demos_per_skill": (1, 100_000),
}


def load_workbench_spec(path) -> WorkbenchSpec:
    data = _load_yaml(path, SPEC_FORMAT, str(path))
    where = str(path)
    base = Path(path).parent

    voc = _need(data, "vocabulary", where)
    vocab = Vocabulary(
        tuple(_str_list(_need(voc, "world", f"{where}:vocabulary"), f"{where}:vocabulary.world")),
        tuple(_str_list(voc.get("user", []), f"{where}:vocabulary.user")),
        tuple(_str_list(_need(voc, "outputs", f"{where}:vocabulary"), f"{where}:vocabulary.outputs")),
    )

    grounding = load_grounding_file(base / _need(data, "grounding", where))
    for p in vocab.world_inputs:
        if p not in grounding.regions:
            raise SpecValidationError(
                f"world proposition {p!r} has no grounding region",
                where=f"{where}:vocabulary.world",
            )

    skills = []
    for ref in _need(data, "skills", where):
        skill = load_skill_file(base / ref, grounding=grounding)
        if skill.activation_prop not in vocab.outputs:
            raise SpecValidationError(
                f"skill {skill.name!r} activation {skill.activation_prop!r} "
                "is not a declared output",
                where=f"{where}:skills",
            )
        for state in skill.unique_states:
            for p in state:
                if p not in set(vocab.world_inputs):
                    raise SpecValidationError(
                        f"skill {skill.name!r} references undeclared proposition {p!r}",
                        where=f"{where}:skills",
                    )
        skills.append(skill)
    names = [s.name for s in skills]
    if len(set(names)) != len(names):
        raise SpecValidationError("duplicate skill names", where=f"{where}:skills")

    task = _need(data, "task", where)

    def formula(text, fw):
        try:
            return parse_formula(text, vocab)
        except Exception as e:
            raise SpecValidationError(str(e), where=fw) from e

    def formulas(key, default=()):
        out = []
        for i, text in enumerate(task.get(key, list(default))):
            out.append(formula(text, f"{where}:task.{key}[{i}]"))
        return out

    env_init = formula(task.get("env_init", "true"), f"{where}:task.env_init")
    sys_init = formula(task.get("sys_init", "true"), f"{where}:task.sys_init")
    sys_liveness = formulas("sys_liveness")
    if not sys_liveness:
        raise SpecValidationError(
            "at least one system liveness goal required", where=f"{where}:task"
        )

    cons = data.get("constraints", {}) or {}
    poss = _str_list(cons.get("poss_changes", []), f"{where}:constraints.poss_changes")
    disallowed = _str_list(cons.get("disallowed", []), f"{where}:constraints.disallowed")
    for i, text in enumerate(poss):
        formula(text, f"{where}:constraints.poss_changes[{i}]")
    for i, text in enumerate(disallowed):
        formula(text, f"{where}:constraints.disallowed[{i}]")

    run_data = data.get("run", {}) or {}
    run = RunConfig(
        seed=int(run_data.get("seed", 0)),
        max_iterations=int(run_data.get("max_iterations", 20)),
        samples=int(run_data.get("samples", 100)),
        threshold=float(run_data.get("threshold", 0.9)),
        epochs=int(run_data.get("epochs", 100)),
        checker=str(run_data.get("checker", "holonomic")),
        checker_box=run_data.get("checker_box"),
        demos_per_skill=int(run_data.get("demos_per_skill", 60)),
        trajectory_checks=bool(run_data.get("trajectory_checks", True)),
    )
    for fieldname, (lo, hi) in _RUN_RANGES.items():
        v = getattr(run, fieldname)
        if not lo <= v <= hi:
            raise SpecValidationError(
                f"{fieldname}={v} outside [{lo}, {hi}]", where=f"{where}:run.{fieldname}"
            )
    if run.checker not in ("holonomic", "reachable-box"):
        raise SpecValidationError(
            f"unknown checker {run.checker!r}", where=f"{where}:run.checker"
        )
    if run.checker == "reachable-box":
        box = run.checker_box or {}
        if "lo" not in box or "hi" not in box:
            raise SpecValidationError(
                "reachable-box checker requires checker_box with lo/hi",
                where=f"{where}:run.checker_box",
            )

    return WorkbenchSpec(
        vocab=vocab,
        grounding=grounding,
        skills=skills,
        env_init=env_init,
        sys_init=sys_init,
        env_safety=formulas("env_safety"),
        sys_safety=formulas("sys_safety"),
        env_liveness=formulas("env_liveness"),
        sys_liveness=sys_liveness,
        poss_changes_text=list(poss),
        disallowed_text=list(disallowed),
        run=run,
        path=str(path),
    )
