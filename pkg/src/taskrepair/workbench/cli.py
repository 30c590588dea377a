"""Command-line entry point.

Verbs: validate, synth, repair, suite, plot.  Exit codes encode outcomes:
0 realizable as given, 1 repaired, 2 budget exhausted, 10+ errors.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ..errors import CapacityError, SpecValidationError, TaskRepairError
from .report import (
    EXIT_CAPACITY,
    EXIT_INTERNAL,
    EXIT_IO,
    EXIT_REALIZABLE,
    EXIT_VALIDATION,
)


def _apply_overrides(spec, seed, max_iters, threshold, samples, checker):
    if seed is not None:
        spec.run.seed = seed
    if max_iters is not None:
        spec.run.max_iterations = max_iters
    if threshold is not None:
        spec.run.threshold = threshold
    if samples is not None:
        spec.run.samples = samples
    if checker is not None:
        spec.run.checker = checker
    return spec


_GLOBAL_OPTIONS = [
    click.option("--seed", type=int, default=None, help="Random seed override."),
    click.option("--max-iters", type=int, default=None, help="Repair iteration budget."),
    click.option("--threshold", type=float, default=None, help="Feasibility pass threshold."),
    click.option("--samples", type=int, default=None, help="Feasibility sample count."),
    click.option(
        "--checker",
        type=click.Choice(["holonomic", "reachable-box"]),
        default=None,
        help="Kinematic feasibility checker.",
    ),
]


def _with_global_options(fn):
    for opt in reversed(_GLOBAL_OPTIONS):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Reactive task synthesis and skill-repair workbench."""


@main.command()
@click.argument("spec_path", type=click.Path(exists=True))
def validate(spec_path):
    """Validate a workbench spec and its referenced files."""
    from .files import load_workbench_spec

    try:
        spec = load_workbench_spec(spec_path)
    except SpecValidationError as e:
        click.echo(f"invalid: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(
        f"ok: {len(spec.skills)} skills, "
        f"{len(spec.vocab.all_props)} propositions, "
        f"{len(spec.sys_liveness)} liveness goals"
    )
    sys.exit(0)


@main.command()
@click.argument("spec_path", type=click.Path(exists=True))
@_with_global_options
def synth(spec_path, seed, max_iters, threshold, samples, checker):
    """Encode and synthesize only; report realizability."""
    from ..game import build_game, is_realizable
    from ..encoding import encode_spec
    from .files import load_workbench_spec

    try:
        spec = _apply_overrides(
            load_workbench_spec(spec_path), seed, max_iters, threshold, samples, checker
        )
        gr1 = encode_spec(
            spec.vocab,
            spec.grounding,
            spec.skills,
            env_init=spec.env_init,
            sys_init=spec.sys_init,
            sys_liveness=spec.sys_liveness,
            env_liveness=spec.env_liveness,
            sys_user=spec.sys_safety,
            env_user=spec.env_safety,
        )
        game = build_game(gr1, spec.vocab)
        ok = is_realizable(game)
    except SpecValidationError as e:
        click.echo(f"invalid: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    except CapacityError as e:
        click.echo(f"capacity: {e}", err=True)
        sys.exit(EXIT_CAPACITY)
    click.echo("realizable" if ok else "unrealizable")
    sys.exit(EXIT_REALIZABLE if ok else 2)


@main.command()
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default="out", show_default=True)
@click.option("--no-trajectories", is_flag=True, help="Symbolic repair only.")
@_with_global_options
def repair(spec_path, out_dir, no_trajectories, seed, max_iters, threshold, samples, checker):
    """Run the full encode-synthesize-repair pipeline."""
    from .files import load_workbench_spec
    from .pipeline import run_loaded
    from .plots import emit_plots
    from .report import write_strategy

    try:
        spec = _apply_overrides(
            load_workbench_spec(spec_path), seed, max_iters, threshold, samples, checker
        )
        if no_trajectories:
            spec.run.trajectory_checks = False
        result = run_loaded(spec)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.report.write(out / "report.json")
        if result.strategy is not None:
            write_strategy(result.strategy, out / "strategy.json")
        emit_plots(result, spec.grounding, out / "plots")
    except SpecValidationError as e:
        click.echo(f"invalid: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    except CapacityError as e:
        click.echo(f"capacity: {e}", err=True)
        sys.exit(EXIT_CAPACITY)
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    except TaskRepairError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INTERNAL)
    click.echo(f"{result.report.status} (report in {out_dir})")
    sys.exit(result.exit_code)


@main.command()
@click.argument("suite_path", type=click.Path(exists=True), required=False)
@click.option("--case", "only_case", default=None, help="Run a single case id.")
@_with_global_options
def suite(suite_path, only_case, seed, max_iters, threshold, samples, checker):
    """Run the bundled scenario regression suite."""
    from .scenarios import run_scenario_suite

    try:
        results = run_scenario_suite(
            suite_path, only_case=only_case, seed_override=seed
        )
    except SpecValidationError as e:
        click.echo(f"invalid: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    failed = 0
    for case, (ok, detail) in sorted(results.items()):
        click.echo(f"case {case}: {'PASS' if ok else 'FAIL'} - {detail}")
        if not ok:
            failed += 1
    sys.exit(0 if failed == 0 else 2)


@main.command()
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default="plots", show_default=True)
@_with_global_options
def plot(spec_path, out_dir, seed, max_iters, threshold, samples, checker):
    """Run the pipeline and emit plot-data files only."""
    from .files import load_workbench_spec
    from .pipeline import run_loaded
    from .plots import emit_plots

    try:
        spec = _apply_overrides(
            load_workbench_spec(spec_path), seed, max_iters, threshold, samples, checker
        )
        result = run_loaded(spec)
        emit_plots(result, spec.grounding, out_dir)
    except SpecValidationError as e:
        click.echo(f"invalid: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    except OSError as e:
        click.echo(f"io error: {e}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"plot data in {out_dir}")
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
