"""File-driven entry points: spec loading, the pipeline, scenarios, plots."""

from .files import load_grounding_file, load_skill_file, load_workbench_spec
from .pipeline import PipelineResult, run
from .report import RepairReport

__all__ = [
    "PipelineResult",
    "RepairReport",
    "load_grounding_file",
    "load_skill_file",
    "load_workbench_spec",
    "run",
]
