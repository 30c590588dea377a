"""Symbolic repair of unrealizable tasks by skill modification."""

from .constraints import RepairConstraints, add_disallowed, default_poss_changes
from .precondition import modify_preconditions
from .postcondition import modify_postconditions
from .suggestions import SkillSuggestion, apply_suggestion, extract_suggestions
from .loop import RepairConfig, RepairOutcome, TaskSpec, repair

__all__ = [
    "RepairConstraints",
    "RepairConfig",
    "RepairOutcome",
    "SkillSuggestion",
    "TaskSpec",
    "add_disallowed",
    "apply_suggestion",
    "default_poss_changes",
    "extract_suggestions",
    "modify_postconditions",
    "modify_preconditions",
    "repair",
]
