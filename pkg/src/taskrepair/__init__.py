"""Reactive task synthesis and skill repair workbench."""

from .errors import (
    CapacityError,
    DisconnectedChainError,
    FormulaSyntaxError,
    NonSafetyFormulaError,
    RepairExhaustedError,
    SamplerExhaustedError,
    SkillStructureError,
    SpecValidationError,
    TaskRepairError,
    TraceError,
    UndeclaredPropositionError,
    UnrealizableError,
    WorkspaceError,
)
from .vocabulary import Vocabulary

__all__ = [
    "CapacityError",
    "DisconnectedChainError",
    "FormulaSyntaxError",
    "NonSafetyFormulaError",
    "RepairExhaustedError",
    "SamplerExhaustedError",
    "SkillStructureError",
    "SpecValidationError",
    "TaskRepairError",
    "TraceError",
    "UndeclaredPropositionError",
    "UnrealizableError",
    "Vocabulary",
    "WorkspaceError",
]

__version__ = "0.1.0"
