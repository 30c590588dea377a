"""Exception types shared across the package."""


class TaskRepairError(Exception):
    """Base class for all package errors."""


class FormulaSyntaxError(TaskRepairError):
    """Raised when formula text does not conform to the grammar."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UndeclaredPropositionError(TaskRepairError):
    """Raised when a formula references a proposition absent from the vocabulary."""

    def __init__(self, name, position=None):
        self.name = name
        msg = f"undeclared proposition: {name!r}"
        if position is not None:
            msg = f"{msg} (at position {position})"
        super().__init__(msg)


class NonSafetyFormulaError(TaskRepairError):
    """Raised when a step evaluation is attempted on a non-safety formula."""


class CapacityError(TaskRepairError):
    """Raised when an explicit enumeration would exceed the configured bound."""


class UnrealizableError(TaskRepairError):
    """Raised when a strategy is requested for an unrealizable game."""


class SkillStructureError(TaskRepairError):
    """Raised when a skill violates its structural invariants."""


class TraceError(TaskRepairError):
    """Raised when an execution trace violates skill pre/post membership."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"trace {index}: {message}"
        super().__init__(message)


class WorkspaceError(TaskRepairError):
    """Raised when a point lies outside the declared workspace."""


class SamplerExhaustedError(TaskRepairError):
    """Raised when endpoint sampling cannot find points in a grounding region."""


class DisconnectedChainError(TaskRepairError):
    """Raised when an extracted suggestion chain is not connected."""


class RepairExhaustedError(TaskRepairError):
    """Raised when the repair loop runs out of iterations.

    Carries the accumulated disallowed relation and the attempt log so a
    caller can inspect what was tried.
    """

    def __init__(self, message, disallowed=None, attempts=None):
        super().__init__(message)
        self.disallowed = disallowed
        self.attempts = attempts if attempts is not None else []


class SpecValidationError(TaskRepairError):
    """Raised when a workbench file fails validation.

    ``where`` identifies the file and field that failed.
    """

    def __init__(self, message, where=None):
        self.where = where
        if where:
            message = f"{where}: {message}"
        super().__init__(message)
