"""Six-part reactive specification with mutable/hard safety partitions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import TRUE, Formula


@dataclass
class GR1Spec:
    """Initial conditions, safety and liveness for environment and system.

    Safety formulas are split into a mutable part (what the repair process
    may rewrite) and a hard part (grounding mutual exclusions, the frame
    axiom, and any user-provided constraints).  Liveness formulas are plain
    Boolean formulas; the always/eventually wrapper is implicit.
    """

    env_init: Formula = TRUE
    sys_init: Formula = TRUE
    env_safety_mutable: list = field(default_factory=list)
    env_safety_hard: list = field(default_factory=list)
    sys_safety_mutable: list = field(default_factory=list)
    sys_safety_hard: list = field(default_factory=list)
    env_liveness: list = field(default_factory=list)
    sys_liveness: list = field(default_factory=list)

    @property
    def env_safety(self):
        return list(self.env_safety_mutable) + list(self.env_safety_hard)

    @property
    def sys_safety(self):
        return list(self.sys_safety_mutable) + list(self.sys_safety_hard)
