"""Evaluation of formulas over symbolic states and step pairs.

Two evaluators are provided on purpose: a direct recursive walk over the AST
(`eval_step`, `eval_bool`) and a compiler to bitmask lambdas used by the bulk
relation builder.  The recursive walk doubles as an independent cross-check
for the compiled path in tests.
"""

from __future__ import annotations

from .errors import NonSafetyFormulaError
from .formulas import (
    Always,
    And,
    Eventually,
    FalseF,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    TrueF,
    Until,
    conj,
    safety_body,
)
from .vocabulary import state_to_mask


def state_literals(state, slice_props):
    """Literals of a state formula: members positively, the rest negated."""
    positives = [Prop(p) for p in slice_props if p in state]
    negatives = [Not(Prop(p)) for p in slice_props if p not in state]
    return positives + negatives


def state_formula(state, slice_props):
    """Full conjunction for a state over a slice, in canonical order."""
    return conj(state_literals(state, slice_props))


def eval_bool(f, state):
    """Evaluate a Boolean (temporal-operator-free) formula over one state."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Prop):
        return f.name in state
    if isinstance(f, Not):
        return not eval_bool(f.arg, state)
    if isinstance(f, And):
        return eval_bool(f.left, state) and eval_bool(f.right, state)
    if isinstance(f, Or):
        return eval_bool(f.left, state) or eval_bool(f.right, state)
    if isinstance(f, Implies):
        return (not eval_bool(f.left, state)) or eval_bool(f.right, state)
    if isinstance(f, Iff):
        return eval_bool(f.left, state) == eval_bool(f.right, state)
    raise NonSafetyFormulaError(f"not a Boolean formula: {f}")


def eval_step(f, now, nxt):
    """Evaluate a safety-fragment formula over one step.

    Unprimed atoms read from ``now``, primed atoms (under Next) from ``nxt``.
    The formula may carry one outermost Always, which is ignored; any other
    temporal operator is rejected.
    """
    body = safety_body(f)
    if body is None:
        raise NonSafetyFormulaError(f"not a safety-fragment formula: {f}")
    return _eval_body(body, now, nxt, False)


def _eval_body(f, now, nxt, primed):
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Prop):
        return f.name in (nxt if primed else now)
    if isinstance(f, Not):
        return not _eval_body(f.arg, now, nxt, primed)
    if isinstance(f, Next):
        return _eval_body(f.arg, now, nxt, True)
    if isinstance(f, And):
        return _eval_body(f.left, now, nxt, primed) and _eval_body(f.right, now, nxt, primed)
    if isinstance(f, Or):
        return _eval_body(f.left, now, nxt, primed) or _eval_body(f.right, now, nxt, primed)
    if isinstance(f, Implies):
        return (not _eval_body(f.left, now, nxt, primed)) or _eval_body(
            f.right, now, nxt, primed
        )
    if isinstance(f, Iff):
        return _eval_body(f.left, now, nxt, primed) == _eval_body(f.right, now, nxt, primed)
    if isinstance(f, (Always, Eventually, Until)):
        raise NonSafetyFormulaError(f"nested temporal operator in safety body: {f}")
    raise TypeError(f"unknown formula node: {f!r}")


def compile_step(f, now_props, next_props):
    """Compile a safety-fragment formula to fn(now_mask, next_mask) -> bool.

    now_props / next_props fix the bit layout of the two masks.  Atoms absent
    from the respective slice evaluate to False, mirroring set semantics.
    """
    body = safety_body(f)
    if body is None:
        raise NonSafetyFormulaError(f"not a safety-fragment formula: {f}")
    now_bit = {p: 1 << i for i, p in enumerate(now_props)}
    next_bit = {p: 1 << i for i, p in enumerate(next_props)}

    def emit(g, primed):
        if isinstance(g, TrueF):
            return "True"
        if isinstance(g, FalseF):
            return "False"
        if isinstance(g, Prop):
            bits = next_bit if primed else now_bit
            var = "x" if primed else "n"
            if g.name not in bits:
                return "False"
            return f"(({var}&{bits[g.name]})!=0)"
        if isinstance(g, Not):
            return f"(not {emit(g.arg, primed)})"
        if isinstance(g, Next):
            return emit(g.arg, True)
        if isinstance(g, And):
            return f"({emit(g.left, primed)} and {emit(g.right, primed)})"
        if isinstance(g, Or):
            return f"({emit(g.left, primed)} or {emit(g.right, primed)})"
        if isinstance(g, Implies):
            return f"((not {emit(g.left, primed)}) or {emit(g.right, primed)})"
        if isinstance(g, Iff):
            return f"({emit(g.left, primed)} == {emit(g.right, primed)})"
        raise NonSafetyFormulaError(f"nested temporal operator: {g}")

    src = f"lambda n, x: {emit(body, False)}"
    return eval(src, {}, {})  # noqa: S307 - source is generated locally


def compile_bool(f, props):
    """Compile a Boolean formula to fn(mask) -> bool over the given layout."""
    step = compile_step(f, props, ())
    return lambda m: step(m, 0)


def holds_in(f, state, slice_props):
    """Convenience: Boolean formula evaluated over an explicit state."""
    del slice_props  # set semantics make the layout irrelevant here
    return eval_bool(f, state)


def mask_of(state, props):
    return state_to_mask(state, props)
