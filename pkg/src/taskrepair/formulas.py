"""Temporal-logic formula AST and canonical printing.

The fragment covers Boolean connectives, next (X), always (G), eventually (F)
and until (U).  Priming a proposition is represented as Next applied to an
atom; the printer and parser round-trip structurally identical trees.
"""

from __future__ import annotations


class Formula:
    """Base class; subclasses are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return print_formula(self)

    def __repr__(self):
        return f"{type(self).__name__}({print_formula(self)!r})"


class TrueF(Formula):
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, TrueF)

    def __hash__(self):
        return hash("TrueF")


class FalseF(Formula):
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, FalseF)

    def __hash__(self):
        return hash("FalseF")


class Prop(Formula):
    __slots__ = ("name",)

    def __init__(self, name):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("Prop is immutable")

    def __eq__(self, other):
        return isinstance(other, Prop) and self.name == other.name

    def __hash__(self):
        return hash(("Prop", self.name))


class _Unary(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("formula nodes are immutable")

    def __eq__(self, other):
        return type(other) is type(self) and self.arg == other.arg

    def __hash__(self):
        return hash((type(self).__name__, self.arg))


class Not(_Unary):
    __slots__ = ()


class Next(_Unary):
    __slots__ = ()


class Always(_Unary):
    __slots__ = ()


class Eventually(_Unary):
    __slots__ = ()


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __setattr__(self, *a):
        raise AttributeError("formula nodes are immutable")

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.left == other.left
            and self.right == other.right
        )

    def __hash__(self):
        return hash((type(self).__name__, self.left, self.right))


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Implies(_Binary):
    __slots__ = ()


class Iff(_Binary):
    __slots__ = ()


class Until(_Binary):
    __slots__ = ()


TRUE = TrueF()
FALSE = FalseF()


def conj(parts):
    """Left-associated conjunction of an iterable; TRUE when empty."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    """Left-associated disjunction of an iterable; FALSE when empty."""
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# Printer precedence, lowest binds loosest.
_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_UNTIL = 4
_PREC_AND = 5
_PREC_UNARY = 6
_PREC_ATOM = 7


def _prec(f):
    if isinstance(f, Iff):
        return _PREC_IFF
    if isinstance(f, Implies):
        return _PREC_IMPLIES
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, Until):
        return _PREC_UNTIL
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Not, Next, Always, Eventually)):
        return _PREC_UNARY
    return _PREC_ATOM


def print_formula(f):
    """Canonical concrete syntax; parse(print(f)) is structurally f."""
    return _print(f, 0)


def _print(f, parent_prec):
    p = _prec(f)
    if isinstance(f, TrueF):
        s = "true"
    elif isinstance(f, FalseF):
        s = "false"
    elif isinstance(f, Prop):
        s = f.name
    elif isinstance(f, Not):
        s = "!" + _print(f.arg, _PREC_UNARY)
    elif isinstance(f, Next):
        s = "X(" + _print(f.arg, 0) + ")"
    elif isinstance(f, Always):
        s = "G(" + _print(f.arg, 0) + ")"
    elif isinstance(f, Eventually):
        s = "F(" + _print(f.arg, 0) + ")"
    elif isinstance(f, And):
        # left-associated chains print flat
        s = _print(f.left, _PREC_AND) + " & " + _print(f.right, _PREC_AND + 1)
    elif isinstance(f, Or):
        s = _print(f.left, _PREC_OR) + " | " + _print(f.right, _PREC_OR + 1)
    elif isinstance(f, Until):
        # right-associative
        s = _print(f.left, _PREC_UNTIL + 1) + " U " + _print(f.right, _PREC_UNTIL)
    elif isinstance(f, Implies):
        s = _print(f.left, _PREC_IMPLIES + 1) + " -> " + _print(f.right, _PREC_IMPLIES)
    elif isinstance(f, Iff):
        s = _print(f.left, _PREC_IFF + 1) + " <-> " + _print(f.right, _PREC_IFF)
    else:
        raise TypeError(f"unknown formula node: {f!r}")
    if p < parent_prec:
        return "(" + s + ")"
    return s


def atoms_of(f):
    """Set of (name, primed) pairs appearing in a formula."""
    out = set()

    def walk(g, primed):
        if isinstance(g, Prop):
            out.add((g.name, primed))
        elif isinstance(g, Not):
            walk(g.arg, primed)
        elif isinstance(g, Next):
            walk(g.arg, True)
        elif isinstance(g, (Always, Eventually)):
            walk(g.arg, primed)
        elif isinstance(g, _Binary):
            walk(g.left, primed)
            walk(g.right, primed)

    walk(f, False)
    return out


def _boolean_over_atoms(g, under_next=False):
    if isinstance(g, (TrueF, FalseF, Prop)):
        return True
    if isinstance(g, Not):
        return _boolean_over_atoms(g.arg, under_next)
    if isinstance(g, Next):
        if under_next:
            return False
        return _boolean_over_atoms(g.arg, True)
    if isinstance(g, (And, Or, Implies, Iff)):
        return _boolean_over_atoms(g.left, under_next) and _boolean_over_atoms(
            g.right, under_next
        )
    return False


def safety_body(f):
    """Strip Always operators, returning the step body; None if not safety.

    Accepts a Boolean combination of atoms and next-atoms, optionally under
    one Always, or a conjunction of such formulas (G(a) & G(b) behaves as
    G(a & b)).  Anything else is not safety-fragment.
    """
    if isinstance(f, Always):
        return safety_body(f.arg)
    if isinstance(f, And):
        left = safety_body(f.left)
        right = safety_body(f.right)
        if left is None or right is None:
            return None
        return And(left, right)
    if _boolean_over_atoms(f):
        return f
    return None


def is_boolean(f):
    """True when the formula has no temporal operators at all."""
    if isinstance(f, (TrueF, FalseF, Prop)):
        return True
    if isinstance(f, Not):
        return is_boolean(f.arg)
    if isinstance(f, (Next, Always, Eventually, Until)):
        return False
    if isinstance(f, _Binary):
        return is_boolean(f.left) and is_boolean(f.right)
    return False
