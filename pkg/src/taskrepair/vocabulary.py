"""Proposition vocabulary, slices, and symbolic state helpers.

A symbolic state is a frozenset of proposition names drawn from one slice of
the vocabulary.  The vocabulary fixes a canonical order (world inputs, then
user inputs, then outputs); all state enumeration and printing follows that
order, which keeps every downstream computation deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapacityError, SpecValidationError

State = frozenset

EMPTY_STATE: State = frozenset()


@dataclass(frozen=True)
class Vocabulary:
    """Declared propositions, partitioned into world inputs, user inputs, outputs."""

    world_inputs: tuple
    user_inputs: tuple
    outputs: tuple
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        world = tuple(self.world_inputs)
        user = tuple(self.user_inputs)
        outs = tuple(self.outputs)
        object.__setattr__(self, "world_inputs", world)
        object.__setattr__(self, "user_inputs", user)
        object.__setattr__(self, "outputs", outs)
        names = world + user + outs
        if len(set(names)) != len(names):
            raise SpecValidationError(
                "vocabulary lists must be pairwise disjoint with no duplicates"
            )
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def inputs(self):
        return self.world_inputs + self.user_inputs

    @property
    def all_props(self):
        return self.world_inputs + self.user_inputs + self.outputs

    def __contains__(self, name):
        return name in self._index

    def index(self, name):
        return self._index[name]

    def slice(self, kind):
        """Return the named slice as an ordered tuple of propositions."""
        if kind == "world":
            return self.world_inputs
        if kind == "user":
            return self.user_inputs
        if kind == "inputs":
            return self.inputs
        if kind == "outputs":
            return self.outputs
        if kind == "all":
            return self.all_props
        raise ValueError(f"unknown vocabulary slice: {kind!r}")

    def sort_props(self, props):
        """Sort proposition names into canonical vocabulary order."""
        return sorted(props, key=self._index.__getitem__)

    def state_key(self, state):
        """Canonical sort key for a symbolic state (index tuple)."""
        return tuple(sorted(self._index[p] for p in state))

    def sort_states(self, states):
        return sorted(states, key=self.state_key)

    def format_state(self, state):
        return "{" + ",".join(self.sort_props(state)) + "}"


def check_state(state, slice_props, what="state"):
    """Verify every member of ``state`` is declared in the slice."""
    allowed = set(slice_props)
    for p in state:
        if p not in allowed:
            raise SpecValidationError(f"{what} contains undeclared proposition {p!r}")
    return frozenset(state)


def enumerate_states(slice_props, bound=None):
    """All symbolic states over a slice, in canonical (bitmask) order.

    Bit i of the mask corresponds to slice_props[i]; masks count upward, so
    the empty state comes first and the full state last.
    """
    n = len(slice_props)
    if bound is not None and (1 << n) > bound:
        raise CapacityError(
            f"enumerating 2^{n} states over {slice_props} exceeds bound {bound}"
        )
    states = []
    for mask in range(1 << n):
        states.append(frozenset(p for i, p in enumerate(slice_props) if mask & (1 << i)))
    return states


def state_to_mask(state, slice_props):
    mask = 0
    for i, p in enumerate(slice_props):
        if p in state:
            mask |= 1 << i
    return mask


def mask_to_state(mask, slice_props):
    return frozenset(p for i, p in enumerate(slice_props) if mask & (1 << i))


def project(state, slice_props):
    """Restrict a state to the propositions of a slice."""
    keep = set(slice_props)
    return frozenset(p for p in state if p in keep)
