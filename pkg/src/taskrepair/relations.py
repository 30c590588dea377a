"""Transition relations as explicit sets of symbolic state pairs."""

from __future__ import annotations

from .errors import CapacityError
from .formulas import conj
from .semantics import compile_step
from .vocabulary import Vocabulary, enumerate_states, mask_to_state, state_to_mask

DEFAULT_PAIR_BOUND = 1 << 20


class TransitionRelation:
    """A set of (state, next_state) pairs over declared domain/codomain slices.

    Pairs are frozensets of proposition names.  Iteration is always in
    canonical bitmask order so identical relations enumerate identically
    across runs.
    """

    __slots__ = ("pairs", "domain_slice", "codomain_slice")

    def __init__(self, pairs, domain_slice, codomain_slice, validate=False):
        self.domain_slice = tuple(domain_slice)
        self.codomain_slice = tuple(codomain_slice)
        self.pairs = frozenset((frozenset(a), frozenset(b)) for a, b in pairs)
        if validate:
            dom = set(self.domain_slice)
            cod = set(self.codomain_slice)
            for a, b in self.pairs:
                if not a <= dom or not b <= cod:
                    raise ValueError("pair does not respect declared slices")

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        a, b = pair
        return (frozenset(a), frozenset(b)) in self.pairs

    def __eq__(self, other):
        return (
            isinstance(other, TransitionRelation)
            and self.domain_slice == other.domain_slice
            and self.codomain_slice == other.codomain_slice
            and self.pairs == other.pairs
        )

    def __hash__(self):
        return hash((self.domain_slice, self.codomain_slice, self.pairs))

    def __iter__(self):
        """Canonical deterministic iteration order."""
        dom, cod = self.domain_slice, self.codomain_slice
        return iter(
            sorted(
                self.pairs,
                key=lambda ab: (state_to_mask(ab[0], dom), state_to_mask(ab[1], cod)),
            )
        )

    def _like(self, pairs):
        return TransitionRelation(pairs, self.domain_slice, self.codomain_slice)

    def union(self, other):
        return self._like(self.pairs | self._coerce(other))

    def intersection(self, other):
        return self._like(self.pairs & self._coerce(other))

    def difference(self, other):
        return self._like(self.pairs - self._coerce(other))

    def _coerce(self, other):
        if isinstance(other, TransitionRelation):
            return other.pairs
        return frozenset((frozenset(a), frozenset(b)) for a, b in other)

    def sources(self):
        return {a for a, _ in self.pairs}

    def successors(self, state):
        s = frozenset(state)
        return {b for a, b in self.pairs if a == s}

    def predecessors(self, state):
        s = frozenset(state)
        return {a for a, b in self.pairs if b == s}

    def __repr__(self):
        return (
            f"TransitionRelation(|pairs|={len(self.pairs)}, "
            f"domain={self.domain_slice}, codomain={self.codomain_slice})"
        )


def relation_of(
    formulas,
    vocab: Vocabulary,
    domain_slice,
    codomain_slice,
    bound=DEFAULT_PAIR_BOUND,
):
    """Enumerate all state pairs over the slices satisfying the formula(s).

    ``formulas`` may be a single formula or an iterable; conjunction applies.
    Refuses enumerations larger than ``bound`` pairs with a CapacityError.
    """
    if isinstance(domain_slice, str):
        domain_slice = vocab.slice(domain_slice)
    if isinstance(codomain_slice, str):
        codomain_slice = vocab.slice(codomain_slice)
    domain_slice = tuple(domain_slice)
    codomain_slice = tuple(codomain_slice)
    try:
        iter(formulas)
        f = conj(formulas)
    except TypeError:
        f = formulas

    n_dom, n_cod = len(domain_slice), len(codomain_slice)
    total = (1 << n_dom) * (1 << n_cod)
    if total > bound:
        raise CapacityError(
            f"relation enumeration of {total} pairs exceeds bound {bound}"
        )

    fn = compile_step(f, domain_slice, codomain_slice)
    pairs = []
    for a in range(1 << n_dom):
        for b in range(1 << n_cod):
            if fn(a, b):
                pairs.append(
                    (mask_to_state(a, domain_slice), mask_to_state(b, codomain_slice))
                )
    return TransitionRelation(pairs, domain_slice, codomain_slice)


def full_relation(vocab, domain_slice, codomain_slice, bound=DEFAULT_PAIR_BOUND):
    if isinstance(domain_slice, str):
        domain_slice = vocab.slice(domain_slice)
    if isinstance(codomain_slice, str):
        codomain_slice = vocab.slice(codomain_slice)
    total = (1 << len(domain_slice)) * (1 << len(codomain_slice))
    if total > bound:
        raise CapacityError(f"full relation of {total} pairs exceeds bound {bound}")
    pairs = [
        (a, b)
        for a in enumerate_states(domain_slice)
        for b in enumerate_states(codomain_slice)
    ]
    return TransitionRelation(pairs, domain_slice, codomain_slice)
