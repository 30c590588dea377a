"""Shared generators for the game-solver tests."""

import random

from taskrepair.formulas import And, Not, Or, Prop
from taskrepair.game import GameStructure
from taskrepair.relations import TransitionRelation
from taskrepair.vocabulary import Vocabulary, enumerate_states


def random_game(seed, n_world=None, n_out=None):
    """Random explicit game with up to 4 world inputs and 2 outputs."""
    rng = random.Random(seed)
    n_world = n_world or rng.randint(1, 4)
    n_out = n_out or rng.randint(1, 2)
    world = tuple(f"w{i}" for i in range(n_world))
    outs = tuple(f"o{i}" for i in range(n_out))
    vocab = Vocabulary(world, (), outs)
    all_states = enumerate_states(vocab.all_props)
    in_states = enumerate_states(vocab.inputs)

    env_pairs = [
        (a, b) for a in all_states for b in in_states if rng.random() < 0.35
    ]
    sys_pairs = [
        (a, b) for a in all_states for b in all_states if rng.random() < 0.3
    ]

    def random_bool_formula():
        atoms = [Prop(p) for p in vocab.all_props]
        f = rng.choice(atoms)
        for _ in range(rng.randint(0, 2)):
            g = rng.choice(atoms)
            if rng.random() < 0.4:
                g = Not(g)
            f = And(f, g) if rng.random() < 0.5 else Or(f, g)
        return f

    goals = [random_bool_formula() for _ in range(rng.randint(1, 2))]
    init = frozenset(s for s in all_states if rng.random() < 0.2)
    return GameStructure(
        vocab=vocab,
        theta_init=init,
        tau_env=TransitionRelation(env_pairs, vocab.all_props, vocab.inputs),
        tau_sys=TransitionRelation(sys_pairs, vocab.all_props, vocab.all_props),
        sys_liveness=goals,
    )
