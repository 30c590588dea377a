"""Two-player game structure, winning-set fixed point, strategy extraction.

The environment moves first, choosing a next input state consistent with the
environment transition relation; the system replies with a next output such
that the combined next state is consistent with the system relation.  States
with no legal environment move are winning for the system (the assumptions
are falsified there); states with no system reply to some environment move
are losing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NonSafetyFormulaError, UnrealizableError
from .formulas import TRUE, TrueF, is_boolean
from .gr1 import GR1Spec
from .relations import TransitionRelation, relation_of
from .semantics import compile_bool, eval_bool
from .vocabulary import Vocabulary, mask_to_state, state_to_mask


@dataclass
class GameStructure:
    vocab: Vocabulary
    theta_init: frozenset  # set of states over all props
    tau_env: TransitionRelation  # all props -> inputs'
    tau_sys: TransitionRelation  # all props -> all props'
    env_liveness: list = field(default_factory=list)
    sys_liveness: list = field(default_factory=list)


@dataclass
class WinningSet:
    states: frozenset  # converged winning states over all props
    per_liveness: dict  # goal index -> repair-facing attractor states


@dataclass
class Strategy:
    """Deterministic system strategy with liveness-index memory."""

    initial: frozenset
    initial_goal: int
    moves: dict  # (state, next_input_state, goal_index) -> next output state
    goal_after: dict  # (state, goal_index) -> goal index used when moving
    game: GameStructure = None

    def next_state(self, state, env_choice, goal):
        goal2 = self.goal_after[(state, goal)]
        out = self.moves[(state, env_choice, goal2)]
        return frozenset(env_choice | out), goal2


def build_game(spec: GR1Spec, vocab: Vocabulary, bound=None) -> GameStructure:
    """Construct the explicit game for a specification.

    theta_init holds the states satisfying both initial formulas; the two
    transition relations come from the conjunction of all (mutable and hard)
    safety formulas on each side.
    """
    for f in (spec.env_init, spec.sys_init):
        if not is_boolean(f):
            raise NonSafetyFormulaError(f"initial condition must be Boolean: {f}")
    for j in spec.env_liveness + spec.sys_liveness:
        if not is_boolean(j):
            raise NonSafetyFormulaError(f"liveness must be Boolean: {j}")

    kwargs = {} if bound is None else {"bound": bound}
    tau_env = relation_of(spec.env_safety or [TRUE], vocab, "all", "inputs", **kwargs)
    tau_sys = relation_of(spec.sys_safety or [TRUE], vocab, "all", "all", **kwargs)

    all_props = vocab.all_props
    init = []
    init_fn_e = compile_bool(spec.env_init, all_props)
    init_fn_s = compile_bool(spec.sys_init, all_props)
    for m in range(1 << len(all_props)):
        if init_fn_e(m) and init_fn_s(m):
            init.append(mask_to_state(m, all_props))
    return GameStructure(
        vocab=vocab,
        theta_init=frozenset(init),
        tau_env=tau_env,
        tau_sys=tau_sys,
        env_liveness=list(spec.env_liveness),
        sys_liveness=list(spec.sys_liveness),
    )


class _MaskGame:
    """Bitmask view of a game for the fixed-point computations."""

    def __init__(self, game: GameStructure):
        self.vocab = game.vocab
        self.all_props = game.vocab.all_props
        self.in_props = game.vocab.inputs
        self.n = len(self.all_props)
        self.n_in = len(self.in_props)
        self.states = range(1 << self.n)

        env_succ = {m: [] for m in self.states}
        for a, b in game.tau_env.pairs:
            env_succ[state_to_mask(a, self.all_props)].append(
                state_to_mask(b, self.in_props)
            )
        self.env_succ = {m: sorted(v) for m, v in env_succ.items()}

        # completions keyed by (state, next input mask) -> full next masks
        sys_succ = {}
        for a, b in game.tau_sys.pairs:
            am = state_to_mask(a, self.all_props)
            bm = state_to_mask(b, self.all_props)
            bin_ = state_to_mask(b, self.in_props)
            sys_succ.setdefault((am, bin_), []).append(bm)
        self.sys_succ = {k: sorted(v) for k, v in sys_succ.items()}

        goals = game.sys_liveness or [TRUE]
        self.goal_fns = [compile_bool(j, self.all_props) for j in goals]
        self.n_goals = len(self.goal_fns)

        for j in game.env_liveness:
            if not isinstance(j, TrueF):
                raise NonSafetyFormulaError(
                    "non-trivial environment liveness is declared but not solved; "
                    "drop it or reduce it to true"
                )

        self.init_masks = sorted(
            state_to_mask(s, self.all_props) for s in game.theta_init
        )

    def completions(self, m, ib):
        return self.sys_succ.get((m, ib), ())

    def cox(self, target, strict):
        """Controllable predecessor of a target set.

        With strict=False, states without any environment move are included
        (the system wins by falsifying the assumptions there); with
        strict=True they are excluded, as are their vacuous descendants.
        """
        out = set()
        for m in self.states:
            choices = self.env_succ[m]
            if not choices:
                if not strict:
                    out.add(m)
                continue
            ok = True
            for ib in choices:
                if not any(s in target for s in self.completions(m, ib)):
                    ok = False
                    break
            if ok:
                out.add(m)
        return out

    def attractor(self, goal_fn, continuation, strict):
        """Least fixed point toward goal states that can continue.

        Returns (set, layers): layers[0] is the goal layer (goal states able
        to force back into ``continuation``), each later layer the states
        that can force into the union of earlier ones.
        """
        cont_cox = self.cox(continuation, strict)
        goal_layer = {m for m in cont_cox if goal_fn(m)}
        layers = [goal_layer]
        reached = set(goal_layer)
        while True:
            nxt = self.cox(reached, strict) - reached
            if not nxt:
                break
            layers.append(nxt)
            reached |= nxt
        return reached, layers

    def solve(self):
        """Greatest fixed point over all system liveness goals."""
        z = set(self.states)
        layers_per_goal = None
        while True:
            ys = []
            layers_per_goal = []
            for fn in self.goal_fns:
                y, layers = self.attractor(fn, z, strict=False)
                ys.append(y)
                layers_per_goal.append(layers)
            new_z = set.intersection(*ys) if ys else set(self.states)
            if new_z == z:
                return z, layers_per_goal
            z = new_z

    def repair_attractor(self, goal_index):
        """Repair-facing per-goal attractor.

        One-shot reachability of the goal with strict controllable
        predecessors: assumption-falsifying dead ends do not count as
        progress when looking for skills to modify.
        """
        y, _ = self.attractor(
            self.goal_fns[goal_index], set(self.states), strict=True
        )
        return y


def compute_winning_states(game: GameStructure) -> WinningSet:
    mg = _MaskGame(game)
    z, _ = mg.solve()
    per = {}
    for j in range(mg.n_goals):
        per[j] = frozenset(
            mask_to_state(m, mg.all_props) for m in mg.repair_attractor(j)
        )
    states = frozenset(mask_to_state(m, mg.all_props) for m in z)
    return WinningSet(states=states, per_liveness=per)


def _initial_ok(mg, winning_masks):
    """Every environment initial choice has a winning system completion."""
    by_input = {}
    for m in mg.init_masks:
        by_input.setdefault(m & ((1 << mg.n_in) - 1), []).append(m)
    for _, group in sorted(by_input.items()):
        if not any(m in winning_masks for m in group):
            return False
    return True


def is_realizable(game: GameStructure) -> bool:
    mg = _MaskGame(game)
    if not mg.init_masks:
        return False
    z, _ = mg.solve()
    return _initial_ok(mg, z)


def blocked_liveness(game: GameStructure, winning: WinningSet):
    """First liveness goal (declaration order) whose repair attractor
    excludes some required initial state; None if all pass."""
    mg = _MaskGame(game)
    for j in range(mg.n_goals):
        masks = {
            state_to_mask(s, mg.all_props) for s in winning.per_liveness[j]
        }
        if not _initial_ok(mg, masks):
            return j
    return None


def extract_strategy(game: GameStructure) -> Strategy:
    """Deterministic strategy; ties broken by canonical state order.

    Memory is the index of the liveness goal currently pursued.  When the
    current goal holds at a state the index advances before moving.
    """
    mg = _MaskGame(game)
    z, _ = mg.solve()
    if not mg.init_masks or not _initial_ok(mg, z):
        raise UnrealizableError("cannot extract a strategy from an unrealizable game")

    # per-goal attractor layers restricted to the winning set
    rank = []  # goal -> {mask: layer index}
    for fn in mg.goal_fns:
        cont = mg.cox(z, strict=False)
        goal_layer = {m for m in z if fn(m) and m in cont}
        ranks = {m: 0 for m in goal_layer}
        frontier = set(goal_layer)
        k = 0
        while True:
            k += 1
            new = {m for m in (mg.cox(frontier, strict=False) & z) if m not in ranks}
            if not new:
                break
            for m in new:
                ranks[m] = k
            frontier |= new
        rank.append(ranks)

    all_props = mg.all_props
    in_props = mg.in_props

    def advance(m, j):
        if mg.goal_fns[j](m):
            return (j + 1) % mg.n_goals
        return j

    # choose initial: smallest winning completion of the smallest env choice
    init_in = {}
    for m in mg.init_masks:
        init_in.setdefault(m & ((1 << mg.n_in) - 1), []).append(m)
    first_group = init_in[min(init_in)]
    initial_mask = min(m for m in first_group if m in z)

    moves = {}
    goal_after = {}
    seen = set()
    stack = [(initial_mask, 0)]
    while stack:
        m, j = stack.pop()
        if (m, j) in seen:
            continue
        seen.add((m, j))
        j2 = advance(m, j)
        goal_after[
            (mask_to_state(m, all_props), j)
        ] = j2
        ranks = rank[j2]
        for ib in mg.env_succ[m]:
            best = None
            for s in mg.completions(m, ib):
                if s not in z:
                    continue
                key = (ranks.get(s, len(ranks) + 1), s)
                if best is None or key < best[0]:
                    best = (key, s)
            if best is None:
                raise UnrealizableError(
                    "winning set admits no completion; solver invariant broken"
                )
            s = best[1]
            state = mask_to_state(m, all_props)
            env_state = mask_to_state(ib, in_props)
            out_state = frozenset(
                p for p in mask_to_state(s, all_props) if p in set(mg.vocab.outputs)
            )
            moves[(state, env_state, j2)] = out_state
            stack.append((s, j2))

    return Strategy(
        initial=mask_to_state(initial_mask, all_props),
        initial_goal=0,
        moves=moves,
        goal_after=goal_after,
        game=game,
    )


def strategy_states(strategy: Strategy):
    """All states reachable under the strategy, with their goal memory."""
    return sorted(
        {(s, j) for (s, _e, j) in strategy.moves},
        key=lambda sj: (sorted(sj[0]), sj[1]),
    )
