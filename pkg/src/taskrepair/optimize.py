"""Gradient re-optimization of controller weights against a chain constraint.

The loss trades a differentiable robustness surrogate of the chain constraint
against mean-squared deviation from the base controller's rollouts, with the
constraint term weighted 50:1 by default.  Both terms are normalized to
per-timestep means before weighting.  Cell membership is scored by signed
distance to the region boundaries, smoothed with log-sum-exp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dmp import DmpSkillController
from .errors import TaskRepairError
from .grounding import Grounding

LTL_WEIGHT = 50.0
EPOCHS = 100
STEP_SIZE = 1e-2
GRAD_CLIP = 10.0
SMOOTH_BETA = 10.0
ROBUSTNESS_MARGIN = 0.05


@dataclass
class OptimizeConfig:
    ltl_weight: float = LTL_WEIGHT
    epochs: int = EPOCHS
    step_size: float = STEP_SIZE
    grad_clip: float = GRAD_CLIP
    beta: float = SMOOTH_BETA
    margin: float = ROBUSTNESS_MARGIN
    batch: int = 20
    validation: int = 32
    seed: int = 0


def _smooth_max(values, beta, axis):
    m = np.max(values, axis=axis, keepdims=True)
    out = m.squeeze(axis) + np.log(
        np.sum(np.exp(beta * (values - m)), axis=axis)
    ) / beta
    return out


def _smooth_min(values, beta, axis):
    return -_smooth_max(-values, beta, axis)


def _softplus(x, beta):
    # numerically stable softplus(beta*x)/beta
    z = beta * x
    return np.where(z > 30, x, np.log1p(np.exp(np.clip(z, -30, 30))) / beta)


class _RobustnessModel:
    """Vectorized robustness of the chain constraint over rollout stacks."""

    def __init__(self, constraint, grounding: Grounding, beta, margin=ROBUSTNESS_MARGIN):
        self.beta = beta
        self.margin = margin
        self.grounding = grounding
        world = sorted(grounding.regions)
        self.world = world
        states = sorted(constraint.unique_states, key=sorted)
        self.states = states
        self.signs = np.array(
            [[1.0 if p in s else -1.0 for p in world] for s in states]
        )  # (S, P)
        self.implications = [
            (states.index(pre), [states.index(a) for a in sorted(allowed, key=sorted)])
            for pre, allowed in constraint.implications
        ]

    def state_margins(self, points):
        """(..., S) smooth membership margin of each chain state."""
        beta = self.beta
        prop_margins = np.stack(
            [self.grounding.regions[p].margin_many(points) for p in self.world],
            axis=-1,
        )  # (..., P)
        signed = prop_margins[..., None, :] * self.signs  # (..., S, P)
        return _smooth_min(signed, beta, axis=-1)

    def violation(self, points):
        """Constraint violation of rollouts shaped (..., T, d).

        Each conjunct scores as the smoothed minimum over time of its step
        robustness (one grazed step dominates, as in the exact semantics);
        conjuncts average so the scale is independent of chain length.
        """
        beta = self.beta
        m = self.state_margins(points)  # (..., T, S)
        glob = _smooth_max(m, beta, axis=-1)  # (..., T)
        losses = _softplus(self.margin - glob.min(axis=-1), beta)
        for pre_i, allowed_i in self.implications:
            pre_now = m[..., :-1, pre_i]
            best_next = _smooth_max(m[..., 1:, allowed_i], beta, axis=-1)
            rob = _smooth_max(
                np.stack([-pre_now, best_next], axis=-1), beta, axis=-1
            )
            losses = losses + _softplus(self.margin - rob.min(axis=-1), beta)
        return losses / (1 + len(self.implications))


def _region_center(grounding, state):
    """Midpoint of the bounding-box intersection of a state's regions."""
    los, his = [], []
    for p in sorted(state):
        r = grounding.regions[p]
        if hasattr(r, "lo"):
            los.append(np.asarray(r.lo))
            his.append(np.asarray(r.hi))
        else:
            c = np.asarray(r.center_)
            los.append(c - r.radius)
            his.append(c + r.radius)
    if not los:
        los = [np.asarray(grounding.workspace.lo)]
        his = [np.asarray(grounding.workspace.hi)]
    lo = np.max(np.stack(los), axis=0)
    hi = np.min(np.stack(his), axis=0)
    return (lo + hi) / 2.0


def _chain_polyline(constraint, grounding, timesteps):
    """Cell-center waypoint path through the chain, start to a final state."""
    succ = {pre: sorted(allowed - {pre}, key=sorted) for pre, allowed in constraint.implications}
    state = min(constraint.initial_states, key=sorted)
    order = [state]
    seen = {state}
    while state not in constraint.final_states:
        nxts = [s for s in succ.get(state, []) if s not in seen]
        if not nxts:
            break
        state = nxts[0]
        order.append(state)
        seen.add(state)
    pts = np.array([_region_center(grounding, s) for s in order])
    if len(pts) < 2:
        return None
    seg = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    if seg[-1] <= 0:
        return None
    t = np.linspace(0.0, seg[-1], timesteps)
    return np.stack(
        [np.interp(t, seg, pts[:, d]) for d in range(pts.shape[1])], axis=1
    )


def repair_trajectory(
    base: DmpSkillController,
    constraint,
    grounding: Grounding,
    config: OptimizeConfig = None,
    sampler=None,
) -> DmpSkillController:
    """Re-optimize weights so rollouts satisfy the chain constraint.

    ``sampler`` yields (start, goal) pairs from the chain's endpoint
    groundings; by default endpoints are sampled from the interiors of the
    constraint's initial and final states.  The search starts from a warm
    deviation toward the chain's cell-center polyline, which selects the
    suggested corridor among the loss basins.
    """
    config = config or OptimizeConfig()
    if sampler is None:
        from .feasibility import endpoint_sampler

        sampler = endpoint_sampler(constraint, grounding, seed=config.seed)
    pairs = [sampler() for _ in range(config.batch)]
    starts = np.array([p[0] for p in pairs])
    goals = np.array([p[1] for p in pairs])
    val_pairs = [sampler() for _ in range(config.validation)]
    val_starts = np.array([p[0] for p in val_pairs])
    val_goals = np.array([p[1] for p in val_pairs])

    base_paths = _rollout_affine(base, starts, goals, base.weights[None])[0]
    model = _RobustnessModel(constraint, grounding, config.beta, config.margin)

    # Whitened, endpoint-preserving parameterization: column-scale the basis
    # response so steps act in workspace units, then optimize inside the null
    # space of its final row -- every candidate keeps the rollout endpoint,
    # so goal convergence survives the re-optimization.
    response = base.basis_response()  # (T, n)
    colscale = np.maximum(np.abs(response).max(axis=0), 1e-9)  # (n,)
    scaled = response / colscale[None, :]
    end_row = scaled[-1]
    _u_svd, _s, vt = np.linalg.svd(end_row[None, :], full_matrices=True)
    null_basis = vt[1:].T  # (n, n-1)

    extent = float(
        np.max(np.asarray(grounding.workspace.hi) - np.asarray(grounding.workspace.lo))
    )
    lr = config.step_size * extent
    eps = 1e-3

    u = np.zeros((null_basis.shape[1], base.dims))
    reduced = scaled @ null_basis  # (T, n-1): deviation per unit parameter
    polyline = _chain_polyline(constraint, grounding, base.timesteps)
    warm = None
    if polyline is not None and config.ltl_weight > 0:
        start_c, goal_c = polyline[0], polyline[-1]
        nominal = _rollout_affine(base, [start_c], [goal_c], base.weights[None])[0, 0]
        target = polyline - nominal  # (T, d)
        # rcond keeps the warm start off near-dead response directions
        warm, *_ = np.linalg.lstsq(reduced, target, rcond=1e-2)
    n_params = u.size
    m_adam = np.zeros(n_params)
    v_adam = np.zeros(n_params)

    def to_weights(u_stack):
        delta = np.einsum("nk,ckd->cnd", null_basis, u_stack)
        return base.weights[None] + delta / colscale[None, :, None]

    def total_loss(u_stack):
        paths = _rollout_affine(base, starts, goals, to_weights(u_stack))
        lc = model.violation(paths).mean(axis=-1)  # (C,)
        lp = ((paths - base_paths[None]) ** 2).mean(axis=(-1, -2, -3))
        return config.ltl_weight * lc + lp

    def validation_score(u_now):
        """(satisfaction count, -loss): exact held-out criterion first."""
        from .feasibility import abstract_lenient
        from .trajectories import constraint_satisfied

        loss = float(total_loss(u_now[None])[0])
        if config.ltl_weight <= 0:
            return (0, -loss)
        w_now = to_weights(u_now[None])[0]
        paths = _rollout_affine(base, val_starts, val_goals, w_now[None])[0]
        good = 0
        for b in range(len(paths)):
            if constraint_satisfied(abstract_lenient(paths[b], grounding), constraint):
                good += 1
        return (good, -loss)

    best_u = u.copy()
    best_score = validation_score(u)
    if warm is not None:
        warm_score = validation_score(warm)
        if warm_score > best_score:
            u = warm
            best_u = warm.copy()
            best_score = warm_score
    for epoch in range(config.epochs):
        flat = u.reshape(-1)
        stack = np.repeat(flat[None, :], 2 * n_params + 1, axis=0)
        for i in range(n_params):
            stack[1 + 2 * i, i] += eps
            stack[2 + 2 * i, i] -= eps
        losses = total_loss(stack.reshape(-1, *u.shape))
        if not np.all(np.isfinite(losses)):
            raise TaskRepairError(
                f"non-finite loss during trajectory repair at epoch {epoch}"
            )
        grad = (losses[1::2] - losses[2::2]) / (2 * eps)
        norm = float(np.linalg.norm(grad))
        if norm > config.grad_clip:
            grad = grad * (config.grad_clip / norm)
        b1, b2 = 0.9, 0.999
        m_adam = b1 * m_adam + (1 - b1) * grad
        v_adam = b2 * v_adam + (1 - b2) * grad * grad
        mh = m_adam / (1 - b1 ** (epoch + 1))
        vh = v_adam / (1 - b2 ** (epoch + 1))
        flat = flat - lr * mh / (np.sqrt(vh) + 1e-8)
        u = flat.reshape(u.shape)
        score = validation_score(u)
        if score > best_score:
            best_score = score
            best_u = u.copy()
    return base.with_weights(to_weights(best_u[None])[0])


def _rollout_affine(ctrl, starts, goals, w_stack):
    """(C, B, T, d) rollouts for a stack of weight tables."""
    from .dmp import rollout_batch

    out = rollout_batch(ctrl, starts, goals, weights=w_stack)
    if out.ndim == 3:
        return out[None]
    return out
