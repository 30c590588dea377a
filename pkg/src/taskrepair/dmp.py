"""Dynamic-movement-primitive controllers for skill trajectories.

A controller is a second-order attractor toward the goal plus a radial-basis
forcing term driven by an exponentially decaying phase.  Integration is
explicit Euler over a fixed number of timesteps; since the dynamics are
linear, a rollout decomposes exactly into the attractor path for the given
endpoints plus an endpoint-independent response to the basis weights, which
the optimizer exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

DEFAULT_TIMESTEPS = 50
DEFAULT_N_BASIS = 25
DEFAULT_STIFFNESS = 100.0
DEFAULT_PHASE_DECAY = 4.0
GOAL_TOLERANCE = 1e-2


@dataclass(frozen=True)
class DmpSkillController:
    """Weight table plus rollout parameters for one skill."""

    dims: int
    n_basis: int = DEFAULT_N_BASIS
    timesteps: int = DEFAULT_TIMESTEPS
    stiffness: float = DEFAULT_STIFFNESS
    damping: float = None
    phase_decay: float = DEFAULT_PHASE_DECAY
    weights: np.ndarray = None  # (n_basis, dims)

    def __post_init__(self):
        if self.damping is None:
            object.__setattr__(self, "damping", 2.0 * float(np.sqrt(self.stiffness)))
        w = self.weights
        if w is None:
            w = np.zeros((self.n_basis, self.dims))
        w = np.asarray(w, dtype=float)
        if w.shape != (self.n_basis, self.dims):
            raise ValueError(
                f"weights must have shape ({self.n_basis}, {self.dims}), got {w.shape}"
            )
        object.__setattr__(self, "weights", w)

    def with_weights(self, weights):
        return replace(self, weights=np.asarray(weights, dtype=float))

    # -- cached kinematics ---------------------------------------------------

    @property
    def dt(self):
        return 1.0 / (self.timesteps - 1)

    def phase(self):
        t = np.linspace(0.0, 1.0, self.timesteps)
        return np.exp(-self.phase_decay * t)

    def basis_activations(self):
        """Normalized basis activations scaled by the phase, (T, n_basis)."""
        s = self.phase()
        centers = np.exp(
            -self.phase_decay * np.linspace(0.0, 1.0, self.n_basis)
        )
        widths = self.n_basis**1.5 / centers / self.phase_decay
        psi = np.exp(-widths * (s[:, None] - centers[None, :]) ** 2)
        psi_norm = psi / psi.sum(axis=1, keepdims=True)
        return psi_norm * s[:, None]

    def basis_response(self):
        """Euler response of the attractor dynamics to each basis column.

        Returns (T, n_basis): column i is the trajectory deviation produced
        by unit weight on basis i, independent of the endpoints.
        """
        phi = self.basis_activations()
        T, n = phi.shape
        dt, k, d = self.dt, self.stiffness, self.damping
        y = np.zeros((n,))
        v = np.zeros((n,))
        out = np.zeros((T, n))
        for step in range(1, T):
            a = -k * y - d * v + phi[step - 1]
            y = y + dt * v
            v = v + dt * a
            out[step] = y
        return out

    def attractor_path(self, starts, goals):
        """Zero-forcing rollouts for a batch of endpoint pairs, (B, T, dims)."""
        starts = np.atleast_2d(np.asarray(starts, dtype=float))
        goals = np.atleast_2d(np.asarray(goals, dtype=float))
        B = starts.shape[0]
        T = self.timesteps
        dt, k, d = self.dt, self.stiffness, self.damping
        y = starts.copy()
        v = np.zeros_like(y)
        out = np.zeros((B, T, self.dims))
        out[:, 0] = y
        for step in range(1, T):
            a = k * (goals - y) - d * v
            y = y + dt * v
            v = v + dt * a
            out[:, step] = y
        return out


def rollout_batch(ctrl: DmpSkillController, starts, goals, weights=None):
    """Discretized trajectories for endpoint pairs, (B, T, dims).

    ``weights`` overrides the controller table; a stack of weight tables
    (C, n_basis, dims) yields a (C, B, T, dims) result.
    """
    base = ctrl.attractor_path(starts, goals)  # (B, T, d)
    response = ctrl.basis_response()  # (T, n)
    w = ctrl.weights if weights is None else np.asarray(weights, dtype=float)
    if w.ndim == 2:
        return base + np.einsum("tn,nd->td", response, w)[None, :, :]
    dev = np.einsum("tn,cnd->ctd", response, w)  # (C, T, d)
    return base[None, :, :, :] + dev[:, None, :, :]


def dmp_rollout(ctrl: DmpSkillController, start, goal):
    """One trajectory from start to goal, (timesteps, dims)."""
    return rollout_batch(ctrl, [start], [goal])[0]


def _resample(points, timesteps):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("demonstration must be a sequence of points")
    src = np.linspace(0.0, 1.0, len(pts))
    dst = np.linspace(0.0, 1.0, timesteps)
    return np.stack([np.interp(dst, src, pts[:, d]) for d in range(pts.shape[1])], axis=1)


def fit_dmp(
    demonstrations,
    n_basis=DEFAULT_N_BASIS,
    timesteps=DEFAULT_TIMESTEPS,
    stiffness=DEFAULT_STIFFNESS,
    phase_decay=DEFAULT_PHASE_DECAY,
) -> DmpSkillController:
    """Least-squares fit of forcing weights to demonstrated trajectories.

    Demonstrations may have differing lengths and endpoints; they are
    resampled and share one weight table.  Zero-length demonstrations are
    rejected.
    """
    demos = [np.asarray(d, dtype=float) for d in demonstrations]
    if not demos:
        raise ValueError("at least one demonstration required")
    dims = demos[0].shape[1]
    for d in demos:
        if d.ndim != 2 or d.shape[1] != dims:
            raise ValueError("demonstrations disagree on dimension")
        if len(d) < 2:
            raise ValueError("demonstration needs at least two points")
        if float(np.max(np.abs(d - d[0]))) == 0.0:
            raise ValueError("degenerate demonstration with zero path length")

    ctrl = DmpSkillController(
        dims=dims,
        n_basis=n_basis,
        timesteps=timesteps,
        stiffness=stiffness,
        phase_decay=phase_decay,
    )
    phi = ctrl.basis_activations()  # (T, n)
    dt, k, dcoef = ctrl.dt, ctrl.stiffness, ctrl.damping

    rows = []
    targets = []
    for d in demos:
        y = _resample(d, timesteps)  # (T, dims)
        goal = y[-1]
        # forcing that reproduces the demo under the Euler update rule:
        # y[k+1] = y[k] + dt v[k], v[k+1] = v[k] + dt (K(g-y[k]) - D v[k] + f[k])
        v = (y[1:] - y[:-1]) / dt  # v[k], k = 0..T-2
        a = (v[1:] - v[:-1]) / dt  # a[k], k = 0..T-3
        f = a - k * (goal[None, :] - y[:-2]) + dcoef * v[:-1]
        rows.append(phi[: timesteps - 2])
        targets.append(f)
    big_phi = np.concatenate(rows, axis=0)
    big_f = np.concatenate(targets, axis=0)
    # ridge-regularized normal equations: the phase gating makes late basis
    # columns tiny, so a bare least squares blows the weights up
    gram = big_phi.T @ big_phi
    lam = 1e-6 * np.trace(gram) / gram.shape[0] + 1e-12
    weights = np.linalg.solve(
        gram + lam * np.eye(gram.shape[0]), big_phi.T @ big_f
    )
    return ctrl.with_weights(weights)


def chain_demonstrations(skill, grounding, count=60, seed=0, interior=0.2):
    """Synthetic demonstrations walking a skill's symbolic chain.

    Each demonstration samples one waypoint inside every cell of a random
    walk through the skill's transition map (pre-initial to final) and
    linearly resamples the polyline.  Used to bootstrap a base controller
    when no recorded executions are supplied.
    """
    rng = np.random.default_rng(seed)
    demos = []
    pre = sorted(skill.pre_init, key=sorted)
    for _ in range(count):
        state = pre[rng.integers(len(pre))]
        states = [state]
        hops = 0
        while state not in skill.post_final and hops < 64:
            succs = sorted(skill.successors(state), key=sorted)
            if not succs:
                break
            state = succs[rng.integers(len(succs))]
            states.append(state)
            hops += 1
        pts = np.array(
            [grounding.sample_state_region(s, rng, interior=interior) for s in states]
        )
        seg = np.concatenate(
            [[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))]
        )
        if seg[-1] <= 0:
            continue
        t = np.linspace(0.0, seg[-1], max(60, 12 * len(states)))
        demos.append(
            np.stack([np.interp(t, seg, pts[:, d]) for d in range(pts.shape[1])], axis=1)
        )
    return demos


def save_controller(ctrl: DmpSkillController):
    """Plain-data form of a controller (for the workbench file formats)."""
    return {
        "dims": ctrl.dims,
        "n_basis": ctrl.n_basis,
        "timesteps": ctrl.timesteps,
        "gains": {"stiffness": ctrl.stiffness, "damping": ctrl.damping},
        "phase_decay": ctrl.phase_decay,
        "weights": [[float(x) for x in row] for row in ctrl.weights],
    }


def load_controller(data) -> DmpSkillController:
    return DmpSkillController(
        dims=int(data["dims"]),
        n_basis=int(data["n_basis"]),
        timesteps=int(data["timesteps"]),
        stiffness=float(data["gains"]["stiffness"]),
        damping=float(data["gains"]["damping"]),
        phase_decay=float(data.get("phase_decay", DEFAULT_PHASE_DECAY)),
        weights=np.asarray(data["weights"], dtype=float),
    )
