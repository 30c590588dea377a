"""Grounding of world propositions to continuous workspace regions.

Boxes use closed-open intervals per dimension; balls are closed.  Overlap is
permitted, so a point may abstract to a multi-proposition state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecValidationError, WorkspaceError


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi):
            raise SpecValidationError("box lo/hi dimension mismatch")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise SpecValidationError("box must have positive extent")

    @property
    def dims(self):
        return len(self.lo)

    def contains(self, point):
        return all(l <= p < h for p, l, h in zip(point, self.lo, self.hi))

    def contains_many(self, points):
        pts = np.asarray(points, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts < hi), axis=-1)

    def margin(self, point):
        """Signed distance to the boundary; positive inside."""
        per_dim = [min(p - l, h - p) for p, l, h in zip(point, self.lo, self.hi)]
        return min(per_dim)

    def margin_many(self, points):
        pts = np.asarray(points, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.minimum(pts - lo, hi - pts).min(axis=-1)

    def center(self):
        return tuple((l + h) / 2.0 for l, h in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Ball:
    center_: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center_", tuple(float(v) for v in self.center_))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise SpecValidationError("ball radius must be positive")

    @property
    def dims(self):
        return len(self.center_)

    def contains(self, point):
        return (
            math.dist(point, self.center_) <= self.radius
        )

    def contains_many(self, points):
        pts = np.asarray(points, dtype=float)
        c = np.asarray(self.center_)
        return np.linalg.norm(pts - c, axis=-1) <= self.radius

    def margin(self, point):
        return self.radius - math.dist(point, self.center_)

    def margin_many(self, points):
        pts = np.asarray(points, dtype=float)
        c = np.asarray(self.center_)
        return self.radius - np.linalg.norm(pts - c, axis=-1)

    def center(self):
        return self.center_


def _bounding_box(region):
    if isinstance(region, Box):
        return region.lo, region.hi
    c, r = region.center_, region.radius
    return tuple(v - r for v in c), tuple(v + r for v in c)


@dataclass(frozen=True)
class Grounding:
    """Map from world proposition to region, plus the workspace bounds."""

    regions: dict
    workspace: Box

    def __post_init__(self):
        for name, region in self.regions.items():
            if region.dims != self.workspace.dims:
                raise SpecValidationError(
                    f"region for {name!r} has wrong dimension"
                )

    @property
    def dims(self):
        return self.workspace.dims

    def in_workspace(self, point):
        # workspace bounds are inclusive on both ends for robustness at the rim
        return all(
            l <= p <= h for p, l, h in zip(point, self.workspace.lo, self.workspace.hi)
        )

    def abstract(self, point):
        """Symbolic world state of a point: all propositions whose region holds it."""
        if not self.in_workspace(point):
            raise WorkspaceError(f"point {tuple(point)} outside workspace")
        return frozenset(
            name for name, region in sorted(self.regions.items()) if region.contains(point)
        )

    def abstract_many(self, points):
        pts = np.asarray(points, dtype=float)
        lo = np.asarray(self.workspace.lo)
        hi = np.asarray(self.workspace.hi)
        if not np.all((pts >= lo) & (pts <= hi)):
            bad = pts[~np.all((pts >= lo) & (pts <= hi), axis=-1)][0]
            raise WorkspaceError(f"point {tuple(bad)} outside workspace")
        names = sorted(self.regions)
        inside = {n: self.regions[n].contains_many(pts) for n in names}
        out = []
        for i in range(len(pts)):
            out.append(frozenset(n for n in names if inside[n][i]))
        return out

    def disjoint(self, a, b):
        """Whether two propositions ground to provably disjoint regions.

        Checked by dense sampling of the overlap of the bounding boxes; an
        empty bounding-box overlap is disjoint outright.
        """
        ra, rb = self.regions[a], self.regions[b]
        lo_a, hi_a = _bounding_box(ra)
        lo_b, hi_b = _bounding_box(rb)
        lo = [max(x, y) for x, y in zip(lo_a, lo_b)]
        hi = [min(x, y) for x, y in zip(hi_a, hi_b)]
        if any(l >= h for l, h in zip(lo, hi)):
            return True
        # sample a grid over the bounding-box intersection
        steps = 12
        axes = [np.linspace(l, h - (h - l) * 1e-9, steps) for l, h in zip(lo, hi)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
        both = ra.contains_many(mesh) & rb.contains_many(mesh)
        return not bool(both.any())

    def state_region_center(self, state):
        """A representative interior point of G(state), by rejection search."""
        rng = np.random.default_rng(0)
        pt = self.sample_state_region(state, rng, tries=4000)
        return pt

    def sample_state_region(self, state, rng, tries=1000, interior=0.0):
        """Uniform-ish sample from G(state) by rejection.

        ``interior`` shrinks the bounding box away from its faces before
        sampling, biasing points toward the region interior (executions
        start where the previous motion converged, away from boundaries).
        Raises SamplerExhaustedError when the region appears empty.
        """
        from .errors import SamplerExhaustedError

        state = frozenset(state)
        if state:
            los, his = zip(*(_bounding_box(self.regions[p]) for p in sorted(state)))
            lo = [max(v) for v in zip(*los)]
            hi = [min(v) for v in zip(*his)]
            if any(l >= h for l, h in zip(lo, hi)):
                raise SamplerExhaustedError(
                    f"grounding region empty for state {sorted(state)}"
                )
        else:
            lo, hi = self.workspace.lo, self.workspace.hi
        lo = np.maximum(np.asarray(lo, dtype=float), np.asarray(self.workspace.lo))
        hi = np.minimum(np.asarray(hi, dtype=float), np.asarray(self.workspace.hi))
        if interior > 0:
            pad = np.minimum(interior, (hi - lo) * 0.4)
            lo = lo + pad
            hi = hi - pad
        for _ in range(tries):
            pt = lo + rng.random(self.dims) * (hi - lo)
            if self.abstract(pt) == state:
                return tuple(float(v) for v in pt)
        raise SamplerExhaustedError(
            f"grounding region empty for state {sorted(state)}"
        )

    def mutual_exclusions(self):
        """Sorted list of proposition pairs with disjoint regions."""
        names = sorted(self.regions)
        out = []
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if self.disjoint(a, b):
                    out.append((a, b))
        return out

    def realizable_states(self, resolution=60):
        """World states arising as the abstraction of some workspace point.

        Found by abstracting a dense deterministic grid; adequate for regions
        wider than the grid pitch.
        """
        lo = np.asarray(self.workspace.lo)
        hi = np.asarray(self.workspace.hi)
        axes = [
            np.linspace(l + (h - l) / (2 * resolution), h - (h - l) / (2 * resolution), resolution)
            for l, h in zip(lo, hi)
        ]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dims)
        return frozenset(self.abstract_many(mesh))


def abstract(point, grounding: Grounding):
    return grounding.abstract(point)


def grid_grounding(nx=3, ny=3, cell=1.0):
    """The standard workbench grid: nx columns x0.. and ny rows y0.. .

    Column proposition xi grounds to [i, i+1) x workspace-y; row yj likewise.
    """
    regions = {}
    for i in range(nx):
        regions[f"x{i}"] = Box((i * cell, 0.0), ((i + 1) * cell, ny * cell))
    for j in range(ny):
        regions[f"y{j}"] = Box((0.0, j * cell), (nx * cell, (j + 1) * cell))
    ws = Box((0.0, 0.0), (nx * cell, ny * cell))
    return Grounding(regions=regions, workspace=ws)
