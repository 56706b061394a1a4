"""Brute-force oracles for ball intersections and for whole compression runs.

These are deliberately naive: grid enumeration with a Lipschitz safety band,
Helly subset enumeration, and a reference compressor that asks the grid
whether the balls of an epoch still intersect. They share nothing with the
production search beyond the ball construction itself.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InconclusiveOracleError, InvalidParameterError, LTCError, ResourceCapError
from .geometry import AlignedBox, Ball, Norm, Sample, ShiftedPoint, TransmittedPoint, ball_from_point

MAX_GRID_POINTS = 10**7
_CHUNK = 1 << 16


class OracleDisagreement(LTCError):
    """A value supplied to the reference compressor violates the epoch's balls."""


class Verdict(str, enum.Enum):
    NONEMPTY = "nonempty"
    EMPTY = "empty"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GridSpec:
    resolution: float
    bounds: AlignedBox

    def __post_init__(self):
        if not self.resolution > 0:
            raise InvalidParameterError(f"grid resolution must be positive, got {self.resolution}")

    @classmethod
    def covering(cls, balls: Sequence[Ball], resolution: float) -> "GridSpec":
        """Grid over the intersection of the balls' bounding boxes."""
        lo = np.max([b.center - b.radius for b in balls], axis=0)
        hi = np.min([b.center + b.radius for b in balls], axis=0)
        return cls(resolution, AlignedBox(lo, hi))

    def axes(self) -> list[np.ndarray]:
        out = []
        for lo, hi in zip(self.bounds.lo, self.bounds.hi):
            count = int(math.ceil((hi - lo) / self.resolution)) + 1
            out.append(lo + self.resolution * np.arange(count))
        return out

    @property
    def size(self) -> int:
        if self.bounds.is_empty:
            return 0
        return math.prod(int(math.ceil((hi - lo) / self.resolution)) + 1
                         for lo, hi in zip(self.bounds.lo, self.bounds.hi))


@dataclass(frozen=True)
class GridResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    min_margin: float = math.inf


def margins(points: np.ndarray, balls: Sequence[Ball]) -> np.ndarray:
    """Max over balls of (distance - radius), for each row of ``points``."""
    out = np.full(points.shape[0], -np.inf)
    for ball in balls:
        diff = points - ball.center
        if ball.norm is Norm.INFINITY:
            dist = np.max(np.abs(diff), axis=1)
        else:
            dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        np.maximum(out, dist - ball.radius, out=out)
    return out


def _check_family(balls: Sequence[Ball]) -> None:
    if not balls:
        raise InvalidParameterError("need at least one ball")
    norms = {b.norm for b in balls}
    dims = {b.dim for b in balls}
    if len(norms) != 1 or len(dims) != 1:
        raise InvalidParameterError("balls must share norm and dimension")


def _grid_scan(balls: Sequence[Ball], grid: GridSpec):
    """Yield (points, margins) chunk by chunk."""
    axes = grid.axes()
    shape = tuple(a.size for a in axes)
    total = math.prod(shape)
    for start in range(0, total, _CHUNK):
        idx = np.unravel_index(np.arange(start, min(total, start + _CHUNK)), shape)
        pts = np.stack([axes[d][idx[d]] for d in range(len(axes))], axis=1)
        yield pts, margins(pts, balls)


def grid_intersect(balls: Sequence[Ball], grid: GridSpec) -> GridResult:
    """Decide whether the balls intersect by evaluating every grid point.

    Nonempty needs a grid point at least two cells inside every ball; empty
    needs every grid point farther out than both two cells and the grid's
    Lipschitz bound ``resolution * sqrt(n)``. Anything else is indeterminate.
    """
    _check_family(balls)
    if grid.bounds.is_empty:
        return GridResult(Verdict.EMPTY)
    if grid.size > MAX_GRID_POINTS:
        raise ResourceCapError(f"grid of {grid.size} points exceeds {MAX_GRID_POINTS}")
    res = grid.resolution
    n = balls[0].dim
    best_val, best_pt = math.inf, None
    for pts, m in _grid_scan(balls, grid):
        k = int(np.argmin(m))
        if m[k] < best_val:
            best_val, best_pt = float(m[k]), pts[k].copy()
    if best_val <= -2 * res:
        assert float(margins(best_pt[None, :], balls)[0]) <= 0
        return GridResult(Verdict.NONEMPTY, best_pt, best_val)
    if best_val > max(2 * res, res * math.sqrt(n)):
        return GridResult(Verdict.EMPTY, None, best_val)
    return GridResult(Verdict.INDETERMINATE, best_pt, best_val)


def refine_intersect(balls: Sequence[Ball], points_per_axis: int | None = None,
                     max_levels: int = 48, max_cells: int = 200_000) -> GridResult:
    """Hierarchical grid test: subdivide only the cells that could hold a point.

    Starts from a regular grid over the intersection of the bounding boxes.
    A cell survives while the margin at its center is within the cell's
    half-diagonal (margins are 1-Lipschitz), and survivors are halved along
    every axis. A cell center inside every ball certifies nonemptiness; no
    survivors certifies emptiness. Running out of levels or cells is
    indeterminate.
    """
    _check_family(balls)
    n = balls[0].dim
    if points_per_axis is None:
        points_per_axis = {1: 64, 2: 16, 3: 8}.get(n, 4)
    spec = GridSpec.covering(balls, 1.0)
    if spec.bounds.is_empty:
        return GridResult(Verdict.EMPTY)
    scale = max(b.radius for b in balls)
    guard = 1e-12 * scale
    lo, hi = spec.bounds.lo, spec.bounds.hi
    half = np.maximum((hi - lo) / (2 * points_per_axis), 1e-15 * scale)
    axes = [l + (2 * np.arange(points_per_axis) + 1) * h for l, h in zip(lo, half)]
    centers = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=n)))
    best_val, best_pt = math.inf, None
    for _ in range(max_levels):
        m = margins(centers, balls)
        k = int(np.argmin(m))
        if m[k] < best_val:
            best_val, best_pt = float(m[k]), centers[k].copy()
        if best_val <= -guard:
            return GridResult(Verdict.NONEMPTY, best_pt, best_val)
        alive = centers[m <= float(np.sqrt(half @ half)) + guard]
        if alive.shape[0] == 0:
            return GridResult(Verdict.EMPTY, None, best_val)
        if alive.shape[0] * offsets.shape[0] > max_cells:
            break
        half = half / 2
        centers = (alive[:, None, :] + offsets[None, :, :] * (2 * half)).reshape(-1, n)
    return GridResult(Verdict.INDETERMINATE, best_pt, best_val)


def helly_intersect(balls: Sequence[Ball], points_per_axis: int | None = None) -> bool:
    """Intersection test via Helly: every (n+1)-subfamily must intersect.

    Each subfamily goes to :func:`grid_intersect` over its own box; an
    indeterminate answer is retried once at five times the resolution.
    """
    _check_family(balls)
    if balls[0].norm is not Norm.EUCLIDEAN:
        raise InvalidParameterError("the Helly oracle is for Euclidean balls")
    n = balls[0].dim
    if len(balls) > 12 or n > 3:
        raise InvalidParameterError("Helly oracle is limited to m <= 12, n <= 3")
    if points_per_axis is None:
        points_per_axis = {1: 2000, 2: 200, 3: 50}[n]
    size = min(len(balls), n + 1)
    for subset in itertools.combinations(balls, size):
        grid = GridSpec.covering(subset, 1.0)
        if grid.bounds.is_empty:
            return False
        side = float(np.max(grid.bounds.hi - grid.bounds.lo))
        scale = max(b.radius for b in subset)
        verdict = Verdict.INDETERMINATE
        for factor in (1, 5):
            res = max(side / (points_per_axis * factor), 1e-13 * scale)
            verdict = grid_intersect(subset, GridSpec(res, grid.bounds)).verdict
            if verdict is not Verdict.INDETERMINATE:
                break
        if verdict is Verdict.INDETERMINATE:
            raise InconclusiveOracleError("subfamily is too close to tangency to decide")
        if verdict is Verdict.EMPTY:
            return False
    return True


def exhaustive_compressor(samples: Sequence[Sample], epsilon: float, norm: Norm | str,
                          anchors: Mapping[float, np.ndarray] | None = None) -> list[TransmittedPoint]:
    """Reference compressor: after each sample, ask the grid whether the epoch's balls meet.

    The emitted value is a certified interior grid point, unless ``anchors``
    holds a value for the emission timestamp; then that value is used after
    checking it satisfies every ball of the epoch. Anchoring lets a run follow
    another compressor's trajectory while deciding every emission itself.
    """
    norm = Norm.parse(norm)
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    samples = list(samples)
    if not samples:
        return []
    first = samples[0]
    tau, xi = first.t, np.array(first.x, dtype=np.float64)
    out = [TransmittedPoint(tau, xi.copy())]
    balls: list[Ball] = []
    witness = None
    v1 = v_prev = 0.0
    u_prev = prev_t = first.t

    def emit() -> TransmittedPoint:
        value = None if anchors is None else anchors.get(u_prev)
        if value is None:
            return TransmittedPoint(u_prev, xi + (v_prev / v1) * witness)
        value = np.asarray(value, dtype=np.float64)
        z = (value - xi) * (v1 / v_prev)
        worst = max(b.margin(z) / b.radius for b in balls)
        if worst > 1e-8:
            raise OracleDisagreement(
                f"value at t={u_prev} leaves an epoch ball by {worst:.3g} radii"
            )
        return TransmittedPoint(u_prev, value.copy())

    for sample in samples[1:]:
        if not sample.t > prev_t:
            raise InvalidParameterError("timestamps must increase")
        prev_t = sample.t
        shifted = ShiftedPoint(sample.t - tau, sample.x - xi)
        if not balls:
            v1 = v_prev = shifted.v
            balls = [ball_from_point(shifted, v1, epsilon, norm)]
            witness = balls[0].center.copy()
            u_prev = sample.t
            continue
        new = ball_from_point(shifted, v1, epsilon, norm)
        result = refine_intersect(balls + [new])
        if result.verdict is Verdict.INDETERMINATE:
            raise InconclusiveOracleError(f"cannot decide the epoch at t={sample.t}")
        if result.verdict is Verdict.NONEMPTY:
            balls.append(new)
            witness = result.witness
            u_prev, v_prev = sample.t, shifted.v
            continue
        tx = emit()
        out.append(tx)
        tau, xi = tx.tau, tx.xi
        shifted = ShiftedPoint(sample.t - tau, sample.x - xi)
        v1 = v_prev = shifted.v
        balls = [ball_from_point(shifted, v1, epsilon, norm)]
        witness = balls[0].center.copy()
        u_prev = sample.t
    if balls:
        out.append(emit())
    return out
