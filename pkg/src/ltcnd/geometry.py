"""Vectors, balls and axis-aligned boxes used by every compressor backend.

All comparisons are exact floating-point comparisons. Tangent balls intersect
and boundary points are inside; any tolerance belongs to the caller.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameterError, RejectedInputError


class Norm(str, enum.Enum):
    INFINITY = "infinity"
    EUCLIDEAN = "euclidean"

    @classmethod
    def parse(cls, value: "Norm | str") -> "Norm":
        if isinstance(value, Norm):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameterError(f"unknown norm {value!r}") from None


def as_vector(values: Sequence[float] | np.ndarray | float) -> np.ndarray:
    """Coerce to a finite 1-D float64 array (a scalar becomes a 1-vector)."""
    vec = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidParameterError(f"expected a non-empty 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise InvalidParameterError(f"vector has non-finite components: {vec}")
    return vec


def vector_norm(vec: np.ndarray, norm: Norm) -> float:
    if norm is Norm.INFINITY:
        return float(np.max(np.abs(vec)))
    return float(math.sqrt(float(np.dot(vec, vec))))


class Sample(NamedTuple):
    """One received stream point."""

    t: float
    x: np.ndarray

    @classmethod
    def of(cls, t: float, x) -> "Sample":
        t = float(t)
        if not math.isfinite(t):
            raise InvalidParameterError(f"non-finite timestamp {t}")
        return cls(t, as_vector(x))


class TransmittedPoint(NamedTuple):
    """One emitted point of the compressed stream."""

    tau: float
    xi: np.ndarray


class ShiftedPoint(NamedTuple):
    """A sample expressed relative to the last transmitted point."""

    v: float
    z: np.ndarray


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    norm: Norm = Norm.EUCLIDEAN

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def margin(self, point: np.ndarray) -> float:
        """Signed distance-like margin: <= 0 iff ``point`` is in the ball."""
        return vector_norm(np.asarray(point, dtype=np.float64) - self.center, self.norm) - self.radius


@dataclass(frozen=True)
class AlignedBox:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "AlignedBox":
        return cls(np.full(n, np.inf), np.full(n, -np.inf))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def is_empty(self) -> bool:
        return bool(np.any(self.lo > self.hi))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, point: np.ndarray) -> bool:
        point = np.asarray(point, dtype=np.float64)
        return bool(np.all(self.lo <= point) and np.all(point <= self.hi))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlignedBox):
            return NotImplemented
        if self.is_empty and other.is_empty:
            return True
        return bool(np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi))

    __hash__ = None  # type: ignore[assignment]


def shift(sample: Sample, last_tx: TransmittedPoint) -> ShiftedPoint:
    """Express ``sample`` in the frame whose origin is the last transmission."""
    if not sample.t > last_tx.tau:
        raise RejectedInputError(
            f"timestamp {sample.t} is not after the last transmission at {last_tx.tau}"
        )
    if sample.x.shape != last_tx.xi.shape:
        raise InvalidParameterError(
            f"sample has dimension {sample.x.shape[0]}, stream has {last_tx.xi.shape[0]}"
        )
    return ShiftedPoint(sample.t - last_tx.tau, sample.x - last_tx.xi)


def ball_from_point(p: ShiftedPoint, v1: float, epsilon: float, norm: Norm | str = Norm.EUCLIDEAN) -> Ball:
    """Ball of admissible values at abscissa ``v1`` induced by one shifted point.

    A line from the origin through ``(v1, z)`` passes within ``epsilon`` of
    ``p`` exactly when ``z`` lies in the returned ball.
    """
    if not v1 > 0:
        raise InvalidParameterError(f"v1 must be positive, got {v1}")
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    if p.v < v1:
        raise InvalidParameterError(f"point offset {p.v} precedes v1={v1}")
    scale = v1 / p.v
    return Ball(scale * p.z, scale * epsilon, Norm.parse(norm))


def _check_same_norm(a: Ball, b: Ball) -> None:
    if a.norm is not b.norm:
        raise InvalidParameterError(f"mixed norms: {a.norm.value} vs {b.norm.value}")
    if a.dim != b.dim:
        raise InvalidParameterError(f"dimension mismatch: {a.dim} vs {b.dim}")


def balls_intersect_pairwise(a: Ball, b: Ball) -> bool:
    _check_same_norm(a, b)
    reach = a.radius + b.radius
    if a.norm is Norm.INFINITY:
        return bool(np.all(np.abs(a.center - b.center) <= reach))
    return vector_norm(a.center - b.center, Norm.EUCLIDEAN) <= reach


def ball_contains_ball(outer: Ball, inner: Ball) -> bool:
    _check_same_norm(outer, inner)
    return vector_norm(outer.center - inner.center, outer.norm) + inner.radius <= outer.radius


def box_of_ball(b: Ball) -> AlignedBox:
    # Same formula for both norms; for the infinity norm the box is the ball.
    return AlignedBox(b.center - b.radius, b.center + b.radius)


def box_intersect(a: AlignedBox, b: AlignedBox) -> AlignedBox:
    if a.dim != b.dim:
        raise InvalidParameterError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return AlignedBox(np.maximum(a.lo, b.lo), np.minimum(a.hi, b.hi))


def ball_meets_box(b: Ball, box: AlignedBox) -> bool:
    """Exact ball-versus-box emptiness test (clamp the center into the box)."""
    if box.is_empty:
        return False
    nearest = np.clip(b.center, box.lo, box.hi)
    return vector_norm(nearest - b.center, b.norm) <= b.radius
