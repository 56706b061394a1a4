"""Reconstruction from transmitted points and run statistics."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError, OutOfRangeError
from .geometry import Norm, TransmittedPoint


@dataclass
class CompressionStats:
    n_received: int
    n_transmitted: int
    ratio_paper: float
    ratio_pct: float
    max_error: float
    peak_ball_set: int = 0
    wall_time: float = 0.0

    def to_kv(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)!r}\n" for f in fields(self))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "CompressionStats":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition("=")
            if key not in kinds:
                raise InvalidParameterError(f"unknown stats key {key!r}")
            values[key] = int(raw) if kinds[key] == "int" else float(raw)
        return cls(**values)


def _tx_arrays(tx: Sequence[TransmittedPoint]) -> tuple[np.ndarray, np.ndarray]:
    if not tx:
        raise InvalidParameterError("need at least one transmitted point")
    taus = np.array([p.tau for p in tx], dtype=np.float64)
    xis = np.stack([np.atleast_1d(np.asarray(p.xi, dtype=np.float64)) for p in tx])
    if np.any(np.diff(taus) <= 0):
        raise InvalidParameterError("transmitted points must have strictly increasing timestamps")
    return taus, xis


def reconstruct(tx: Sequence[TransmittedPoint], query_times) -> np.ndarray:
    """Piecewise-linear reconstruction at ``query_times``; shape (len(query_times), n).

    Exact at transmitted timestamps. No extrapolation.
    """
    taus, xis = _tx_arrays(tx)
    q = np.atleast_1d(np.asarray(query_times, dtype=np.float64))
    if q.size and (q.min() < taus[0] or q.max() > taus[-1]):
        raise OutOfRangeError(
            f"query range [{q.min()}, {q.max()}] exceeds transmitted range [{taus[0]}, {taus[-1]}]"
        )
    if taus.size == 1:
        return np.repeat(xis, q.size, axis=0)
    k = np.clip(np.searchsorted(taus, q, side="right") - 1, 0, taus.size - 2)
    w = (q - taus[k]) / (taus[k + 1] - taus[k])
    return xis[k] + w[:, None] * (xis[k + 1] - xis[k])


def pointwise_errors(times, values, tx: Sequence[TransmittedPoint], norm: Norm | str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    diff = reconstruct(tx, times) - values
    if Norm.parse(norm) is Norm.INFINITY:
        return np.max(np.abs(diff), axis=1)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def max_reconstruction_error(times, values, tx: Sequence[TransmittedPoint], norm: Norm | str) -> float:
    errors = pointwise_errors(times, values, tx, norm)
    return float(errors.max()) if errors.size else 0.0


def compute_stats(times, values, tx: Sequence[TransmittedPoint], epsilon: float, norm: Norm | str,
                  wall_time: float = 0.0, peak_ball_set: int = 0) -> CompressionStats:
    n_received = int(np.asarray(times).shape[0])
    n_tx = len(tx)
    if n_received == 0 or n_tx == 0:
        raise InvalidParameterError("statistics need a nonempty run")
    return CompressionStats(
        n_received=n_received,
        n_transmitted=n_tx,
        ratio_paper=n_received / n_tx,
        ratio_pct=100.0 * (1.0 - n_tx / n_received),
        max_error=max_reconstruction_error(times, values, tx, norm),
        peak_ball_set=int(peak_ball_set),
        wall_time=float(wall_time),
    )


def footprint(obj) -> int:
    """Bytes held by a compressor state: scalars plus array buffers, one level deep."""
    total = sys.getsizeof(obj)
    slots = getattr(type(obj), "__slots__", ())
    names = slots if slots else getattr(obj, "__dict__", {}).keys()
    for name in names:
        value = getattr(obj, name, None)
        if isinstance(value, np.ndarray):
            total += value.nbytes
        elif value is not None:
            total += sys.getsizeof(value)
    return total
