"""Uniform driver over the three compressor backends."""

from __future__ import annotations

import enum
from functools import partial
from typing import Callable, Iterable, Iterator

import numpy as np

from . import euclidean, infinity, ltc1d
from .errors import InvalidParameterError
from .geometry import Norm, Sample, TransmittedPoint


class Backend(str, enum.Enum):
    LTC1D = "ltc1d"
    INFINITY = "infinity"
    EUCLIDEAN = "euclidean"

    @classmethod
    def for_norm(cls, norm: Norm | str) -> "Backend":
        return cls.INFINITY if Norm.parse(norm) is Norm.INFINITY else cls.EUCLIDEAN


_OPS: dict[Backend, tuple[Callable, Callable, Callable]] = {
    Backend.LTC1D: (lambda s, eps, n: ltc1d.ltc1d_init(s, eps), ltc1d.ltc1d_step, ltc1d.ltc1d_flush),
    Backend.INFINITY: (infinity.ltcinf_init, infinity.ltcinf_step, infinity.ltcinf_flush),
    Backend.EUCLIDEAN: (euclidean.euc_init, euclidean.euc_step, euclidean.euc_flush),
}


class Compressor:
    """Push samples one at a time; transmitted points come back as they are decided.

    >>> c = Compressor(0.5, "infinity")
    >>> [tx.tau for tx in c.push(Sample.of(0, [1.0, 2.0]))]
    [0.0]
    """

    def __init__(self, epsilon: float, norm: Norm | str = Norm.INFINITY,
                 backend: Backend | str | None = None, emit: str = "witness"):
        if not epsilon > 0:
            raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
        self.epsilon = float(epsilon)
        self.norm = Norm.parse(norm)
        self.backend = Backend.for_norm(self.norm) if backend is None else Backend(backend)
        self._init, self._step, self._flush = _OPS[self.backend]
        if self.backend is Backend.EUCLIDEAN:
            if emit not in euclidean.EMIT_POLICIES:
                raise InvalidParameterError(f"emit must be one of {euclidean.EMIT_POLICIES}, got {emit!r}")
            self._init = partial(euclidean.euc_init, emit=emit)
        elif emit != "witness":
            raise InvalidParameterError("only the euclidean backend has a choice of emitted point")
        self.emit = emit
        self.state = None
        self.n_received = 0
        self.n_transmitted = 0

    def push(self, sample: Sample) -> list[TransmittedPoint]:
        if self.state is None:
            self.state, tx = self._init(sample, self.epsilon, None)
        else:
            self.state, tx = self._step(self.state, sample)
        self.n_received += 1
        if tx is None:
            return []
        self.n_transmitted += 1
        return [tx]

    def flush(self) -> list[TransmittedPoint]:
        if self.state is None:
            return []
        self.state, tx = self._flush(self.state)
        if tx is None:
            return []
        self.n_transmitted += 1
        return [tx]

    @property
    def peak_ball_set(self) -> int:
        return int(getattr(self.state, "peak_ball_set", 0) or 0)


def iter_samples(times: np.ndarray, values: np.ndarray) -> Iterator[Sample]:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    for t, x in zip(np.asarray(times, dtype=np.float64), values):
        yield Sample(float(t), x)


def compress_samples(samples: Iterable[Sample], epsilon: float, norm: Norm | str = Norm.INFINITY,
                     backend: Backend | str | None = None, flush: bool = True,
                     emit: str = "witness") -> list[TransmittedPoint]:
    comp = Compressor(epsilon, norm, backend, emit)
    it = iter(samples)
    first = next(it, None)
    if first is None:
        return []
    out = comp.push(first)
    # Same as calling push per sample, minus the bookkeeping.
    state, step = comp.state, comp._step
    for sample in it:
        state, tx = step(state, sample)
        if tx is not None:
            out.append(tx)
    comp.state = state
    if flush:
        out.extend(comp.flush())
    return out


def compress(times, values, epsilon: float, norm: Norm | str = Norm.INFINITY,
             backend: Backend | str | None = None, flush: bool = True,
             emit: str = "witness") -> list[TransmittedPoint]:
    """Compress a whole stream held in arrays (``values`` shaped (m,) or (m, n))."""
    return compress_samples(iter_samples(times, values), epsilon, norm, backend, flush, emit)
