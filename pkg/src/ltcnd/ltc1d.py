"""Original one-dimensional LTC with high/low line maintenance.

The state holds the last transmitted point and the low/high ordinates at the
most recent accepted timestamp; it never grows with the stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, RejectedInputError
from .geometry import Sample, TransmittedPoint


@dataclass(slots=True)
class Ltc1dState:
    tau: float
    xi: float
    lp: float
    hp: float
    u_prev: float
    epsilon: float
    started: bool = False

    @property
    def last_tx(self) -> TransmittedPoint:
        return TransmittedPoint(self.tau, np.array([self.xi]))


def _scalar(sample: Sample) -> float:
    x = np.asarray(sample.x, dtype=np.float64).reshape(-1)
    if x.size != 1:
        raise InvalidParameterError(f"1D LTC needs scalar samples, got dimension {x.size}")
    return float(x[0])


def _line(at: float, t0: float, y0: float, t1: float, y1: float) -> float:
    return y0 + (y1 - y0) * (at - t0) / (t1 - t0)


def ltc1d_init(first_sample: Sample, epsilon: float) -> tuple[Ltc1dState, TransmittedPoint]:
    """Start a stream; the first sample is transmitted verbatim."""
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    t, x = float(first_sample.t), _scalar(first_sample)
    state = Ltc1dState(tau=t, xi=x, lp=x, hp=x, u_prev=t, epsilon=float(epsilon))
    return state, TransmittedPoint(t, np.array([x]))


def ltc1d_step(state: Ltc1dState, sample: Sample) -> tuple[Ltc1dState, TransmittedPoint | None]:
    t, x = float(sample.t), _scalar(sample)
    if not t > state.u_prev:
        raise RejectedInputError(f"timestamp {t} does not follow {state.u_prev}")
    eps = state.epsilon
    if not state.started:
        state.lp, state.hp, state.u_prev, state.started = x - eps, x + eps, t, True
        return state, None

    new_lp = max(x - eps, _line(t, state.tau, state.xi, state.u_prev, state.lp))
    new_hp = min(x + eps, _line(t, state.tau, state.xi, state.u_prev, state.hp))
    if new_lp <= new_hp:
        state.lp, state.hp, state.u_prev = new_lp, new_hp, t
        return state, None

    tx = TransmittedPoint(state.u_prev, np.array([(state.lp + state.hp) / 2]))
    state.tau, state.xi = tx.tau, float(tx.xi[0])
    state.lp, state.hp, state.u_prev = x - eps, x + eps, t
    return state, tx


def ltc1d_flush(state: Ltc1dState) -> tuple[Ltc1dState, TransmittedPoint | None]:
    """Emit the pending tail, if any, so a finite stream is fully reconstructible."""
    if not state.started:
        return state, None
    tx = TransmittedPoint(state.u_prev, np.array([(state.lp + state.hp) / 2]))
    state.tau, state.xi = tx.tau, float(tx.xi[0])
    state.lp = state.hp = state.xi
    state.started = False
    return state, tx
