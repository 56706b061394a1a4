"""n-dimensional LTC under the infinity norm.

Every ball is a cube, so the running intersection of the balls of an epoch
is itself an axis-aligned box. The state is that box plus a few scalars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, RejectedInputError
from .geometry import AlignedBox, Sample, TransmittedPoint, as_vector


@dataclass(slots=True)
class LtcInfState:
    tau: float
    xi: np.ndarray
    epsilon: float
    # Feasible box, in shifted coordinates at abscissa v1.
    lo: np.ndarray
    hi: np.ndarray
    u_prev: float
    v1: float | None = None
    v_prev: float = 0.0

    @property
    def n(self) -> int:
        return self.xi.shape[0]

    @property
    def last_tx(self) -> TransmittedPoint:
        return TransmittedPoint(self.tau, self.xi)

    @property
    def feasible(self) -> AlignedBox:
        return AlignedBox(self.lo.copy(), self.hi.copy())

    def _pending_value(self) -> np.ndarray:
        z = 0.5 * (self.lo + self.hi)
        return self.xi + (self.v_prev / self.v1) * z

    def _restart(self, tx: TransmittedPoint, t: float, x: np.ndarray) -> None:
        self.tau, self.xi = tx.tau, tx.xi
        v = t - tx.tau
        z = x - tx.xi
        self.v1 = self.v_prev = v
        np.subtract(z, self.epsilon, out=self.lo)
        np.add(z, self.epsilon, out=self.hi)
        self.u_prev = t


def ltcinf_init(first_sample: Sample, epsilon: float, n: int | None = None) -> tuple[LtcInfState, TransmittedPoint]:
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    x = as_vector(first_sample.x)
    if n is not None and (n < 1 or x.shape[0] != n):
        raise InvalidParameterError(f"sample has dimension {x.shape[0]}, expected n={n}")
    t = float(first_sample.t)
    state = LtcInfState(
        tau=t, xi=x.copy(), epsilon=float(epsilon),
        lo=np.zeros_like(x), hi=np.zeros_like(x), u_prev=t,
    )
    return state, TransmittedPoint(t, x.copy())


def ltcinf_step(state: LtcInfState, sample: Sample) -> tuple[LtcInfState, TransmittedPoint | None]:
    t = float(sample.t)
    x = sample.x
    if not t > state.u_prev:
        raise RejectedInputError(f"timestamp {t} does not follow {state.u_prev}")
    if x.shape != state.xi.shape:
        raise InvalidParameterError(f"sample has dimension {x.shape[0]}, stream has {state.n}")

    v = t - state.tau
    z = x - state.xi
    if state.v1 is None:
        state.v1 = state.v_prev = v
        state.lo = z - state.epsilon
        state.hi = z + state.epsilon
        state.u_prev = t
        return state, None

    scale = state.v1 / v
    center = scale * z
    radius = scale * state.epsilon
    new_lo = np.maximum(state.lo, center - radius)
    new_hi = np.minimum(state.hi, center + radius)
    if (new_lo <= new_hi).all():
        state.lo, state.hi = new_lo, new_hi
        state.u_prev, state.v_prev = t, v
        return state, None

    tx = TransmittedPoint(state.u_prev, state._pending_value())
    state._restart(tx, t, x)
    return state, tx


def ltcinf_flush(state: LtcInfState) -> tuple[LtcInfState, TransmittedPoint | None]:
    if state.v1 is None:
        return state, None
    tx = TransmittedPoint(state.u_prev, state._pending_value())
    state.tau, state.xi = tx.tau, tx.xi
    state.v1 = None
    state.v_prev = 0.0
    state.lo = np.zeros_like(state.xi)
    state.hi = np.zeros_like(state.xi)
    return state, tx
