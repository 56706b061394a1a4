"""n-dimensional LTC under the Euclidean norm.

The intersection of Euclidean balls has no compact representation, so the
state keeps the set ``S`` of balls that still constrain it, the running
bounding box ``B``, and a witness point known to lie in every ball of ``S``.

Deciding whether a new ball keeps the intersection nonempty goes through
cheap rejections (ball outside ``B``, a disjoint pair), inclusion pruning,
and finally :func:`find_bisection`.

:func:`find_bisection` works on the power function
``P(x) = max_i ||x - c_i||^2 - r_i^2``, which is convex and nonpositive
exactly on the intersection. Fixing the first coordinate leaves a problem of
the same form in one dimension less, so the search sweeps the first axis by
bisection and solves each slice recursively. A slice in one dimension is
solved exactly: the optimum of the Lagrangian dual of a 1-D problem is
supported on at most two balls, so enumerating pairs gives the minimum.
Every multiplier vector ``lam`` found along the way yields the lower bound
``sum_i lam_i (|c_i|^2 - r_i^2) - |sum_i lam_i c_i|^2`` on ``min P``, which
certifies emptiness once it turns positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameterError, RejectedInputError
from .geometry import (
    AlignedBox,
    Ball,
    Norm,
    Sample,
    TransmittedPoint,
    as_vector,
)

SOLVER_TOL = 1e-9
K_MAX = 60
# Relative accuracy at which an inner slice stops refining its minimum.
_SLICE_TOL = 1e-7
# Relative accuracy of the inscribed-ball radius found at emission.
DEPTH_TOL = 1e-2
EMIT_POLICIES = ("witness", "deepest")


class _Slice(NamedTuple):
    value: float  # P evaluated at ``point``; an upper bound on the slice minimum
    point: np.ndarray
    lam: np.ndarray
    lower: float  # dual lower bound on the slice minimum
    slope: float = 0.0  # subgradient with respect to the parent coordinate


def _dual(C: np.ndarray, beta: np.ndarray, lam: np.ndarray) -> tuple[float, np.ndarray]:
    mu = lam @ C
    total = float(lam @ (np.einsum("ij,ij->i", C, C) + beta))
    return total - float(mu @ mu), mu


def _pair_dual(ci: float, pi: float, cj: float, pj: float) -> tuple[float, float, float]:
    """Best dual bound from two parabolas: (bound, weight on i, minimiser)."""
    d, dp = ci - cj, pi - pj
    if d == 0:
        theta = 1.0 if pi > pj else 0.0
    else:
        theta = min(1.0, max(0.0, (dp - 2.0 * d * cj) / (2.0 * d * d)))
    mu = cj + theta * d
    return pj + theta * dp - mu * mu, theta, mu


def _min_1d(c: np.ndarray, beta: np.ndarray) -> _Slice:
    """Exact minimum over y of max_i (y - c_i)^2 + beta_i.

    The optimum is fixed by at most two parabolas. Starting from the one with
    the highest floor, repeatedly add the parabola that is highest at the
    current minimiser and keep the best basis containing it; the dual bound
    rises every round, so this ends after a few passes over the data.
    """
    p = c * c + beta
    i = j = int(np.argmax(beta))
    best, theta, y = float(beta[i]), 1.0, float(c[i])
    for _ in range(2 * c.shape[0] + 2):
        vals = (y - c) ** 2 + beta
        k = int(np.argmax(vals))
        if k == i or k == j or vals[k] <= best:
            break
        ck, pk = float(c[k]), float(p[k])
        cands = [(float(beta[k]), 1.0, ck, k, k)]
        for a in {i, j}:
            cands.append((*_pair_dual(ck, pk, float(c[a]), float(p[a])), k, a))
        top = max(cands)
        if top[0] <= best:
            break
        best, theta, y, i, j = top
    lam = np.zeros_like(c)
    lam[i] += theta
    lam[j] += 1.0 - theta
    value = float(np.max((y - c) ** 2 + beta))
    return _Slice(value, np.array([y]), lam, best)


def _combine(C, beta, lo: _Slice, hi: _Slice) -> tuple[np.ndarray, float]:
    """Best convex combination of two multiplier vectors, with its dual bound."""
    d_lo, mu_lo = _dual(C, beta, lo.lam)
    d_hi, mu_hi = _dual(C, beta, hi.lam)
    dmu = mu_lo - mu_hi
    # Dual along theta*lo + (1 - theta)*hi is linear minus |mu_hi + theta dmu|^2.
    p_lo, p_hi = d_lo + mu_lo @ mu_lo, d_hi + mu_hi @ mu_hi
    denom = 2.0 * float(dmu @ dmu)
    theta = 0.0 if denom == 0 else ((p_lo - p_hi) - 2.0 * float(mu_hi @ dmu)) / denom
    theta = min(1.0, max(0.0, theta))
    lam = theta * lo.lam + (1.0 - theta) * hi.lam
    mu = mu_hi + theta * dmu
    lower = theta * p_lo + (1.0 - theta) * p_hi - float(mu @ mu)
    return lam, lower


def _minimize(C: np.ndarray, beta: np.ndarray, a: float | None, b: float | None,
              tol: float, k_max: int, stop_on_cert: bool) -> _Slice:
    """Minimise max_i ||y - C_i||^2 + beta_i by bisection on the first axis.

    ``a``/``b`` restrict the first axis; ``None`` means the centers' range,
    which always contains the unconstrained minimiser.
    """
    if C.shape[1] == 1:
        return _min_1d(C[:, 0], beta)
    c0 = C[:, 0]
    rest = C[:, 1:]
    lo = float(c0.min()) if a is None else a
    hi = float(c0.max()) if b is None else b

    def evaluate(s: float) -> _Slice:
        off = s - c0
        sub = _minimize(rest, beta + off * off, None, None, tol, k_max, False)
        slope = 2.0 * float(sub.lam @ off)
        return _Slice(sub.value, np.concatenate(([s], sub.point)), sub.lam, sub.lower, slope)

    left = evaluate(lo)
    if left.value <= 0 or lo == hi:
        return left
    right = evaluate(hi)
    if right.value <= 0:
        return right
    best = left if left.value <= right.value else right
    if left.slope >= 0:
        return left._replace(lower=_dual(C, beta, left.lam)[0])
    if right.slope <= 0:
        return right._replace(lower=_dual(C, beta, right.lam)[0])

    lam, lower = _combine(C, beta, left, right)
    for _ in range(k_max):
        if best.value - lower <= tol or (stop_on_cert and lower > 0):
            break
        mid = 0.5 * (left.point[0] + right.point[0])
        if not left.point[0] < mid < right.point[0]:
            break
        probe = evaluate(mid)
        if probe.value < best.value:
            best = probe
        if probe.value <= 0:
            return probe
        if probe.slope > 0:
            right = probe
        elif probe.slope < 0:
            left = probe
        else:
            return probe._replace(lower=max(lower, _dual(C, beta, probe.lam)[0]))
        lam, lower = _combine(C, beta, left, right)
    return _Slice(best.value, best.point, lam, lower)


def _max_relative_margin(point: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> float:
    dist = np.sqrt(np.einsum("ij,ij->i", centers - point, centers - point))
    return float(np.max((dist - radii) / radii))


def _verified(point: np.ndarray, centers: np.ndarray, radii: np.ndarray, tol: float) -> bool:
    return _max_relative_margin(point, centers, radii) <= tol


def _find_point(centers: np.ndarray, radii: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                hints: Iterable[np.ndarray] = (), tol: float = SOLVER_TOL,
                k_max: int = K_MAX) -> np.ndarray | None:
    for hint in hints:
        if hint is not None and _verified(hint, centers, radii, 0.0):
            return np.array(hint, dtype=np.float64)

    # Work relative to the box center for conditioning.
    origin = 0.5 * (lo + hi)
    C = centers - origin
    rsq = radii * radii
    beta = -rsq
    scale = float(rsq.max())
    a = max(float(lo[0] - origin[0]), float(C[:, 0].min()))
    b = min(float(hi[0] - origin[0]), float(C[:, 0].max()))
    if a > b:
        # The power-function minimiser lies in the centers' hull; when that
        # misses B on this axis the minimiser is outside B, so nothing is inside.
        return None
    if C.shape[1] == 1:
        result = _min_1d(C[:, 0], beta)
    else:
        result = _minimize(C, beta, a, b, _SLICE_TOL * scale, k_max, True)
    point = result.point + origin
    if result.value <= 0 and _verified(point, centers, radii, tol):
        return point
    if result.lower > 0:
        return None
    return point if _verified(point, centers, radii, tol) else None


def find_bisection(S: Sequence[Ball], B: AlignedBox, hints: Iterable[np.ndarray] = ()) -> np.ndarray | None:
    """Search for a point common to every ball of ``S`` inside box ``B``.

    Returns a witness whose distance to each center is at most
    ``r_i * (1 + SOLVER_TOL)``, or ``None`` when the search certifies (or,
    on budget exhaustion, assumes) that the intersection is empty.
    ``hints`` are candidate points tried before searching.
    """
    if not S:
        raise InvalidParameterError("find_bisection needs at least one ball")
    if B.is_empty:
        return None
    centers = np.stack([ball.center for ball in S]).astype(np.float64)
    radii = np.array([ball.radius for ball in S], dtype=np.float64)
    return _find_point(centers, radii, B.lo, B.hi, hints)


def _deepest_barrier(centers: np.ndarray, radii: np.ndarray, start: np.ndarray, rel_tol: float) -> np.ndarray:
    """Maximise depth d subject to |x - c_i| <= r_i - d with a log barrier.

    Damped Newton ascent on ``t d + sum log((r_i - d)^2 - |x - c_i|^2)``,
    raising ``t`` until the duality gap ``m / t`` falls below ``rel_tol * min r``.
    """
    m, n = centers.shape
    r_min = float(radii.min())
    x = start.astype(np.float64, copy=True)
    diff = x - centers
    depth = float(np.min(radii - np.sqrt(np.einsum("ij,ij->i", diff, diff)))) - 1e-3 * r_min
    grads = np.empty((m, n + 1))
    sign = np.ones(n + 1)
    sign[n] = -1.0

    def barrier(x, depth):
        diff = x - centers
        u = radii - depth
        s = u * u - np.einsum("ij,ij->i", diff, diff)
        if u.min() <= 0 or s.min() <= 0:
            return -np.inf, diff, u, s
        return float(np.log(s).sum()), diff, u, s

    t = 100.0 * m / r_min
    logs, diff, u, s = barrier(x, depth)
    while True:
        for _ in range(40):
            w = 1.0 / s
            grads[:, :n] = diff
            grads[:, n] = u
            # The gradient of s_i is -2 * grads[i].
            grad = -2.0 * (grads.T @ w)
            grad[n] += t
            hess = -4.0 * (grads.T * (w * w)) @ grads
            hess[np.diag_indices(n + 1)] -= 2.0 * float(w.sum()) * sign
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                break
            gain = float(grad @ step)
            if gain < 1e-6:
                break
            f0 = t * depth + logs
            a = 1.0
            while a > 1e-12:
                nx, nd = x + a * step[:n], depth + a * step[n]
                nlogs, ndiff, nu, ns = barrier(nx, nd)
                if t * nd + nlogs >= f0 + 0.25 * a * gain:
                    break
                a *= 0.5
            else:
                break
            x, depth, logs, diff, u, s = nx, nd, nlogs, ndiff, nu, ns
        if m / t <= rel_tol * r_min:
            return x
        t *= 16.0


def _pair_points(c: np.ndarray, r: float, others: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Deepest point of each two-ball intersection {ball(c, r), ball(others[i], radii[i])}.

    It lies on the segment between the centers where the two margins are equal.
    """
    gap = others - c
    span = np.sqrt(np.einsum("ij,ij->i", gap, gap))
    along = np.clip(0.5 * (span + r - radii), 0.0, span)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, along / span, 0.0)
    return c + frac[:, None] * gap


def deepest_point(centers: np.ndarray, radii: np.ndarray, witness: np.ndarray,
                  rel_tol: float = DEPTH_TOL) -> np.ndarray:
    """Point of the intersection farthest inside every ball (largest inscribed ball center).

    This is the Euclidean counterpart of the cuboid center emitted under the
    infinity norm; in one dimension both are the midpoint of the interval.
    ``witness`` must lie in every ball and is returned if nothing deeper is found.
    """
    m, n = centers.shape
    if m == 1:
        return centers[0].copy()
    if n == 1:
        a = float(np.max(centers[:, 0] - radii))
        b = float(np.min(centers[:, 0] + radii))
        return np.array([0.5 * (a + b)]) if a <= b else witness
    if m == 2:
        point = _pair_points(centers[1], radii[1], centers[:1], radii[:1])[0]
    else:
        # Warm start at the best two-ball answer involving the newest (smallest) ball.
        pairs = _pair_points(centers[-1], radii[-1], centers[:-1], radii[:-1])
        dist = np.sqrt(((pairs[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
        depth = (radii - dist).min(axis=1)
        k = int(np.argmax(depth))
        start = pairs[k] if depth[k] > 0 else witness
        point = _deepest_barrier(centers, radii, start, rel_tol)
    # Any point of the intersection is valid; fall back if rounding pushed it out.
    return point if _max_relative_margin(point, centers, radii) <= 0 else witness


@dataclass(slots=True)
class EucState:
    tau: float
    xi: np.ndarray
    epsilon: float
    u_prev: float
    v1: float | None = None
    v_prev: float = 0.0
    centers: np.ndarray = field(default=None)  # type: ignore[assignment]
    radii: np.ndarray = field(default=None)  # type: ignore[assignment]
    lo: np.ndarray = field(default=None)  # type: ignore[assignment]
    hi: np.ndarray = field(default=None)  # type: ignore[assignment]
    witness: np.ndarray = field(default=None)  # type: ignore[assignment]
    peak_ball_set: int = 0
    emit: str = "witness"

    @property
    def n(self) -> int:
        return self.xi.shape[0]

    @property
    def last_tx(self) -> TransmittedPoint:
        return TransmittedPoint(self.tau, self.xi)

    @property
    def S(self) -> list[Ball]:
        if self.v1 is None:
            return []
        return [Ball(c.copy(), float(r), Norm.EUCLIDEAN) for c, r in zip(self.centers, self.radii)]

    @property
    def B(self) -> AlignedBox:
        if self.v1 is None:
            return AlignedBox.empty(self.n)
        return AlignedBox(self.lo.copy(), self.hi.copy())

    @property
    def ball_count(self) -> int:
        return 0 if self.v1 is None else int(self.radii.shape[0])

    def _open_epoch(self, v: float, z: np.ndarray) -> None:
        self.v1 = self.v_prev = v
        self.centers = z[None, :].copy()
        self.radii = np.array([self.epsilon])
        self.lo = z - self.epsilon
        self.hi = z + self.epsilon
        self.witness = z.copy()
        self.peak_ball_set = max(self.peak_ball_set, 1)

    def _pending_value(self) -> np.ndarray:
        z = self.witness
        if self.emit == "deepest":
            z = deepest_point(self.centers, self.radii, z)
        return self.xi + (self.v_prev / self.v1) * z


def euc_init(first_sample: Sample, epsilon: float, n: int | None = None,
             emit: str = "witness") -> tuple[EucState, TransmittedPoint]:
    """Start a stream; the first sample is transmitted verbatim.

    ``emit`` picks the point sent at each emission: ``"witness"`` is the point
    certified by the last accepting step, ``"deepest"`` the center of the
    largest ball inscribed in the epoch's intersection (see :func:`deepest_point`).
    """
    if emit not in EMIT_POLICIES:
        raise InvalidParameterError(f"emit must be one of {EMIT_POLICIES}, got {emit!r}")
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    x = as_vector(first_sample.x)
    if n is not None and (n < 1 or x.shape[0] != n):
        raise InvalidParameterError(f"sample has dimension {x.shape[0]}, expected n={n}")
    t = float(first_sample.t)
    state = EucState(tau=t, xi=x.copy(), epsilon=float(epsilon), u_prev=t, emit=emit)
    return state, TransmittedPoint(t, x.copy())


def euc_check_and_insert(state: EucState, new_ball: Ball) -> tuple[EucState, bool]:
    """Intersection test for a new, smaller ball against the current set.

    On a ``False`` verdict the state is left exactly as it was.
    """
    if state.v1 is None:
        raise InvalidParameterError("no epoch is open; the first ball seeds the state")
    if new_ball.norm is not Norm.EUCLIDEAN:
        raise InvalidParameterError("the Euclidean backend takes Euclidean balls")
    return state, _insert(state, np.asarray(new_ball.center, dtype=np.float64), float(new_ball.radius))


def _insert(state: EucState, c: np.ndarray, r: float) -> bool:
    radii = state.radii
    # Radii are strictly decreasing in insertion order, so the last is the smallest.
    if not r < radii[-1]:
        raise InvalidParameterError(f"radius {r} does not decrease below {float(radii[-1])}")
    lo, hi = state.lo, state.hi
    w = state.witness
    to_center = c - w
    dw2 = float(to_center @ to_center)
    # The old witness lies in every ball of S, so if it is also in the new
    # ball the verdict is already known and the rejection tests are moot.
    known = dw2 <= r * r
    if not known:
        # Ball outside the bounding box.
        gap = np.minimum(np.maximum(c, lo), hi) - c
        if float(gap @ gap) > r * r:
            return False
    diff = state.centers - c
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    # Some pair does not intersect.
    if not known and (dist > radii + r).any():
        return False
    # Drop every ball that contains the new one; they no longer constrain.
    keep = dist + r > radii
    if keep.all():
        centers = np.concatenate((state.centers, c[None, :]))
        radii = np.concatenate((radii, (r,)))
    else:
        centers = np.concatenate((state.centers[keep], c[None, :]))
        radii = np.concatenate((radii[keep], (r,)))
    lo = np.maximum(lo, c - r)
    hi = np.minimum(hi, c + r)

    if known:
        x = w
    else:
        # Pull the old witness just inside the new ball, toward its center.
        dw = np.sqrt(dw2)
        pulled = w + (1.0 - r * (1.0 - 1e-12) / dw) * to_center
        x = _find_point(centers, radii, lo, hi, (pulled, c))
        if x is None:
            return False
    state.centers, state.radii, state.lo, state.hi, state.witness = centers, radii, lo, hi, x
    if radii.shape[0] > state.peak_ball_set:
        state.peak_ball_set = int(radii.shape[0])
    return True


def euc_step(state: EucState, sample: Sample) -> tuple[EucState, TransmittedPoint | None]:
    t = float(sample.t)
    x = sample.x
    if not t > state.u_prev:
        raise RejectedInputError(f"timestamp {t} does not follow {state.u_prev}")
    if x.shape != state.xi.shape:
        raise InvalidParameterError(f"sample has dimension {x.shape[0]}, stream has {state.n}")
    v = t - state.tau
    z = x - state.xi
    if state.v1 is None:
        state._open_epoch(v, z)
        state.u_prev = t
        return state, None

    scale = state.v1 / v
    if _insert(state, scale * z, scale * state.epsilon):
        state.u_prev, state.v_prev = t, v
        return state, None

    tx = TransmittedPoint(state.u_prev, state._pending_value())
    state.tau, state.xi = tx.tau, tx.xi
    state._open_epoch(t - tx.tau, x - tx.xi)
    state.u_prev = t
    return state, tx


def euc_flush(state: EucState) -> tuple[EucState, TransmittedPoint | None]:
    if state.v1 is None:
        return state, None
    tx = TransmittedPoint(state.u_prev, state._pending_value())
    state.tau, state.xi = tx.tau, tx.xi
    state.v1 = None
    state.v_prev = 0.0
    state.centers = state.radii = state.lo = state.hi = state.witness = None  # type: ignore[assignment]
    return state, tx
