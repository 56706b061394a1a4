"""Seeded corpora and the checks run over them.

Each ``check_*`` function runs one experiment end to end and returns a
:class:`CheckResult`; the acceptance tests and the scripts in ``scripts/``
both call these, so a number printed by a script is the number tested.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache, wraps

import numpy as np

from .codec import Backend, Compressor, compress, iter_samples
from .errors import InconclusiveOracleError
from .euclidean import euc_init, euc_step
from .geometry import Ball, Norm, Sample
from .infinity import ltcinf_init, ltcinf_step
from .ltc1d import Ltc1dState, ltc1d_init, ltc1d_step
from .metrics import compute_stats, footprint, max_reconstruction_error
from .oracle import GridSpec, OracleDisagreement, Verdict, exhaustive_compressor, grid_intersect, helly_intersect
from .streams import KINDS, StreamFile, generate_synthetic

BOUND_SLACK = 1e-9
EPS_FACTORS = (0.05, 0.5, 5.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.summary} ({self.elapsed:.1f}s)"


def _timed(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.elapsed = time.perf_counter() - start
        return result
    return wrapper


def signal_sigma(stream: StreamFile) -> float:
    sigma = float(np.std(stream.values))
    return sigma if sigma > 0 else 1.0


def error_corpus(count: int = 200, seed: int = 2024) -> list[StreamFile]:
    """Mixed-kind streams with n in 1..3 and 100..2000 samples."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = KINDS[i % len(KINDS)]
        n = int(rng.integers(1, 4))
        length = int(rng.integers(100, 2001))
        out.append(generate_synthetic(kind, n, length, seed=int(rng.integers(1 << 31))))
    return out


@dataclass(frozen=True)
class ErrorRun:
    stream: int
    backend: str
    epsilon: float
    n_transmitted: int
    max_error: float
    scale: float

    @property
    def slack(self) -> float:
        return BOUND_SLACK * max(self.epsilon, self.scale)

    @property
    def within_bound(self) -> bool:
        return self.max_error <= self.epsilon + self.slack


@lru_cache(maxsize=2)
def error_suite(count: int = 200, seed: int = 2024) -> tuple[tuple[ErrorRun, ...], float]:
    """Run every corpus stream through each backend at three tolerances.

    Returns the runs and the wall time spent compressing and measuring.
    """
    runs = []
    start = time.perf_counter()
    for idx, stream in enumerate(error_corpus(count, seed)):
        sigma = signal_sigma(stream)
        scale = float(np.max(np.abs(stream.values)))
        backends = [Backend.INFINITY, Backend.EUCLIDEAN] + ([Backend.LTC1D] if stream.n == 1 else [])
        for factor in EPS_FACTORS:
            eps = factor * sigma
            for backend in backends:
                norm = Norm.EUCLIDEAN if backend is Backend.EUCLIDEAN else Norm.INFINITY
                tx = compress(stream.t, stream.values, eps, norm, backend)
                err = max_reconstruction_error(stream.t, stream.values, tx, norm)
                runs.append(ErrorRun(idx, backend.value, eps, len(tx), err, scale))
    return tuple(runs), time.perf_counter() - start


@_timed
def check_error_bound(count: int = 200, seed: int = 2024, time_limit: float = 60.0) -> CheckResult:
    """Reconstruction error stays within epsilon on every run."""
    runs, elapsed = error_suite(count, seed)
    bad = [r for r in runs if not r.within_bound]
    worst = max((r.max_error - r.epsilon) / max(r.epsilon, r.scale) for r in runs)
    ok = not bad and elapsed < time_limit
    return CheckResult(
        "error bound", ok,
        f"{len(runs)} runs, {len(bad)} over bound, worst relative excess {worst:.2e}, "
        f"suite time {elapsed:.1f}s (limit {time_limit:.0f}s)",
        details={"violations": bad, "suite_time": elapsed, "worst": worst},
    )


@_timed
def check_oracle_equivalence(count: int = 100, seed: int = 7, min_conclusive: float = 0.9) -> CheckResult:
    """Production emission timestamps equal the exhaustive reference's."""
    rng = np.random.default_rng(seed)
    agree = disagree = inconclusive = 0
    mismatches = []
    for i in range(count):
        n = int(rng.integers(1, 4))
        length = int(rng.integers(30, 301))
        kind = ("random_walk", "sinusoid", "uniform")[i % 3]
        norm = (Norm.INFINITY, Norm.EUCLIDEAN)[i % 2]
        stream = generate_synthetic(kind, n, length, seed=int(rng.integers(1 << 31)))
        eps = (0.5, 1.0, 2.0)[i % 3] * signal_sigma(stream) / 2
        samples = list(iter_samples(stream.t, stream.values))
        tx = compress(stream.t, stream.values, eps, norm)
        try:
            ref = exhaustive_compressor(samples, eps, norm, {p.tau: p.xi for p in tx})
        except InconclusiveOracleError:
            inconclusive += 1
            continue
        except OracleDisagreement as exc:
            disagree += 1
            mismatches.append((i, str(exc)))
            continue
        if [p.tau for p in tx] == [p.tau for p in ref]:
            agree += 1
        else:
            disagree += 1
            mismatches.append((i, "timestamps differ"))
    conclusive = agree + disagree
    ok = disagree == 0 and conclusive >= min_conclusive * count
    return CheckResult(
        "oracle equivalence", ok,
        f"{agree} agree, {disagree} disagree, {inconclusive} inconclusive of {count}",
        details={"mismatches": mismatches},
    )


@_timed
def check_norm_dominance(count: int = 200, seed: int = 2024) -> CheckResult:
    """Infinity norm never transmits more than Euclidean at equal epsilon.

    Each exception is replayed with :func:`anchored_dominance`, which tells a
    genuine early cube emission apart from runs that merely drifted onto
    different anchors.
    """
    runs, _ = error_suite(count, seed)
    table: dict[tuple[int, float], dict[str, int]] = {}
    for r in runs:
        table.setdefault((r.stream, r.epsilon), {})[r.backend] = r.n_transmitted
    exceptions = [(k, v) for k, v in table.items() if v["infinity"] > v["euclidean"]]
    corpus = error_corpus(count, seed)
    epochs = early = 0
    for (idx, eps), _ in exceptions:
        e, x = anchored_dominance(corpus[idx], eps)
        epochs, early = epochs + e, early + x
    return CheckResult(
        "norm dominance", not exceptions,
        f"{len(table)} stream/epsilon pairs, {len(exceptions)} where infinity sends more; "
        f"replayed from the Euclidean anchors, {early} of their {epochs} epochs end earlier under infinity",
        details={"exceptions": exceptions, "anchored_epochs": epochs, "anchored_early": early},
    )


def anchored_dominance(stream: StreamFile, epsilon: float, emit: str = "witness") -> tuple[int, int]:
    """Replay every Euclidean epoch with the infinity backend from the same anchor.

    Returns (epochs, epochs where the infinity run emitted first). Balls are
    subsets of same-radius cubes, so the second number should always be 0.
    """
    samples = list(iter_samples(stream.t, stream.values))
    index = {s.t: k for k, s in enumerate(samples)}
    state, _ = euc_init(samples[0], epsilon, emit=emit)
    anchors = [(0, samples[0].x)]
    for sample in samples[1:]:
        state, tx = euc_step(state, sample)
        if tx is not None:
            anchors.append((index[tx.tau], tx.xi))
    early = 0
    for (start, xi), (end, _) in zip(anchors, anchors[1:]):
        inf, _ = ltcinf_init(Sample(samples[start].t, xi), epsilon)
        for k in range(start + 1, end + 1):
            inf, tx = ltcinf_step(inf, samples[k])
            if tx is not None:
                early += tx.tau < samples[end].t
                break
    return len(anchors) - 1, early


def dominance_exceptions(emit: str = "witness", count: int = 200, seed: int = 2024) -> list[dict]:
    """Corpus runs where infinity transmits more than Euclidean, for one emission policy."""
    out = []
    for idx, stream in enumerate(error_corpus(count, seed)):
        sigma = signal_sigma(stream)
        for factor in EPS_FACTORS:
            eps = factor * sigma
            inf = len(compress(stream.t, stream.values, eps, Norm.INFINITY))
            euc = len(compress(stream.t, stream.values, eps, Norm.EUCLIDEAN, emit=emit))
            if inf > euc:
                out.append({"stream": idx, "n": stream.n, "factor": factor, "infinity": inf, "euclidean": euc})
    return out


def uniform_norm_ratio(n: int, epsilon: float = 0.5, seeds: int = 50, length: int = 1000) -> float:
    """Mean over seeds of ratio_paper(infinity) / ratio_paper(euclidean) on uniform noise."""
    ratios = []
    for seed in range(seeds):
        s = generate_synthetic("uniform", n, length, seed=seed)
        inf = len(s) / len(compress(s.t, s.values, epsilon, Norm.INFINITY))
        euc = len(s) / len(compress(s.t, s.values, epsilon, Norm.EUCLIDEAN))
        ratios.append(inf / euc)
    return float(np.mean(ratios))


@_timed
def check_uniform_ratio(epsilon: float = 0.5, seeds: int = 50) -> CheckResult:
    """The infinity/Euclidean ratio lies in (1, dimension bound * 1.25]."""
    bounds = {2: 4 / math.pi * 1.25, 3: 6 / math.pi * 1.25}
    got = {n: uniform_norm_ratio(n, epsilon, seeds) for n in bounds}
    ok = all(1.0 < got[n] <= bounds[n] for n in bounds)
    text = ", ".join(f"n={n}: {got[n]:.3f} in (1, {bounds[n]:.3f}]" for n in bounds)
    return CheckResult("uniform norm ratio", ok, f"epsilon={epsilon}: {text}", details=got)


def sweep_corpus(seeds: int = 6, length: int = 600, n: int = 3) -> list[StreamFile]:
    return [generate_synthetic(kind, n, length, seed=s) for kind in KINDS for s in range(seeds)]


def ratio_pct(stream: StreamFile, epsilon: float, norm: Norm | str) -> float:
    tx = compress(stream.t, stream.values, epsilon, norm)
    return 100.0 * (1.0 - len(tx) / len(stream))


@_timed
def check_epsilon_monotone(points: int = 10, seeds: int = 6) -> CheckResult:
    """ratio_pct never drops as epsilon grows."""
    exceptions = []
    sweeps = 0
    for idx, stream in enumerate(sweep_corpus(seeds)):
        grid = np.geomspace(0.05, 5.0, points) * signal_sigma(stream)
        for norm in Norm:
            pct = [ratio_pct(stream, e, norm) for e in grid]
            sweeps += 1
            drops = [k for k in range(1, points) if pct[k] < pct[k - 1]]
            if drops:
                exceptions.append((idx, norm.value, drops))
    return CheckResult(
        "epsilon monotonicity", not exceptions,
        f"{sweeps} sweeps of {points} epsilons, {len(exceptions)} with a drop",
        details={"exceptions": exceptions},
    )


@_timed
def check_2d_vs_3d(seeds: int = 6, threshold: float = 0.95) -> CheckResult:
    """Dropping the third column never hurts compression, for most streams."""
    total = wins = 0
    for stream in sweep_corpus(seeds):
        for factor in EPS_FACTORS:
            eps = factor * signal_sigma(stream)
            for norm in Norm:
                total += 1
                wins += ratio_pct(stream.select(["x", "y"]), eps, norm) >= ratio_pct(stream, eps, norm)
    share = wins / total
    return CheckResult(
        "2D vs 3D", share >= threshold,
        f"2D >= 3D on {wins}/{total} ({100 * share:.1f}%, need {100 * threshold:.0f}%)",
        details={"share": share},
    )


def _state_after(count: int, seed: int = 3) -> int:
    rng = np.random.default_rng(seed)
    state, _ = ltcinf_init(Sample(0.0, np.zeros(3)), 0.5)
    values = np.cumsum(rng.normal(0.0, 0.3, (count, 3)), axis=0)
    for k in range(count):
        state, _ = ltcinf_step(state, Sample(float(k + 1), values[k]))
    return footprint(state)


@_timed
def check_constant_memory(short: int = 100, long: int = 100_000) -> CheckResult:
    """Infinity state size does not grow; the Euclidean ball set restarts at each emission."""
    small, large = _state_after(short), _state_after(long)
    stream = generate_synthetic("random_walk", 3, 5000, seed=11)
    state, _ = euc_init(Sample(float(stream.t[0]), stream.values[0]), 0.5 * signal_sigma(stream))
    emissions = after_bad = 0
    for t, x in zip(stream.t[1:], stream.values[1:]):
        state, tx = euc_step(state, Sample(float(t), x))
        if tx is not None:
            emissions += 1
            after_bad += state.ball_count > 1
    ok = small == large and after_bad == 0 and emissions > 0
    return CheckResult(
        "constant memory", ok,
        f"infinity state {small} B after {short} samples, {large} B after {long}; "
        f"euclidean peak |S|={state.peak_ball_set}, {after_bad}/{emissions} emissions left |S|>1",
        details={"small": small, "large": large, "peak": state.peak_ball_set},
    )


def random_family(rng: np.random.Generator, m: int, n: int = 2) -> list[Ball]:
    """Balls clustered enough that both outcomes occur."""
    centers = rng.normal(0.0, 1.0, (m, n))
    radii = rng.uniform(0.8, 2.0, m)
    return [Ball(c, float(r), Norm.EUCLIDEAN) for c, r in zip(centers, radii)]


@_timed
def check_helly_vs_grid(count: int = 50, seed: int = 5, points_per_axis: int = 400) -> CheckResult:
    """Helly subset enumeration agrees with a direct grid test."""
    rng = np.random.default_rng(seed)
    agree = disagree = skipped = 0
    verdicts = {True: 0, False: 0}
    for _ in range(count):
        balls = random_family(rng, int(rng.integers(2, 9)))
        spec = GridSpec.covering(balls, 1.0)
        if spec.bounds.is_empty:
            grid = Verdict.EMPTY
        else:
            side = float(np.max(spec.bounds.hi - spec.bounds.lo))
            grid = grid_intersect(balls, GridSpec(side / points_per_axis, spec.bounds)).verdict
        try:
            helly = helly_intersect(balls)
        except InconclusiveOracleError:
            skipped += 1
            continue
        if grid is Verdict.INDETERMINATE:
            skipped += 1
            continue
        verdicts[helly] += 1
        if helly == (grid is Verdict.NONEMPTY):
            agree += 1
        else:
            disagree += 1
    return CheckResult(
        "helly vs grid", disagree == 0,
        f"{agree} agree, {disagree} disagree, {skipped} inconclusive of {count} "
        f"({verdicts[True]} intersecting, {verdicts[False]} not)",
        details={"verdicts": verdicts},
    )


def lockstep_1d_gap(times, values, epsilon: float) -> float:
    """Largest per-emission gap when the scalar run is re-anchored to the infinity run.

    Both backends start every epoch from the same transmitted point, so the
    figure measures one epoch's rounding only and not its growth across epochs.
    """
    samples = list(iter_samples(times, values))
    inf_state, _ = ltcinf_init(samples[0], epsilon)
    one_state, _ = ltc1d_init(samples[0], epsilon)
    worst = 0.0
    for sample in samples[1:]:
        inf_state, a = ltcinf_step(inf_state, sample)
        one_state, b = ltc1d_step(one_state, sample)
        if (a is None) != (b is None) or (a is not None and a.tau != b.tau):
            return math.inf
        if a is not None:
            worst = max(worst, abs(float(a.xi[0]) - float(b.xi[0])))
            # Re-anchor on the infinity backend's point and replay the opening sample.
            one_state = Ltc1dState(tau=a.tau, xi=float(a.xi[0]), lp=0.0, hp=0.0,
                                   u_prev=a.tau, epsilon=epsilon)
            one_state, _ = ltc1d_step(one_state, sample)
    return worst


def one_d_corpus(count: int = 100, seed: int = 9):
    rng = np.random.default_rng(seed)
    for i in range(count):
        kind = ("random_walk", "sinusoid", "uniform", "collinear", "constant")[i % 5]
        s = generate_synthetic(kind, 1, int(rng.integers(100, 1001)), seed=int(rng.integers(1 << 31)))
        yield s, float(rng.uniform(0.05, 2.0)) * signal_sigma(s)


@_timed
def check_1d_equivalence(count: int = 100, seed: int = 9, tol: float = 1e-12) -> CheckResult:
    """The scalar algorithm and the n=1 infinity backend emit the same points."""
    mismatched, timestamp_diff = [], []
    worst = lock_worst = 0.0
    for i, (s, eps) in enumerate(one_d_corpus(count, seed)):
        a = compress(s.t, s.values, eps, Norm.INFINITY, Backend.LTC1D)
        b = compress(s.t, s.values, eps, Norm.INFINITY, Backend.INFINITY)
        lock_worst = max(lock_worst, lockstep_1d_gap(s.t, s.values, eps))
        if [p.tau for p in a] != [p.tau for p in b]:
            mismatched.append(i)
            timestamp_diff.append(i)
            continue
        gap = max(float(np.max(np.abs(np.atleast_1d(p.xi) - q.xi))) for p, q in zip(a, b))
        worst = max(worst, gap)
        if gap > tol:
            mismatched.append(i)
    return CheckResult(
        "1D equivalence", not mismatched,
        f"{count - len(mismatched)}/{count} identical within {tol:g}, "
        f"{len(timestamp_diff)} with different timestamps, worst value gap {worst:.1e}; "
        f"re-anchored per epoch the worst gap is {lock_worst:.1e}",
        details={"mismatched": mismatched, "timestamps": timestamp_diff,
                 "worst": worst, "lockstep_worst": lock_worst},
    )


ALL_CHECKS = (
    check_error_bound, check_oracle_equivalence, check_norm_dominance, check_uniform_ratio,
    check_epsilon_monotone, check_2d_vs_3d, check_constant_memory, check_helly_vs_grid,
    check_1d_equivalence,
)


def stats_row(stream: StreamFile, epsilon: float, norm: Norm | str) -> dict:
    """One table row: compression and error figures for a single run."""
    comp = Compressor(epsilon, norm)
    start = time.perf_counter()
    tx = []
    for sample in iter_samples(stream.t, stream.values):
        tx.extend(comp.push(sample))
    tx.extend(comp.flush())
    elapsed = time.perf_counter() - start
    stats = compute_stats(stream.t, stream.values, tx, epsilon, norm, elapsed, comp.peak_ball_set)
    return {"epsilon": epsilon, "norm": Norm.parse(norm).value, **stats.__dict__}


__all__ = [
    "ALL_CHECKS", "CheckResult", "EPS_FACTORS", "anchored_dominance", "check_1d_equivalence", "check_2d_vs_3d",
    "check_constant_memory", "check_epsilon_monotone", "check_error_bound", "check_helly_vs_grid",
    "check_norm_dominance", "check_oracle_equivalence", "check_uniform_ratio", "dominance_exceptions",
    "error_corpus", "error_suite", "lockstep_1d_gap", "one_d_corpus", "random_family", "ratio_pct",
    "signal_sigma", "stats_row", "sweep_corpus", "uniform_norm_ratio",
]
