import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltcnd import Compressor, Sample, compress, generate_synthetic, max_reconstruction_error
from ltcnd.errors import InvalidParameterError, RejectedInputError
from ltcnd.euclidean import (
    SOLVER_TOL,
    deepest_point,
    euc_check_and_insert,
    euc_flush,
    euc_init,
    euc_step,
    find_bisection,
)
from ltcnd.experiments import anchored_dominance
from ltcnd.geometry import AlignedBox, Ball, Norm
from ltcnd.oracle import GridSpec, Verdict, grid_intersect, margins, refine_intersect

from .conftest import samples_of

E = Norm.EUCLIDEAN


def ball(c, r):
    return Ball(np.array(c, dtype=float), float(r), E)


def box(lo, hi):
    return AlignedBox(np.array(lo, dtype=float), np.array(hi, dtype=float))


def state_with(first: Ball):
    """An open epoch whose only ball is ``first`` (v1 = 1, seed at the origin)."""
    state, _ = euc_init(Sample.of(0, np.zeros(first.dim)), first.radius)
    state, tx = euc_step(state, Sample.of(1, first.center))
    assert tx is None
    return state


def rel_margin(x, balls):
    return max((np.linalg.norm(x - b.center) - b.radius) / b.radius for b in balls)


class TestCheckAndInsert:
    def test_outside_box(self):
        state = state_with(ball([0, 0], 1))
        state, ok = euc_check_and_insert(state, ball([3, 0], 0.5))
        assert not ok
        assert len(state.S) == 1 and state.B == box([-1, -1], [1, 1])

    def test_inclusion_pruned(self):
        state = state_with(ball([0, 0], 1))
        state, ok = euc_check_and_insert(state, ball([0.2, 0], 0.5))
        assert ok
        assert len(state.S) == 1 and np.array_equal(state.S[0].center, [0.2, 0])
        assert np.allclose(state.B.lo, [-0.3, -0.5]) and np.allclose(state.B.hi, [0.7, 0.5])
        truth = grid_intersect(state.S, GridSpec.covering(state.S, 0.01))
        assert truth.verdict is Verdict.NONEMPTY
        assert np.linalg.norm(state.witness - [0.2, 0]) <= 0.5

    def test_three_balls_against_grid(self):
        balls = [ball([0, 0], 1), ball([1.8, 0], 0.9), ball([0.9, 1.2], 0.6)]
        state = state_with(balls[0])
        state, ok = euc_check_and_insert(state, balls[1])
        assert ok
        state, ok = euc_check_and_insert(state, balls[2])
        truth = grid_intersect(balls, GridSpec.covering(balls, 0.01))
        assert truth.verdict is not Verdict.INDETERMINATE
        assert ok == (truth.verdict is Verdict.NONEMPTY)

    def test_pair_rejection_leaves_state(self):
        state = state_with(ball([0, 0], 1))
        state, ok = euc_check_and_insert(state, ball([0.6, 0], 0.8))
        assert ok
        before = (state.S, state.B, state.witness.copy())
        # Near the corner of B = [-0.2, 1] x [-0.8, 0.8], so only the pair test rejects it.
        state, ok = euc_check_and_insert(state, ball([-0.1, 0.7], 0.15))
        assert not ok
        assert [b.center.tolist() for b in state.S] == [b.center.tolist() for b in before[0]]
        assert state.B == before[1] and np.array_equal(state.witness, before[2])

    def test_radius_must_decrease(self):
        state = state_with(ball([0, 0], 1))
        with pytest.raises(InvalidParameterError):
            euc_check_and_insert(state, ball([0, 0], 1.0))

    def test_norm_checked(self):
        state = state_with(ball([0, 0], 1))
        with pytest.raises(InvalidParameterError):
            euc_check_and_insert(state, Ball(np.zeros(2), 0.5, Norm.INFINITY))


class TestFindBisection:
    def test_overlapping_pair(self):
        S = [ball([0, 0], 1), ball([1, 0], 1)]
        x = find_bisection(S, box([0, -1], [1, 1]))
        assert x is not None and rel_margin(x, S) <= 1e-9

    def test_tangent_pair(self):
        S = [ball([0, 0], 1), ball([2, 0], 1)]
        x = find_bisection(S, box([1, -1], [1, 1]))
        assert x is not None
        assert rel_margin(x, S) <= 1e-6 and np.allclose(x, [1, 0], atol=1e-4)

    def test_single_ball(self):
        x = find_bisection([ball([2, -1], 0.5)], box([1.5, -1.5], [2.5, -0.5]))
        assert np.allclose(x, [2, -1])

    def test_empty_triple(self):
        S = [ball([0, 0], 1.05), ball([2, 0], 1.05), ball([1, 1.7], 1.05)]
        assert find_bisection(S, box([-1.05, -1.05], [3.05, 2.75])) is None

    def test_needs_balls(self):
        with pytest.raises(InvalidParameterError):
            find_bisection([], box([0], [1]))


def random_insertions(rng, n, m):
    radii = np.sort(rng.uniform(0.2, 1.0, m))[::-1]
    centers = rng.normal(0, 0.6, (m, n))
    return [ball(c, r) for c, r in zip(centers, radii)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_agreement(n):
    rng = np.random.default_rng(100 + n)
    compared = 0
    for _ in range(150):
        balls = random_insertions(rng, n, int(rng.integers(2, 7)))
        state = state_with(balls[0])
        accepted = [balls[0]]
        for b in balls[1:]:
            state, ok = euc_check_and_insert(state, b)
            truth = refine_intersect(accepted + [b])
            if truth.verdict is not Verdict.INDETERMINATE:
                assert ok == (truth.verdict is Verdict.NONEMPTY)
                compared += 1
            if not ok:
                break
            accepted.append(b)
            assert rel_margin(state.witness, accepted) <= SOLVER_TOL
    assert compared >= 150


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 3))
def test_pruning_keeps_intersection(seed, n):
    rng = np.random.default_rng(seed)
    outer = ball(rng.normal(0, 0.2, n), 1.0)
    state = state_with(outer)
    accepted = [outer]
    for r in (0.8, 0.6, 0.45, 0.3):
        b = ball(outer.center + rng.normal(0, 0.15, n), r)
        state, ok = euc_check_and_insert(state, b)
        if ok:
            accepted.append(b)
    probes = outer.center + rng.uniform(-1, 1, (4000, n))
    full = margins(probes, accepted) <= 0
    pruned = margins(probes, state.S) <= 0
    assert np.array_equal(full, pruned)
    # The box keeps every ball ever accepted, pruned or not.
    for b in accepted:
        assert (state.B.lo >= b.center - b.radius - 1e-15).all()
        assert (state.B.hi <= b.center + b.radius + 1e-15).all()


class TestStream:
    def test_constant_stream(self):
        samples = samples_of(range(40), np.tile([1.0, 2.0], (40, 1)))
        state, _ = euc_init(samples[0], 0.3)
        for smp in samples[1:]:
            state, tx = euc_step(state, smp)
            assert tx is None
            assert state.ball_count == 1

    def test_collinear_3d(self):
        direction = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        t = np.arange(1, 200, dtype=float)
        samples = samples_of(np.concatenate(([0.0], t)), np.vstack([np.zeros(3), np.outer(t, direction)]))
        state, _ = euc_init(samples[0], 0.01)
        for smp in samples[1:]:
            state, tx = euc_step(state, smp)
            assert tx is None

    def test_non_monotone(self):
        state, _ = euc_init(Sample.of(0, [0, 0]), 1.0)
        state, _ = euc_step(state, Sample.of(1, [0, 0]))
        with pytest.raises(RejectedInputError):
            euc_step(state, Sample.of(0.5, [0, 0]))

    def test_flush(self):
        state, _ = euc_init(Sample.of(0, [0, 0]), 1.0)
        assert euc_flush(state)[1] is None
        state, _ = euc_step(state, Sample.of(1, [0.4, 0.1]))
        state, tx = euc_flush(state)
        assert tx.tau == 1 and np.allclose(tx.xi, [0.4, 0.1])
        assert euc_flush(state)[1] is None

    @pytest.mark.parametrize("seed", range(0, 100, 5))
    def test_more_emissions_than_infinity(self, seed):
        s = generate_synthetic("random_walk", 2, 300, seed=seed)
        inf = compress(s.t, s.values, 0.5, Norm.INFINITY)
        euc = compress(s.t, s.values, 0.5, Norm.EUCLIDEAN)
        assert len(euc) >= len(inf)


@pytest.mark.parametrize("emit", ["witness", "deepest"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_anchored_epochs_end_no_later(emit, n):
    # From a common anchor the cube epoch always outlasts the round one.
    for seed in range(5):
        s = generate_synthetic("random_walk", n, 400, seed=seed)
        epochs, early = anchored_dominance(s, 0.5, emit)
        assert epochs > 0 and early == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.floats(0.02, 5.0),
       st.sampled_from(["random_walk", "sinusoid", "uniform"]), st.sampled_from(["witness", "deepest"]))
def test_error_bound(seed, n, eps, kind, emit):
    s = generate_synthetic(kind, n, 150, seed=seed)
    tx = compress(s.t, s.values, eps, Norm.EUCLIDEAN, emit=emit)
    scale = max(eps, float(np.abs(s.values).max()))
    assert max_reconstruction_error(s.t, s.values, tx, Norm.EUCLIDEAN) <= eps + 1e-9 * scale


class TestDeepestPoint:
    def test_one_dim_is_midpoint(self):
        c = np.array([[0.0], [0.5], [0.3]])
        r = np.array([1.0, 0.8, 0.6])
        # Interval [max(c - r), min(c + r)] = [-0.3, 0.9].
        assert deepest_point(c, r, np.array([0.0]))[0] == pytest.approx(0.3)

    def test_single_ball(self):
        assert np.array_equal(deepest_point(np.array([[1.0, 2.0]]), np.array([0.5]), np.zeros(2)), [1, 2])

    @pytest.mark.parametrize("seed", range(10))
    def test_inside_and_locally_deepest(self, seed):
        rng = np.random.default_rng(seed)
        n = 2 + seed % 2
        for _ in range(20):
            balls = random_insertions(rng, n, int(rng.integers(2, 7)))
            truth = refine_intersect(balls)
            if truth.verdict is not Verdict.NONEMPTY:
                continue
            c = np.stack([b.center for b in balls])
            r = np.array([b.radius for b in balls])
            x = deepest_point(c, r, truth.witness)
            depth = float(np.min(r - np.linalg.norm(c - x, axis=1)))
            assert depth >= 0
            probes = x + rng.normal(0, 0.05, (200, n))
            around = np.min(r - np.linalg.norm(c[None] - probes[:, None], axis=2), axis=1)
            # Within the solver's relative depth tolerance.
            assert around.max() <= depth * 1.02 + 1e-12


def test_emit_policy_validated():
    with pytest.raises(InvalidParameterError):
        euc_init(Sample.of(0, [0, 0]), 1.0, emit="centroid")
    with pytest.raises(InvalidParameterError):
        Compressor(1.0, "infinity", emit="deepest")
