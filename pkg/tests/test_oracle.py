import numpy as np
import pytest

from ltcnd import compress, generate_synthetic, max_reconstruction_error
from ltcnd.errors import InconclusiveOracleError, InvalidParameterError, ResourceCapError
from ltcnd.geometry import AlignedBox, Ball, Norm
from ltcnd.oracle import (
    GridSpec,
    OracleDisagreement,
    Verdict,
    exhaustive_compressor,
    grid_intersect,
    helly_intersect,
    margins,
    refine_intersect,
)

from .conftest import samples_of

E = Norm.EUCLIDEAN


def ball(c, r, norm=E):
    return Ball(np.array(c, dtype=float), float(r), norm)


def grid(balls, res):
    return GridSpec.covering(balls, res)


class TestGrid:
    def test_disjoint(self):
        balls = [ball([0, 0], 1), ball([3, 0], 1)]
        # The boxes are disjoint too, so scan the hull of both instead.
        spec = GridSpec(0.01, AlignedBox(np.array([-1.0, -1.0]), np.array([4.0, 1.0])))
        assert grid_intersect(balls, spec).verdict is Verdict.EMPTY

    def test_single_ball(self):
        b = ball([0.123, -0.456], 1)
        result = grid_intersect([b], grid([b], 0.01))
        assert result.verdict is Verdict.NONEMPTY
        assert np.linalg.norm(result.witness - b.center) <= 0.01 * np.sqrt(2)

    def test_tangent(self):
        balls = [ball([0, 0], 1), ball([2, 0], 1)]
        spec = GridSpec(0.01, AlignedBox(np.array([-1.0, -1.0]), np.array([3.0, 1.0])))
        assert grid_intersect(balls, spec).verdict is Verdict.INDETERMINATE

    def test_witness_verified(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            balls = [ball(rng.normal(0, 0.3, 2), rng.uniform(0.5, 1)) for _ in range(3)]
            result = grid_intersect(balls, grid(balls, 0.02))
            if result.verdict is Verdict.NONEMPTY:
                assert margins(result.witness[None], balls)[0] <= 0

    def test_cap(self):
        b = ball([0, 0, 0], 10)
        with pytest.raises(ResourceCapError):
            grid_intersect([b], grid([b], 0.01))

    def test_mixed_family(self):
        with pytest.raises(InvalidParameterError):
            grid_intersect([ball([0, 0], 1), ball([0, 0], 1, Norm.INFINITY)], grid([ball([0, 0], 1)], 0.1))


class TestHelly:
    def test_pairwise_but_not_triple(self):
        balls = [ball([0, 0], 1.05), ball([2, 0], 1.05), ball([1, 1.7], 1.05)]
        assert grid_intersect(balls, grid(balls, 0.005)).verdict is Verdict.EMPTY
        assert not helly_intersect(balls)

    def test_concentric(self):
        assert helly_intersect([ball([1, 1], r) for r in (1.0, 0.8, 0.5, 0.3)])

    def test_n_plus_one_is_one_grid_call(self):
        balls = [ball([0, 0], 1), ball([1, 0], 1), ball([0.5, 0.5], 0.5)]
        direct = grid_intersect(balls, GridSpec(0.01, GridSpec.covering(balls, 1.0).bounds))
        assert helly_intersect(balls) == (direct.verdict is Verdict.NONEMPTY)

    def test_euclidean_only(self):
        with pytest.raises(InvalidParameterError):
            helly_intersect([ball([0, 0], 1, Norm.INFINITY)])

    def test_agrees_with_full_grid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            balls = [ball(rng.normal(0, 0.5, 2), rng.uniform(0.4, 1.0)) for _ in range(5)]
            full = refine_intersect(balls)
            if full.verdict is Verdict.INDETERMINATE:
                continue
            try:
                assert helly_intersect(balls) == (full.verdict is Verdict.NONEMPTY)
            except InconclusiveOracleError:
                continue


class TestRefine:
    def test_tangent_resolved_or_indeterminate(self):
        balls = [ball([0, 0], 1), ball([2, 0], 1)]
        assert refine_intersect(balls).verdict is not Verdict.EMPTY

    def test_slight_overlap(self):
        balls = [ball([0, 0], 1), ball([1.999, 0], 1)]
        assert refine_intersect(balls).verdict is Verdict.NONEMPTY

    def test_slight_gap(self):
        balls = [ball([0, 0], 1), ball([2.001, 0], 1)]
        assert refine_intersect(balls).verdict is Verdict.EMPTY


class TestExhaustive:
    def test_collinear(self):
        s = generate_synthetic("collinear", 2, 100, seed=1)
        for norm in Norm:
            tx = exhaustive_compressor(samples_of(s.t, s.values), 0.1, norm)
            # Seed plus the closing point of the only epoch.
            assert len(tx) == 2

    def test_forced_emission(self):
        samples = samples_of([0, 1, 2], [[0, 0], [0, 0], [0, 10]])
        for norm in Norm:
            tx = exhaustive_compressor(samples, 1.0, norm)
            assert [p.tau for p in tx] == [0, 1, 2]

    @pytest.mark.parametrize("norm", list(Norm))
    def test_matches_backends(self, norm):
        for seed in range(8):
            s = generate_synthetic("random_walk", 2, 80, seed=seed)
            eps = (0.5, 1.0, 2.0)[seed % 3]
            tx = compress(s.t, s.values, eps, norm)
            ref = exhaustive_compressor(samples_of(s.t, s.values), eps, norm, {p.tau: p.xi for p in tx})
            assert [p.tau for p in ref] == [p.tau for p in tx]
            assert max_reconstruction_error(s.t, s.values, ref, norm) <= eps * (1 + 1e-9)

    def test_bad_anchor_detected(self):
        samples = samples_of([0, 1, 2], [[0, 0], [0, 0], [0, 10]])
        with pytest.raises(OracleDisagreement):
            exhaustive_compressor(samples, 1.0, E, {1.0: np.array([5.0, 5.0])})
