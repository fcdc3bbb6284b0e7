import numpy as np
import pytest

from oracles import entropic_min_2x2, lp_vertex_values, sinkhorn_plain
from ovtas.core import SimilarityMatrix
from ovtas.smts import (
    HyperParams,
    build_cost,
    decode,
    segment_video,
    sinkhorn,
    temporal_prior,
)

# Fixed 4x3 cost with a unique transport optimum (verified against the
# vertex-enumeration oracle below).
COST_4X3 = np.array(
    [
        [0.9, 0.1, 0.5],
        [0.2, 0.8, 0.7],
        [0.6, 0.3, 0.1],
        [0.4, 0.9, 0.2],
    ]
)


class TestHyperParams:
    def test_defaults(self):
        hp = HyperParams()
        assert hp.epsilon == 0.07
        assert hp.rho == 0.04
        assert hp.max_iters == 1000
        assert hp.tol == 1e-6

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": 0.0},
            {"epsilon": -1.0},
            {"rho": -0.1},
            {"max_iters": 0},
            {"tol": 0.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            HyperParams(**kwargs)


class TestTemporalPrior:
    def test_two_by_two(self):
        assert np.allclose(temporal_prior(2, 2), [[0.0, 0.5], [0.5, 0.0]])

    def test_one_by_one(self):
        assert np.allclose(temporal_prior(1, 1), [[0.0]])

    def test_four_by_two_entry(self):
        prior = temporal_prior(4, 2)
        assert prior[3, 0] == pytest.approx(0.75)

    def test_range(self):
        prior = temporal_prior(13, 7)
        assert prior.min() >= 0.0
        assert prior.max() < 1.0


class TestBuildCost:
    def test_all_ones_similarity_zero_cost(self):
        sim = SimilarityMatrix(np.ones((3, 2)))
        cost = build_cost(sim, temporal_prior(3, 2), rho=0.0)
        assert np.allclose(cost, 0.0)

    def test_rho_zero_is_one_minus_similarity(self):
        rng = np.random.default_rng(1)
        values = rng.uniform(-1, 1, size=(5, 3))
        sim = SimilarityMatrix(values)
        cost = build_cost(sim, temporal_prior(5, 3), rho=0.0)
        assert np.allclose(cost, 1.0 - values)

    def test_prior_term(self):
        sim = SimilarityMatrix(np.zeros((2, 2)))
        cost = build_cost(sim, temporal_prior(2, 2), rho=1.0)
        assert np.allclose(cost, [[1.0, 1.5], [1.5, 1.0]])

    def test_shape_mismatch(self):
        sim = SimilarityMatrix(np.zeros((2, 2)))
        with pytest.raises(ValueError, match="shape"):
            build_cost(sim, temporal_prior(3, 2), rho=0.5)


class TestSinkhorn:
    def test_constant_cost_gives_outer_product(self):
        for t, n in [(2, 2), (5, 3), (1, 4)]:
            res = sinkhorn(np.full((t, n), 0.7), HyperParams(epsilon=0.3))
            expected = np.full((t, n), 1.0 / (t * n))
            assert np.abs(res.plan.mass - expected).max() < 1e-9
            assert res.converged

    def test_2x2_closed_form_and_scan_oracle(self):
        cost = np.array([[0.0, 1.0], [1.0, 0.0]])
        epsilon = 0.07
        res = sinkhorn(cost, HyperParams(epsilon=epsilon, max_iters=5000, tol=1e-12))
        mass = res.plan.mass
        # Symmetric plan [[a, b], [b, a]] with a + b = 0.5.
        assert mass[0, 0] == pytest.approx(mass[1, 1], rel=1e-10)
        assert mass[0, 1] == pytest.approx(mass[1, 0], rel=1e-10)
        assert mass[0, 0] + mass[0, 1] == pytest.approx(0.5, abs=1e-10)
        ratio = mass[0, 1] / mass[0, 0]
        assert ratio == pytest.approx(np.exp(-1.0 / epsilon), rel=1e-8)
        # Independent check: direct minimization over the 1-D polytope.
        oracle = entropic_min_2x2(cost, epsilon)
        assert np.abs(mass - oracle).max() < 1e-8

    def test_3x2_matches_plain_fixed_point_at_10x_iters(self):
        rng = np.random.default_rng(9)
        cost = rng.random((3, 2))
        res = sinkhorn(cost, HyperParams(epsilon=0.5, max_iters=500, tol=1e-13))
        oracle = sinkhorn_plain(cost, 0.5, iters=res.iterations * 10)
        assert np.abs(res.plan.mass - oracle).max() < 1e-6

    def test_feasibility_random_costs(self):
        rng = np.random.default_rng(31)
        hp = HyperParams(epsilon=0.1, max_iters=5000, tol=1e-7)
        for _ in range(25):
            t = int(rng.integers(2, 65))
            n = int(rng.integers(2, 17))
            res = sinkhorn(rng.random((t, n)), hp)
            assert res.converged
            assert res.plan.marginal_violation() < hp.tol

    def test_gibbs_rank_one_structure(self):
        rng = np.random.default_rng(37)
        for epsilon in (0.05, 0.5):
            cost = rng.random((12, 5))
            res = sinkhorn(cost, HyperParams(epsilon=epsilon, max_iters=5000))
            log_plan = np.log(res.plan.mass)
            pattern = log_plan + cost / epsilon
            residual = (
                pattern
                - pattern.mean(axis=1, keepdims=True)
                - pattern.mean(axis=0, keepdims=True)
                + pattern.mean()
            )
            assert np.abs(residual).max() < 1e-5

    def test_entropic_limit_approaches_lp_optimum(self):
        vertex_values = lp_vertex_values(COST_4X3, np.full(4, 0.25), np.full(3, 1 / 3))
        lp_value = vertex_values[0]
        # Unique optimum: next-best vertex is strictly worse.
        others = [v for v in vertex_values if v > lp_value + 1e-9]
        assert others and min(others) > lp_value + 1e-3

        transport_costs = []
        for epsilon in (0.5, 0.05, 0.005):
            res = sinkhorn(
                COST_4X3, HyperParams(epsilon=epsilon, max_iters=100000, tol=1e-10)
            )
            assert res.converged
            transport_costs.append(float((res.plan.mass * COST_4X3).sum()))
        assert transport_costs[0] > transport_costs[1] > transport_costs[2]
        assert transport_costs[2] >= lp_value - 1e-9
        assert (transport_costs[2] - lp_value) / lp_value < 0.01

    def test_column_permutation_equivariance(self):
        rng = np.random.default_rng(41)
        cost = rng.random((9, 6))
        perm = rng.permutation(6)
        hp = HyperParams(epsilon=0.2, max_iters=5000, tol=1e-9)
        base = sinkhorn(cost, hp).plan.mass
        permuted = sinkhorn(cost[:, perm], hp).plan.mass
        assert np.abs(permuted - base[:, perm]).max() < 1e-9

    def test_nonconvergence_reports_violation(self):
        rng = np.random.default_rng(43)
        res = sinkhorn(rng.random((20, 6)), HyperParams(epsilon=0.01, max_iters=1))
        assert not res.converged
        assert res.iterations == 1
        assert np.isfinite(res.marginal_violation)

    def test_rejects_nan_cost(self):
        with pytest.raises(ValueError, match="non-finite"):
            sinkhorn(np.array([[np.nan, 0.0], [0.0, 1.0]]), HyperParams())


class TestDecode:
    def test_row_argmax(self):
        from ovtas.core import TransportPlan

        mass = np.array([[0.1, 0.4, 0.0], [0.3, 0.1, 0.1]])
        labels = decode(TransportPlan(mass)).labels
        assert labels.tolist() == [1, 0]

    def test_tie_breaks_low_index(self):
        from ovtas.core import TransportPlan

        mass = np.array([[0.25, 0.25], [0.25, 0.25]])
        labels = decode(TransportPlan(mass)).labels
        assert labels.tolist() == [0, 0]

    def test_uniform_plan_all_zero(self):
        res = sinkhorn(np.full((4, 3), 1.0), HyperParams(epsilon=0.3))
        assert decode(res.plan).labels.tolist() == [0, 0, 0, 0]


def block_similarity(frames_per_block, num_actions, high=0.9, low=0.1):
    rows = []
    for action in range(num_actions):
        row = np.full(num_actions, low)
        row[action] = high
        rows.extend([row] * frames_per_block)
    return SimilarityMatrix(np.array(rows))


class TestSegmentVideo:
    def test_stage2_ablation_one_hot(self):
        values = np.full((4, 3), 0.1)
        targets = [2, 0, 1, 2]
        for t, n in enumerate(targets):
            values[t, n] = 0.9
        result = segment_video(
            SimilarityMatrix(values), HyperParams(), ablate_stage2=True
        )
        assert result.labeling.labels.tolist() == targets
        assert result.solver is None

    def test_block_diagonal_two_segments(self):
        sim = block_similarity(5, 2)
        # Well-separated blocks equilibrate slowly across the tiny coupling
        # terms, so give the solver room when asserting convergence.
        result = segment_video(sim, HyperParams(max_iters=20000))
        assert result.labeling.labels.tolist() == [0] * 5 + [1] * 5
        assert result.solver is not None and result.solver.converged

    def test_block_diagonal_labels_correct_even_unconverged(self):
        sim = block_similarity(5, 2)
        result = segment_video(sim, HyperParams())
        assert result.labeling.labels.tolist() == [0] * 5 + [1] * 5

    def test_prior_ablation_matches_on_strong_blocks(self):
        sim = block_similarity(6, 3)
        with_prior = segment_video(sim, HyperParams())
        without_prior = segment_video(sim, HyperParams(), ablate_prior=True)
        assert np.array_equal(
            with_prior.labeling.labels, without_prior.labeling.labels
        )

    def test_single_action_skips_solver(self):
        sim = SimilarityMatrix(np.zeros((7, 1)))
        result = segment_video(sim, HyperParams())
        assert result.labeling.labels.tolist() == [0] * 7
        assert result.solver is None

    def test_action_order_round_trip(self):
        sim = block_similarity(5, 3)
        order = np.array([2, 0, 1])
        shuffled = segment_video(sim, HyperParams(), action_order=order)
        # Labels come back in the caller's action space regardless of order.
        assert shuffled.labeling.labels.tolist() == [0] * 5 + [1] * 5 + [2] * 5

    def test_bad_action_order_rejected(self):
        sim = block_similarity(2, 2)
        with pytest.raises(ValueError, match="permutation"):
            segment_video(sim, HyperParams(), action_order=np.array([0, 0]))

    def test_decode_determinism(self):
        rng = np.random.default_rng(51)
        sim = SimilarityMatrix(rng.uniform(-1, 1, size=(30, 4)))
        first = segment_video(sim, HyperParams())
        second = segment_video(sim, HyperParams())
        assert np.array_equal(first.labeling.labels, second.labeling.labels)
