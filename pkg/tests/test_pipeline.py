import math

import numpy as np
import pytest
from scipy.stats import chisquare

from crowdpac.analytic import boosted_majority_error
from crowdpac.filtering import FilterConfig
from crowdpac.geometry import Halfspace, ProblemConfig, random_unit_vector, sample_instances
from crowdpac.oracles import CrowdConfig, CrowdOracle, QueryLedger, vote_sizes
from crowdpac.pipeline import (
    PipelineConstants,
    draw_equal_mixture,
    holdout_error,
    majority_combine,
    overheads,
    phase1,
    phase2,
    phase3,
    rejection_sample_disagreements,
    run_boost,
    run_natural,
    trial_rng,
    weak_sample_size,
)

from conftest import make_rng

PROBLEM = ProblemConfig(dimension=2, target_error=0.04, confidence=1e-3, vc_constant=2.0)
CROWD = CrowdConfig(alpha=0.35, beta=0.35)
NOISELESS = CrowdConfig(alpha=0.5, beta=0.5)
CONSTANTS = PipelineConstants()


def fresh_oracle(crowd, *key):
    rng = make_rng(*key)
    gt = Halfspace(random_unit_vector(2, rng))
    return CrowdOracle(gt, crowd, rng, QueryLedger()), rng


class TestPhase1:
    def test_noiseless_consistent_training(self):
        oracle, rng = fresh_oracle(NOISELESS, 200)
        report = phase1(PROBLEM, CONSTANTS, oracle)
        assert report.flags == []
        assert report.sample_sizes == {"S1": weak_sample_size(PROBLEM)}
        err = holdout_error(report.hypothesis, oracle.ground_truth, PROBLEM, 20_000, rng)
        assert err <= 0.05

    def test_query_accounting(self):
        oracle, _ = fresh_oracle(CROWD, 201)
        report = phase1(PROBLEM, CONSTANTS, oracle)
        k1, k2 = vote_sizes(weak_sample_size(PROBLEM), 1e-3, CROWD)
        assert report.labels_used == oracle.ledger.label_queries
        assert report.comparisons_used == oracle.ledger.comparison_queries
        assert report.labels_used % k2 == 0
        assert report.comparisons_used % k1 == 0

    def test_weak_error_bound_across_seeds(self):
        target = math.sqrt(PROBLEM.target_error)
        ok = 0
        for seed in range(100):
            oracle, rng = fresh_oracle(CROWD, 202, seed)
            report = phase1(PROBLEM, CONSTANTS, oracle)
            err = holdout_error(report.hypothesis, oracle.ground_truth, PROBLEM, 20_000, rng)
            ok += err <= target
        assert ok >= 95


class TestPhase2:
    def test_perfect_h1_takes_degenerate_path(self):
        oracle, _ = fresh_oracle(NOISELESS, 210)
        report = phase2(oracle.ground_truth, PROBLEM, CONSTANTS, FilterConfig(), oracle)
        assert "phase2:no_mistakes_found" in report.flags
        assert report.hypothesis is oracle.ground_truth
        assert report.sample_sizes["W_I"] == 0

    def test_sizes_recorded_and_bounded(self):
        m_sqrt = weak_sample_size(PROBLEM)
        for seed in range(10):
            oracle, _ = fresh_oracle(CROWD, 211, seed)
            h1 = phase1(PROBLEM, CONSTANTS, oracle).hypothesis
            report = phase2(h1, PROBLEM, CONSTANTS, FilterConfig(), oracle)
            sizes = report.sample_sizes
            assert sizes["S2"] == math.ceil(4.0 * math.ceil(m_sqrt / 0.2))
            assert sizes["S_C"] == 2 * m_sqrt
            assert sizes["S_I"] <= 10 * m_sqrt
            assert sizes["W_I"] + sizes["W_C"] == sizes["S_I"] + sizes["S_C"]
            # the agreement side always lands in band at this scale
            assert 0.1 * m_sqrt <= sizes["W_C"] <= 10 * m_sqrt
            if "phase2:no_mistakes_found" not in report.flags:
                assert sizes["W"] == 2 * m_sqrt

    def test_ledger_deltas(self):
        oracle, _ = fresh_oracle(CROWD, 212)
        h1 = phase1(PROBLEM, CONSTANTS, oracle).hypothesis
        before = (oracle.ledger.label_queries, oracle.ledger.comparison_queries)
        report = phase2(h1, PROBLEM, CONSTANTS, FilterConfig(), oracle)
        assert report.labels_used == oracle.ledger.label_queries - before[0]
        assert report.comparisons_used == oracle.ledger.comparison_queries - before[1]


class TestMixture:
    def test_fair_coin_fraction(self):
        rng = make_rng(220)
        wi = (np.arange(20, dtype=float).reshape(10, 2), np.full(10, 1))
        wc = (np.arange(400, dtype=float).reshape(200, 2), np.full(200, -1))
        _, _, mask = draw_equal_mixture(wi, wc, 1000, rng)
        assert abs(mask.mean() - 0.5) <= 0.05

    def test_uniform_within_each_side(self):
        # marginal probability of each member of a side is (1/2) * (1/side size)
        rng = make_rng(221)
        n_i, n_c, draws = 8, 8, 4096
        wi = (np.arange(n_i, dtype=float).reshape(-1, 1), np.full(n_i, 1))
        wc = (100 + np.arange(n_c, dtype=float).reshape(-1, 1), np.full(n_c, -1))
        points, _, _ = draw_equal_mixture(wi, wc, draws, rng)
        values, counts = np.unique(points[:, 0], return_counts=True)
        assert len(values) == n_i + n_c
        result = chisquare(counts)  # uniform over all 16 members
        assert result.pvalue > 1e-4

    def test_empty_side_rejected(self):
        rng = make_rng(222)
        side = (np.ones((3, 2)), np.ones(3))
        empty = (np.empty((0, 2)), np.empty(0))
        with pytest.raises(ValueError):
            draw_equal_mixture(empty, side, 10, rng)


class TestPhase3:
    def test_identical_hypotheses_short_circuit(self):
        oracle, _ = fresh_oracle(CROWD, 230)
        h = oracle.ground_truth
        report = phase3(h, h, PROBLEM, CONSTANTS, oracle)
        assert report.flags == ["phase3:negligible_disagreement"]
        assert report.labels_used == 0 and report.comparisons_used == 0
        assert report.sample_sizes == {"S3": 0, "S3_draws": 0}

    def test_rejection_accepts_only_disagreements(self):
        h1 = Halfspace(np.array([1.0, 0.0]))
        h2 = Halfspace(np.array([0.0, 1.0]))
        rows, _ = rejection_sample_disagreements(h1, h2, PROBLEM, 50, 100_000, make_rng(231))
        assert len(rows) == 50
        assert np.all(h1.predict(rows) != h2.predict(rows))

    def test_draw_count_tracks_disagreement_mass(self):
        # mass 0.3 on the sphere -> about m/0.3 draws to accept m instances
        theta = 0.3 * math.pi
        h1 = Halfspace(np.array([1.0, 0.0]))
        h2 = Halfspace(np.array([math.cos(theta), math.sin(theta)]))
        target = weak_sample_size(PROBLEM)
        draws = []
        for seed in range(25):
            _, drawn = rejection_sample_disagreements(
                h1, h2, PROBLEM, target, 10**6, make_rng(232, seed)
            )
            draws.append(drawn)
        expected = target / 0.3
        assert abs(np.mean(draws) / expected - 1.0) <= 0.2

    def test_budget_exhaustion_falls_back(self):
        # nearly identical hypotheses: the disagreement region is unsampleable
        h1 = Halfspace(np.array([1.0, 0.0]))
        h2 = Halfspace(np.array([1.0, 1e-12]))
        oracle, _ = fresh_oracle(CROWD, 233)
        report = phase3(h1, h2, PROBLEM, CONSTANTS, oracle)
        assert "phase3:negligible_disagreement" in report.flags
        assert report.hypothesis is h1
        assert report.labels_used == 0 and report.comparisons_used == 0

    def test_normal_path_trains_on_region(self):
        theta = 0.3 * math.pi
        h1 = Halfspace(np.array([1.0, 0.0]))
        h2 = Halfspace(np.array([math.cos(theta), math.sin(theta)]))
        oracle, _ = fresh_oracle(NOISELESS, 234)
        report = phase3(h1, h2, PROBLEM, CONSTANTS, oracle)
        assert report.flags == []
        assert report.sample_sizes["S3"] == weak_sample_size(PROBLEM)
        assert report.labels_used > 0 and report.comparisons_used > 0


class _FixedErrorVoter:
    """Predictor wrong on a fixed random subset of query points."""

    def __init__(self, truth, p, seed):
        self.truth = truth
        self.p = p
        self.rng = make_rng(240, seed)

    def predict(self, points):
        labels = self.truth.predict(points)
        flip = self.rng.random(len(points)) < self.p
        return np.where(flip, -labels, labels)


class TestMajorityCombine:
    def test_identical_voters_reduce_to_one(self):
        h = Halfspace(np.array([1.0, 2.0]))
        combined = majority_combine(h, h, h)
        points = make_rng(241).standard_normal((500, 2))
        assert np.array_equal(combined.predict(points), h.predict(points))

    def test_two_against_one(self):
        plus = Halfspace(np.array([1.0, 0.0]))
        minus = Halfspace(np.array([-1.0, 0.0]))
        combined = majority_combine(plus, plus, minus)
        assert combined.predict(np.array([[1.0, 0.0]]))[0] == 1

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            majority_combine(
                Halfspace(np.array([1.0])),
                Halfspace(np.array([1.0, 0.0])),
                Halfspace(np.array([1.0, 0.0])),
            )

    @pytest.mark.parametrize("p", [0.1, 0.2, 0.3])
    def test_independent_voter_identity(self, p):
        truth = Halfspace(np.array([1.0, 0.0]))
        voters = [_FixedErrorVoter(truth, p, s) for s in range(3)]
        combined = majority_combine(*voters)
        points = sample_instances(PROBLEM, 100_000, make_rng(242, int(p * 10)))
        err = np.mean(combined.predict(points) != truth.predict(points))
        assert abs(err - boosted_majority_error(p)) <= 0.01


class TestOverheads:
    def test_zero_counts(self):
        assert overheads(0, 0, PROBLEM) == (0.0, 0.0)

    def test_unit_labeling_overhead(self):
        from crowdpac.pipeline import reference_sample_size

        m_ref = reference_sample_size(PROBLEM)
        lam_l, _ = overheads(m_ref, 0, PROBLEM)
        assert lam_l == pytest.approx(1.0)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            overheads(-1, 0, PROBLEM)


class TestRuns:
    def test_boost_deterministic_per_seed(self):
        a = run_boost(PROBLEM, CROWD, CONSTANTS, FilterConfig(), 11, 20_000)
        b = run_boost(PROBLEM, CROWD, CONSTANTS, FilterConfig(), 11, 20_000)
        assert a.holdout_error == b.holdout_error
        assert a.label_queries == b.label_queries
        assert a.comparison_queries == b.comparison_queries
        for pa, pb in zip(a.phase_reports, b.phase_reports):
            assert np.array_equal(pa.hypothesis.weights, pb.hypothesis.weights)
            assert pa.sample_sizes == pb.sample_sizes

    def test_boost_noiseless_reaches_target(self):
        report = run_boost(PROBLEM, NOISELESS, CONSTANTS, FilterConfig(), 3, 20_000)
        assert report.holdout_error <= PROBLEM.target_error

    def test_boost_ledger_conservation(self):
        report = run_boost(PROBLEM, CROWD, CONSTANTS, FilterConfig(), 5, 20_000)
        assert report.label_queries == sum(p.labels_used for p in report.phase_reports)
        assert report.comparison_queries == sum(p.comparisons_used for p in report.phase_reports)

    def test_natural_noiseless_consistent_and_accurate(self):
        # a consistent halfspace still differs from the truth on a thin
        # wedge, so the holdout error is small but not exactly zero
        report = run_natural(PROBLEM, NOISELESS, CONSTANTS, 3, 20_000)
        assert report.flags == []
        assert report.holdout_error <= 0.01

    def test_natural_labeling_overhead_decreases_with_epsilon(self):
        means = {}
        for eps in (0.1, 0.025):
            problem = ProblemConfig(dimension=2, target_error=eps, vc_constant=2.0)
            values = [
                run_natural(problem, CROWD, CONSTANTS, seed, 1_000).labeling_overhead
                for seed in range(5)
            ]
            means[eps] = np.mean(values)
        assert means[0.025] < means[0.1]

    def test_natural_comparison_overhead_grows(self):
        means = {}
        for eps in (0.1, 0.025):
            problem = ProblemConfig(dimension=2, target_error=eps, vc_constant=2.0)
            values = [
                run_natural(problem, CROWD, CONSTANTS, seed, 1_000).comparison_overhead
                for seed in range(5)
            ]
            means[eps] = np.mean(values)
        assert means[0.025] > means[0.1]

    def test_boost_comparison_overhead_stable(self):
        means = {}
        for eps in (0.1, 0.04):
            problem = ProblemConfig(dimension=2, target_error=eps, vc_constant=2.0)
            values = [
                run_boost(problem, CROWD, CONSTANTS, FilterConfig(), seed, 1_000).comparison_overhead
                for seed in range(5)
            ]
            means[eps] = np.mean(values)
        assert 0.5 <= means[0.04] / means[0.1] <= 2.5

    def test_distinct_streams_per_algorithm(self):
        boost_rng = trial_rng(7, "boost")
        natural_rng = trial_rng(7, "natural")
        assert boost_rng.random() != natural_rng.random()
