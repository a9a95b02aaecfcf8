import math

import numpy as np
import pytest

from fjlab.graph_model import (
    CommunityPartition,
    ProbabilityMatrix,
    RealizedGraph,
    SbmSpec,
    check_assumptions,
    expected_degree_stats,
    realized_degree_stats,
    sample_graph,
    sbm_probability_matrix,
)
from conftest import path_graph_adjacency


class TestProbabilityMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            ProbabilityMatrix(np.array([[0.0, 0.5], [0.4, 0.0]]))

    def test_rejects_self_loops(self):
        with pytest.raises(ValueError, match="diagonal"):
            ProbabilityMatrix(np.array([[0.1, 0.5], [0.5, 0.0]]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            ProbabilityMatrix(np.array([[0.0, 1.5], [1.5, 0.0]]))

    def test_immutable(self):
        psi = ProbabilityMatrix(np.array([[0.0, 0.5], [0.5, 0.0]]))
        with pytest.raises(ValueError):
            psi.psi[0, 1] = 0.9


class TestSbmSpec:
    def test_complete_graph_probabilities(self):
        spec = SbmSpec(n=4, r_s=0.5, p_s=1.0, p_r=1.0, p_sr=1.0)
        psi, part = sbm_probability_matrix(spec)
        expected = np.ones((4, 4)) - np.eye(4)
        assert np.array_equal(psi.psi, expected)
        assert (part.n_s, part.n_r) == (2, 2)

    def test_two_agents_cross_probability(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=2, r_s=0.5, p_s=0.9, p_r=0.9, p_sr=0.3))
        assert psi.psi[0, 1] == psi.psi[1, 0] == 0.3
        assert psi.psi[0, 0] == psi.psi[1, 1] == 0.0

    def test_stubborn_expected_degree_hand_sum(self):
        # (n_s - 1) p_s + n_r p_sr = 4 * 0.2 + 5 * 0.4 = 2.8
        psi, _ = sbm_probability_matrix(SbmSpec(n=10, r_s=0.5, p_s=0.2, p_r=0.6, p_sr=0.4))
        assert psi.psi[0].sum() == pytest.approx(2.8, abs=1e-12)

    def test_rejects_nonpositive_ratio(self):
        with pytest.raises(ValueError, match="r_s"):
            SbmSpec(n=10, r_s=0.0, p_s=0.5, p_r=0.5, p_sr=0.5)

    def test_rounding_half_up_with_floor_one(self):
        assert SbmSpec(n=55, r_s=0.1, p_s=0.5, p_r=0.5, p_sr=0.5).n_s == 6
        assert SbmSpec(n=10, r_s=0.04, p_s=0.5, p_r=0.5, p_sr=0.5).n_s == 1
        assert SbmSpec(n=10, r_s=1.0, p_s=0.5, p_r=0.5, p_sr=0.5).n_s == 10


class TestSampleGraph:
    def test_zero_probability_gives_empty_graph(self):
        psi = ProbabilityMatrix(np.zeros((5, 5)))
        g = sample_graph(psi, 3)
        assert not g.adj.any()
        assert np.array_equal(g.degrees, np.zeros(5))

    def test_unit_probability_gives_complete_graph(self):
        psi, _ = sbm_probability_matrix(SbmSpec(n=6, r_s=0.5, p_s=1.0, p_r=1.0, p_sr=1.0))
        g = sample_graph(psi, 12)
        assert np.array_equal(g.degrees, np.full(6, 5.0))

    def test_deterministic_per_seed(self):
        psi, _ = sbm_probability_matrix(SbmSpec(n=30, r_s=0.5, p_s=0.4, p_r=0.4, p_sr=0.4))
        a = sample_graph(psi, 987654321)
        b = sample_graph(psi, 987654321)
        assert np.array_equal(a.adj, b.adj)
        assert not np.array_equal(a.adj, sample_graph(psi, 987654322).adj)

    def test_symmetry_and_zero_diagonal(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            n = int(rng.integers(3, 40))
            upper = np.triu(rng.random((n, n)), 1)
            psi = ProbabilityMatrix(upper + upper.T)
            g = sample_graph(psi, int(rng.integers(0, 2**63)))
            assert np.array_equal(g.adj, g.adj.T)
            assert not g.adj.diagonal().any()

    def test_pair_frequency_matches_probability(self):
        # fixed pair across 10^4 independent samples at psi = 0.5
        upper = np.triu(np.full((4, 4), 0.5), 1)
        psi = ProbabilityMatrix(upper + upper.T)
        hits = sum(sample_graph(psi, seed).adj[0, 1] for seed in range(10_000))
        assert abs(hits / 10_000 - 0.5) < 0.02

    def test_entrywise_expectation(self):
        rng = np.random.default_rng(57)
        upper = np.triu(rng.random((10, 10)), 1)
        psi = ProbabilityMatrix(upper + upper.T)
        acc = np.zeros((10, 10))
        for seed in range(2000):
            acc += sample_graph(psi, seed).adj
        assert np.max(np.abs(acc / 2000 - psi.psi)) < 0.05


class TestDegreeStats:
    def test_expected_stats_hand_sums(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=10, r_s=0.5, p_s=0.2, p_r=0.6, p_sr=0.4))
        stats = expected_degree_stats(psi, part)
        assert stats.min_stubborn_degree == pytest.approx(2.8, abs=1e-12)
        assert stats.max_stubborn_degree == pytest.approx(2.8, abs=1e-12)
        assert stats.min_cross_degree == pytest.approx(2.0, abs=1e-12)
        assert stats.max_cross_degree == pytest.approx(2.0, abs=1e-12)
        assert stats.max_nonstubborn_degree == pytest.approx(4.4, abs=1e-12)
        assert stats.max_degree == pytest.approx(4.4, abs=1e-12)

    def test_complete_graph_expected_degree(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=7, r_s=0.4, p_s=1.0, p_r=1.0, p_sr=1.0))
        stats = expected_degree_stats(psi, part)
        assert stats.min_stubborn_degree == stats.max_degree == 6.0

    def test_single_cross_pair(self):
        psi = ProbabilityMatrix(np.array([[0.0, 0.3], [0.3, 0.0]]))
        stats = expected_degree_stats(psi, CommunityPartition(1, 1))
        assert stats.min_stubborn_degree == pytest.approx(0.3)
        assert stats.min_cross_degree == pytest.approx(0.3)

    def test_all_stubborn_sentinels(self):
        psi, _ = sbm_probability_matrix(SbmSpec(n=5, r_s=1.0, p_s=0.5, p_r=0.5, p_sr=0.5))
        stats = expected_degree_stats(psi, CommunityPartition(5, 0))
        assert not stats.has_nonstubborn
        assert stats.min_cross_degree == math.inf
        assert stats.max_degree == stats.max_stubborn_degree

    def test_realized_complete_graph(self):
        adj = np.ones((4, 4)) - np.eye(4)
        stats = realized_degree_stats(RealizedGraph(adj), CommunityPartition(2, 2))
        assert stats.min_stubborn_degree == 3.0
        assert stats.min_cross_degree == 2.0

    def test_realized_empty_graph(self):
        stats = realized_degree_stats(RealizedGraph(np.zeros((4, 4))), CommunityPartition(2, 2))
        assert stats.min_stubborn_degree == 0.0
        assert stats.min_cross_degree == 0.0

    def test_realized_path_graph(self):
        # path 0-1-2 with agent 0 stubborn: agent 2 has no stubborn neighbor
        stats = realized_degree_stats(
            RealizedGraph(path_graph_adjacency(3)), CommunityPartition(1, 2)
        )
        assert stats.min_stubborn_degree == 1.0
        assert stats.min_cross_degree == 0.0

    def test_degree_split_consistency(self):
        rng = np.random.default_rng(77)
        psi, part = sbm_probability_matrix(SbmSpec(n=25, r_s=0.3, p_s=0.5, p_r=0.5, p_sr=0.5))
        for _ in range(5):
            g = sample_graph(psi, int(rng.integers(0, 2**63)))
            stats = realized_degree_stats(g, part)
            assert np.array_equal(stats.stubborn_degrees + stats.nonstubborn_degrees, g.degrees)


class TestCheckAssumptions:
    def test_sbm_coverage_passes(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=20, r_s=0.5, p_s=0.1, p_r=0.1, p_sr=0.2))
        report = check_assumptions(psi, part, c1=9.0, c2=9.0)
        assert report.coverage_ok
        assert report.coverage_offenders == ()

    def test_degree_clause_hand_arithmetic(self):
        # uniform psi = 50/99 makes every expected degree exactly 50;
        # 50 >= 10 * log(100) ~ 46.05 under the natural log
        n = 100
        mat = np.full((n, n), 50.0 / 99.0)
        np.fill_diagonal(mat, 0.0)
        psi = ProbabilityMatrix(mat)
        report = check_assumptions(psi, CommunityPartition(50, 50), c1=10.0, c2=10.0)
        assert report.min_stubborn_degree == pytest.approx(50.0, abs=1e-9)
        assert report.stubborn_threshold == pytest.approx(46.05170185988092, abs=1e-9)
        assert report.stubborn_degree_ok

    def test_coverage_failure_lists_agent(self):
        # agent 3 is non-stubborn with zero probability toward both stubborn agents
        mat = np.array(
            [
                [0.0, 0.5, 0.5, 0.0],
                [0.5, 0.0, 0.5, 0.0],
                [0.5, 0.5, 0.0, 0.5],
                [0.0, 0.0, 0.5, 0.0],
            ]
        )
        report = check_assumptions(ProbabilityMatrix(mat), CommunityPartition(2, 2), 9.0, 9.0)
        assert not report.coverage_ok
        assert report.coverage_offenders == (3,)

    def test_rejects_small_constants(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=10, r_s=0.5, p_s=0.5, p_r=0.5, p_sr=0.5))
        with pytest.raises(ValueError, match="exceed 8"):
            check_assumptions(psi, part, c1=8.0, c2=9.0)
