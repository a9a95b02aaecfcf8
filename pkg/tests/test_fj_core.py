import numpy as np
import pytest

from fjlab import (
    CommunityPartition,
    ConvergenceVerdict,
    ProbabilityMatrix,
    RealizedGraph,
    SbmSpec,
    SingularSystemError,
    StubbornnessProfile,
    convergence_condition,
    final_opinions_direct,
    final_opinions_iterative,
    fj_step,
    influence_matrix,
    sample_graph,
    sbm_probability_matrix,
    system_matrix,
)
from fjlab.linalg_kernels import IterationLimitError
from conftest import path_graph_adjacency, random_instance


def two_agent_instance(theta=0.5):
    """Single edge between a stubborn and a non-stubborn agent."""
    g = RealizedGraph(np.array([[0.0, 1.0], [1.0, 0.0]]))
    prof = StubbornnessProfile(CommunityPartition(1, 1), theta)
    return g, prof


class TestStubbornnessProfile:
    def test_two_level_vector(self):
        prof = StubbornnessProfile(CommunityPartition(2, 1), 0.5)
        assert np.array_equal(prof.theta_vector(), [0.5, 0.5, 0.0])

    def test_all_stubborn(self):
        prof = StubbornnessProfile(CommunityPartition(4, 0), 0.3)
        assert np.array_equal(prof.theta_vector(), np.full(4, 0.3))

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_boundary_theta(self, theta):
        with pytest.raises(ValueError, match="theta"):
            StubbornnessProfile(CommunityPartition(1, 1), theta)


class TestFjStep:
    def test_constant_vector_is_fixed_point(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=8, r_s=0.5, p_s=1.0, p_r=1.0, p_sr=1.0))
        g = sample_graph(psi, 0)
        prof = StubbornnessProfile(part, 0.4)
        x = np.full(8, 3.25)
        assert np.allclose(fj_step(x, g, prof, x), x, atol=1e-14)

    def test_two_agent_hand_update(self):
        g, prof = two_agent_instance()
        out = fj_step(np.array([1.0, 0.0]), g, prof, np.array([1.0, 0.0]))
        assert np.allclose(out, [0.5, 1.0], atol=1e-15)

    def test_small_theta_approaches_pure_averaging(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=6, r_s=0.5, p_s=1.0, p_r=1.0, p_sr=1.0))
        g = sample_graph(psi, 1)
        prof = StubbornnessProfile(part, 1e-6)
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 1, 6)
        x0 = rng.uniform(0, 1, 6)
        averaging = (g.adj @ x) / g.degrees
        assert np.max(np.abs(fj_step(x, g, prof, x0) - averaging)) < 1e-5

    def test_zero_degree_agent_named(self):
        adj = np.zeros((3, 3))
        adj[0, 1] = adj[1, 0] = 1.0
        g = RealizedGraph(adj)
        prof = StubbornnessProfile(CommunityPartition(1, 2), 0.5)
        with pytest.raises(ValueError, match="agent 2"):
            fj_step(np.zeros(3), g, prof, np.zeros(3))


class TestSystemMatrix:
    def test_two_agent_hand_matrix(self):
        g, prof = two_agent_instance()
        sys_m = system_matrix(g, prof)
        assert np.array_equal(sys_m.m, [[2.0, -1.0], [-1.0, 1.0]])
        assert sys_m.source == "realized"

    def test_all_stubborn_complete_triangle(self):
        # d_i = 2, theta = 0.5: diagonal 2 + 2 = 4, off-diagonal -1
        adj = np.ones((3, 3)) - np.eye(3)
        prof = StubbornnessProfile(CommunityPartition(3, 0), 0.5)
        sys_m = system_matrix(RealizedGraph(adj), prof)
        assert np.array_equal(sys_m.m, 4.0 * np.eye(3) - adj)

    def test_expected_source_uses_probability_row_sums(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=2, r_s=0.5, p_s=0.9, p_r=0.9, p_sr=0.5))
        prof = StubbornnessProfile(part, 0.5)
        sys_m = system_matrix(psi, prof)
        assert sys_m.source == "expected"
        # expected degree 0.5 each: diagonal (1.0, 0.5), off-diagonal -psi
        assert np.allclose(sys_m.m, [[1.0, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            _, _, prof, graph = random_instance(rng, n_hi=60)
            m = system_matrix(graph, prof).m
            assert np.max(np.abs(m - m.T)) == 0.0

    def test_empty_graph_rejected(self):
        g = RealizedGraph(np.zeros((2, 2)))
        prof = StubbornnessProfile(CommunityPartition(1, 1), 0.5)
        with pytest.raises(ValueError, match="zero"):
            system_matrix(g, prof)


class TestInfluenceMatrix:
    def test_two_agent_hand_value(self):
        g, prof = two_agent_instance()
        sys_p = influence_matrix(system_matrix(g, prof), prof)
        assert np.allclose(sys_p.p, [[1.0, 0.0], [1.0, 0.0]], atol=1e-12)

    def test_full_stubbornness_freezes_opinions(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=5, r_s=1.0, p_s=1.0, p_r=1.0, p_sr=1.0))
        g = sample_graph(psi, 4)
        prof = StubbornnessProfile(CommunityPartition(5, 0), 0.999)
        sys_p = influence_matrix(system_matrix(g, prof), prof)
        assert np.max(np.abs(sys_p.p - np.eye(5))) < 0.01

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            _, _, prof, graph = random_instance(rng, n_hi=60)
            p = influence_matrix(system_matrix(graph, prof), prof).p
            assert p.min() >= -1e-12
            assert np.max(np.abs(p.sum(axis=1) - 1.0)) <= 1e-10

    def test_matches_resolvent_form(self):
        # (I - (I-Theta) D^{-1} A)^{-1} Theta, solved by plain LU, must agree
        rng = np.random.default_rng(29)
        for _ in range(5):
            _, part, prof, graph = random_instance(rng, n_hi=50)
            theta = prof.theta_vector()
            mixing = (1.0 - theta)[:, None] * graph.adj / graph.degrees[:, None]
            reference = np.linalg.solve(np.eye(part.n) - mixing, np.diag(theta))
            p = influence_matrix(system_matrix(graph, prof), prof).p
            assert np.max(np.abs(p - reference)) <= 1e-10

    def test_singular_system_reports_lambda_min(self):
        # isolated non-stubborn pair: M has the component's Laplacian block
        adj = np.zeros((4, 4))
        adj[0, 1] = adj[1, 0] = 1.0
        adj[2, 3] = adj[3, 2] = 1.0
        g = RealizedGraph(adj)
        prof = StubbornnessProfile(CommunityPartition(2, 2), 0.5)
        with pytest.raises(SingularSystemError) as excinfo:
            influence_matrix(system_matrix(g, prof), prof)
        assert abs(excinfo.value.lambda_min) < 1e-10


class TestFinalOpinions:
    def test_two_agent_direct(self):
        g, prof = two_agent_instance()
        sys_m = system_matrix(g, prof)
        x_inf = final_opinions_direct(sys_m, prof, np.array([1.0, 0.0]))
        assert np.allclose(x_inf, [1.0, 1.0], atol=1e-12)

    def test_constant_vector_preserved(self):
        rng = np.random.default_rng(37)
        _, part, prof, graph = random_instance(rng, n_hi=40)
        x0 = np.full(part.n, -2.5)
        x_inf = final_opinions_direct(system_matrix(graph, prof), prof, x0)
        assert np.max(np.abs(x_inf - x0)) <= 1e-10

    def test_convex_hull_of_stubborn_initials(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            _, part, prof, graph = random_instance(rng, n_hi=60)
            x0 = rng.uniform(-5, 5, part.n)
            x_inf = final_opinions_direct(system_matrix(graph, prof), prof, x0)
            lo, hi = x0[: part.n_s].min(), x0[: part.n_s].max()
            assert x_inf.min() >= lo - 1e-10
            assert x_inf.max() <= hi + 1e-10

    def test_two_agent_iterative(self):
        g, prof = two_agent_instance()
        x_inf, iters = final_opinions_iterative(g, prof, np.array([1.0, 0.0]), tol=1e-12)
        assert np.allclose(x_inf, [1.0, 1.0], atol=1e-10)
        assert iters >= 1

    def test_constant_converges_in_one_iteration(self):
        psi, part = sbm_probability_matrix(SbmSpec(n=6, r_s=0.5, p_s=1.0, p_r=1.0, p_sr=1.0))
        g = sample_graph(psi, 3)
        prof = StubbornnessProfile(part, 0.5)
        _, iters = final_opinions_iterative(g, prof, np.full(6, 0.7), tol=1e-12)
        assert iters == 1

    def test_iterative_matches_direct_on_sbm(self):
        rng = np.random.default_rng(43)
        psi, part = sbm_probability_matrix(SbmSpec(n=50, r_s=0.4, p_s=0.5, p_r=0.5, p_sr=0.5))
        prof = StubbornnessProfile(part, 0.5)
        graph = sample_graph(psi, 50)
        x0 = rng.uniform(0, 1, 50)
        direct = final_opinions_direct(system_matrix(graph, prof), prof, x0)
        iterative, _ = final_opinions_iterative(graph, prof, x0, tol=1e-9)
        assert np.max(np.abs(direct - iterative)) <= 1e-8

    def test_iteration_cap_carries_residual(self):
        g, prof = two_agent_instance()
        with pytest.raises(IterationLimitError) as excinfo:
            final_opinions_iterative(g, prof, np.array([1.0, 0.0]), tol=1e-14, max_iters=2)
        assert excinfo.value.residual is not None
        assert excinfo.value.residual > 0


class TestConvergenceCondition:
    def test_path_graph_is_path_pass(self):
        g = RealizedGraph(path_graph_adjacency(3))
        prof = StubbornnessProfile(CommunityPartition(1, 2), 0.5)
        assert convergence_condition(g, prof) is ConvergenceVerdict.PATH_PASS

    def test_complete_graph_is_strict_pass(self):
        adj = np.ones((5, 5)) - np.eye(5)
        prof = StubbornnessProfile(CommunityPartition(1, 4), 0.5)
        assert convergence_condition(RealizedGraph(adj), prof) is ConvergenceVerdict.STRICT_PASS

    def test_isolated_non_stubborn_agent_fails(self):
        adj = np.zeros((3, 3))
        adj[0, 1] = adj[1, 0] = 1.0
        prof = StubbornnessProfile(CommunityPartition(1, 2), 0.5)
        assert convergence_condition(RealizedGraph(adj), prof) is ConvergenceVerdict.FAIL

    def test_all_stubborn_is_strict(self):
        g = RealizedGraph(np.zeros((3, 3)))
        prof = StubbornnessProfile(CommunityPartition(3, 0), 0.5)
        assert convergence_condition(g, prof) is ConvergenceVerdict.STRICT_PASS
