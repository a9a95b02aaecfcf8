"""Shared helpers: random strict-pass instances for property and acceptance tests."""

import numpy as np

from fjlab import (
    CommunityPartition,
    ConvergenceVerdict,
    ProbabilityMatrix,
    SbmSpec,
    StubbornnessProfile,
    convergence_condition,
    sample_graph,
    sbm_probability_matrix,
)


def random_instance(rng, n_lo=20, n_hi=100, raw_psi_share=0.3, theta_lo=0.15, theta_hi=0.85):
    """Draw (psi, partition, profile, graph) with the strict convergence condition.

    Mixes block-constant SBM matrices with fully heterogeneous symmetric
    probability matrices; rejects and redraws until the sampled graph has
    every non-stubborn agent adjacent to a stubborn one.
    """
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        if rng.random() < raw_psi_share:
            upper = rng.uniform(0.15, 0.95, size=(n, n))
            mat = np.triu(upper, k=1)
            psi = ProbabilityMatrix(mat + mat.T)
            n_s = int(rng.integers(max(1, n // 5), max(2, 4 * n // 5)))
            part = CommunityPartition(n_s, n - n_s)
        else:
            spec = SbmSpec(
                n=n,
                r_s=float(rng.uniform(0.2, 0.8)),
                p_s=float(rng.uniform(0.15, 0.9)),
                p_r=float(rng.uniform(0.15, 0.9)),
                p_sr=float(rng.uniform(0.3, 0.9)),
            )
            psi, part = sbm_probability_matrix(spec)
        theta = float(rng.uniform(theta_lo, theta_hi))
        prof = StubbornnessProfile(part, theta)
        graph = sample_graph(psi, int(rng.integers(0, 2**63)))
        if convergence_condition(graph, prof) is ConvergenceVerdict.STRICT_PASS:
            return psi, part, prof, graph


def path_graph_adjacency(n):
    adj = np.zeros((n, n))
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1.0
    return adj
