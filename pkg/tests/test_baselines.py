import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influmax import (
    ICN,
    Exact,
    MonteCarlo,
    PageRankConfig,
    ProbabilityModel,
    assign_probabilities,
    build_graph,
    exact_sigma,
    generate_power_law,
    greedy_celf,
    greedy_plain,
    pagerank_scores,
    select_degree,
    select_pagerank,
)
from influmax.exact import optimal_seed_set
from oracles import as_graph, random_digraph


def two_stars():
    return build_graph([(0, i, 1.0) for i in range(1, 11)] + [(11, i, 1.0) for i in range(12, 17)])


def dense_pagerank(g, jump=0.15):
    n = g.node_count
    W = np.zeros((n, n))
    for u, v, p in g.edges():
        W[v, u] += p  # walker moves against influence
    T = np.zeros((n, n))
    for u in range(n):
        s = W[u].sum()
        T[u] = W[u] / s if s > 0 else 1.0 / n
    M = (1 - jump) * T.T + jump / n
    vals, vecs = np.linalg.eig(M)
    x = np.real(vecs[:, np.argmax(np.real(vals))])
    return x / x.sum()


def test_degree_star():
    g = build_graph([(5, i, 1.0) for i in range(5)])
    assert select_degree(g, 1).seeds == [5]


def test_degree_regular_tie():
    g = build_graph([(i, (i + 1) % 6, 0.5) for i in range(6)])
    assert select_degree(g, 2).seeds == [0, 1]


def test_degree_all():
    g = build_graph([(0, 1), (0, 2), (1, 2)], node_count=4)
    assert select_degree(g, 4).seeds == [0, 1, 2, 3]


def test_pagerank_two_cycle():
    r = pagerank_scores(build_graph([(0, 1, 0.3), (1, 0, 0.3)])).r
    assert r.tolist() == pytest.approx([0.5, 0.5], abs=1e-12)


def test_pagerank_edgeless():
    r = pagerank_scores(build_graph([], node_count=5)).r
    assert np.allclose(r, 0.2, atol=1e-15)


def test_pagerank_chain_dense():
    g = build_graph([(0, 1, 0.5), (1, 2, 0.5)])
    assert np.max(np.abs(pagerank_scores(g).r - dense_pagerank(g))) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pagerank_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 30))
    g = as_graph(n, random_digraph(rng, n, 2 * n))
    rv = pagerank_scores(g)
    assert rv.converged
    assert np.all(rv.r >= 0)
    assert abs(rv.r.sum() - 1.0) <= 1e-9
    assert np.max(np.abs(rv.r - dense_pagerank(g))) <= 1e-8


def test_pagerank_points_at_influencers():
    # the walker follows influence backwards, so sources of influence rank high
    g = build_graph([(0, i, 1.0) for i in range(1, 8)])
    assert select_pagerank(g, 1).seeds == [0]


def test_pagerank_config():
    with pytest.raises(ValueError):
        PageRankConfig(jump=1.0)


def test_celf_two_stars():
    assert sorted(greedy_celf(two_stars(), 2, evaluator=Exact()).seeds) == [0, 11]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_celf_first_pick_is_argmax(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    g = as_graph(n, random_digraph(rng, n, int(rng.integers(0, 10))))
    vals = [exact_sigma(g, [u]) for u in range(n)]
    u = greedy_celf(g, 1, evaluator=Exact()).seeds[0]
    assert vals[u] == pytest.approx(max(vals), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_celf_equals_plain_greedy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    g = as_graph(n, random_digraph(rng, n, int(rng.integers(0, 12)), [0.2, 0.5, 0.8]))
    k = int(rng.integers(1, min(n, 4) + 1))
    assert greedy_celf(g, k, evaluator=Exact()).seeds == greedy_plain(g, k, evaluator=Exact()).seeds


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_greedy_bound(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    g = as_graph(n, random_digraph(rng, n, int(rng.integers(0, 12))))
    k = int(rng.integers(1, min(n, 3) + 1))
    s = greedy_celf(g, k, evaluator=Exact())
    _, opt = optimal_seed_set(g, k, lambda S: exact_sigma(g, S))
    assert exact_sigma(g, s.seeds) >= (1 - 1 / math.e) * opt - 1e-12


def test_celf_icn_exact():
    g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (3, 4, 0.5)])
    s = greedy_celf(g, 1, ICN(0.9, 0.0), Exact())
    assert s.seeds == [0]


def test_celf_monte_carlo_deterministic():
    g = assign_probabilities(generate_power_law(60, 3, rng_seed=4), ProbabilityModel("wc"))
    a = greedy_celf(g, 3, evaluator=MonteCarlo(300, 7))
    b = greedy_celf(g, 3, evaluator=MonteCarlo(300, 7))
    assert a.seeds == b.seeds and a.scores == b.scores


def test_selectors_validate_k():
    g = build_graph([(0, 1)])
    for fn in (select_degree, select_pagerank):
        with pytest.raises(ValueError):
            fn(g, 0)
        with pytest.raises(ValueError):
            fn(g, 3)
