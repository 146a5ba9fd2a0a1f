import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influmax import (
    GenerationError,
    GraphFormatError,
    ProbabilityError,
    ProbabilityModel,
    assign_probabilities,
    build_graph,
    generate_power_law,
    load_snap_edgelist,
    read_graph,
    write_edgelist,
)

edge_lists = st.lists(
    st.tuples(st.integers(0, 7), st.integers(0, 7), st.floats(0.0, 1.0)),
    max_size=30,
)


def test_two_cycle():
    g = build_graph([(0, 1), (1, 0)])
    assert g.node_count == 2
    assert g.edge_count == 2


def test_undirected_symmetry():
    g = build_graph([(0, 1)], directed=False)
    assert sorted((u, v) for u, v, _ in g.edges()) == [(0, 1), (1, 0)]


def test_duplicate_noisy_or():
    g = build_graph([(0, 1, 0.1), (0, 1, 0.1)])
    assert g.edge_count == 1
    # 1 - 0.9**2
    assert g.probs[0] == pytest.approx(0.19, abs=1e-15)


def test_self_loops_dropped():
    g = build_graph([(0, 0, 0.5), (0, 1, 0.5)])
    assert g.edges() == [(0, 1, 0.5)]


def test_bad_probability():
    with pytest.raises(ProbabilityError):
        build_graph([(0, 1, 1.5)])


def test_relabel_sparse_ids():
    g = build_graph([(10, 500), (500, 7)], relabel=True)
    assert g.node_count == 3
    assert [g.label_of(i) for i in range(3)] == [7, 10, 500]
    assert g.node_of(500) == 2
    with pytest.raises(KeyError):
        g.node_of(11)


def test_wc_in_degree_four():
    g = build_graph([(i, 4) for i in range(4)] + [(4, 5)])
    w = assign_probabilities(g, ProbabilityModel("wc"))
    for u, v, p in w.edges():
        assert p == (0.25 if v == 4 else 1.0)


def test_bivalency_16_values():
    g = generate_power_law(300, 5, rng_seed=3)
    b = assign_probabilities(g, ProbabilityModel.parse("bivalency:16", rng_seed=1))
    assert set(np.unique(b.probs).tolist()) == {0.16, 0.016}


def test_trivalency_values():
    g = generate_power_law(300, 5, rng_seed=3)
    t = assign_probabilities(g, ProbabilityModel.parse("tr"))
    assert set(np.unique(t.probs).tolist()) == {0.1, 0.01, 0.001}


def test_model_parsing():
    assert str(ProbabilityModel.parse("bivalency:4")) == "bivalency:4"
    assert ProbabilityModel.parse("uniform:0.05").p == 0.05
    with pytest.raises(ProbabilityError):
        ProbabilityModel.parse("bivalency:3")
    with pytest.raises(ProbabilityError):
        ProbabilityModel.parse("uniform:2")
    with pytest.raises(ValueError):
        ProbabilityModel.parse("nope")


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_wc_in_edges_sum_to_one(edges):
    g = assign_probabilities(build_graph(edges, node_count=8), ProbabilityModel("wc"))
    sums = np.bincount(g.indices, weights=g.probs, minlength=8)
    deg = g.in_degree
    assert np.all(np.abs(sums[deg > 0] - 1.0) <= 1e-12)


@settings(max_examples=60, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_build_is_order_independent(edges, rnd):
    shuffled = list(edges)
    rnd.shuffle(shuffled)
    a = build_graph(edges, node_count=8)
    b = build_graph(shuffled, node_count=8)
    assert np.array_equal(a.indptr, b.indptr)
    assert np.array_equal(a.indices, b.indices)
    assert np.array_equal(a.probs, b.probs)


def test_snap_comment_and_pair(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# comment\n0 1\n")
    assert load_snap_edgelist(f) == [(0, 1)]


def test_snap_bad_token_line_number(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 x\n")
    with pytest.raises(GraphFormatError) as exc:
        load_snap_edgelist(f)
    assert exc.value.line == 1


def test_snap_large_file_count(tmp_path):
    rng = np.random.default_rng(0)
    pairs = rng.integers(0, 9000, size=(29_000, 2))
    f = tmp_path / "arxiv.txt"
    f.write_text("# FromNodeId\tToNodeId\n" + "".join(f"{u}\t{v}\n" for u, v in pairs))
    assert len(load_snap_edgelist(f)) == 29_000


def test_edgelist_round_trip(tmp_path):
    g = assign_probabilities(generate_power_law(200, 4, rng_seed=2), ProbabilityModel.parse("tr", 5))
    f = tmp_path / "g.txt"
    write_edgelist(g, f)
    h, has_p = read_graph(f)
    assert has_p
    assert h.node_count == g.node_count
    assert np.array_equal(h.indices, g.indices)
    assert np.array_equal(h.probs, g.probs)


def test_generator_edge_count():
    g = generate_power_law(2000, 10, rng_seed=0)
    assert g.edge_count == 20_000
    assert g.node_count == 2000


def test_generator_minimal():
    g = generate_power_law(2, 1, rng_seed=0)
    assert sorted((u, v) for u, v, _ in g.edges()) == [(0, 1), (1, 0)]


def test_generator_simple_graph():
    g = generate_power_law(500, 8, rng_seed=4)
    assert not np.any(g.sources == g.indices)
    pairs = g.sources * g.node_count + g.indices
    assert len(np.unique(pairs)) == g.edge_count


def test_generator_deterministic():
    a = generate_power_law(1000, 6, rng_seed=11)
    b = generate_power_law(1000, 6, rng_seed=11)
    c = generate_power_law(1000, 6, rng_seed=12)
    assert np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)
    assert not np.array_equal(a.indices, c.indices)


def test_generator_infeasible():
    with pytest.raises(GenerationError):
        generate_power_law(5, 10)
