import numpy as np
import pytest

from pegasus.config import EngineConfig
from pegasus.core.graph import Graph, graph_size_bits
from pegasus.core.personalization import TargetSet
from pegasus.core.summary import initial_summary, reconstruct_edges
from pegasus.errors import InvalidNodeError, ParameterError
from pegasus.pipeline.build_pipeline import summarize
from pegasus.query.engine import (
    GraphSource,
    SummarySource,
    get_neighbors,
    hop_query,
    php_query,
    run_query,
    rwr_query,
)
from tests.conftest import A, B, C, D, E, random_connected_graph


def test_neighbors_from_summary(exact_summary):
    assert get_neighbors(exact_summary, A).tolist() == [C, D]
    # {c,d} 에 self-loop 가 없으므로 d 는 c 의 이웃이 아니다
    assert get_neighbors(exact_summary, C).tolist() == [A, B, E]


def test_neighbors_with_self_loop(crossed_summary):
    assert get_neighbors(crossed_summary, A).tolist() == [B, C, D]
    assert get_neighbors(crossed_summary, E).tolist() == []


def test_neighbors_invalid_node(exact_summary):
    with pytest.raises(InvalidNodeError):
        get_neighbors(exact_summary, 7)


def test_hop_on_graph_and_exact_summary(toy_graph, exact_summary):
    assert hop_query(toy_graph, A).values.tolist() == [0, 2, 1, 1, 2]
    assert hop_query(exact_summary, A).values.tolist() == [0, 2, 1, 1, 2]


def test_hop_unreachable_uses_max_distance():
    graph = Graph.from_edges(4, [(0, 1), (1, 2)])
    assert hop_query(graph, 0).values.tolist() == [0, 1, 2, 2]


def test_rwr_two_nodes():
    graph = Graph.from_edges(2, [(0, 1)])
    answer = rwr_query(graph, 0, walk_prob=0.95)
    assert answer.converged
    assert answer.values[0] == pytest.approx(1 / 1.95, abs=1e-9)
    assert answer.values[1] == pytest.approx(0.95 / 1.95, abs=1e-9)


def test_php_path():
    graph = Graph.from_edges(3, [(0, 1), (1, 2)])
    answer = php_query(graph, 0, c=0.95)
    middle = 0.475 / (1 - 0.95 ** 2 / 2)
    assert answer.values[0] == 1.0
    assert answer.values[1] == pytest.approx(middle, abs=1e-8)
    assert answer.values[2] == pytest.approx(0.95 * middle, abs=1e-8)


def test_initial_summary_matches_raw_graph():
    for seed in range(20):
        graph = random_connected_graph(seed, n=30)
        summary = initial_summary(graph)
        q = seed % graph.node_count
        assert np.array_equal(hop_query(summary, q).values, hop_query(graph, q).values)
        for kind in ("rwr", "php"):
            exact = run_query(graph, q, kind).values
            approx = run_query(summary, q, kind).values
            assert np.max(np.abs(exact - approx)) < 1e-9


def test_summary_aggregation_matches_reconstruction(crossed_summary):
    restored = GraphSource(reconstruct_edges(crossed_summary))
    source = SummarySource(crossed_summary)
    x = np.arange(1.0, 6.0)
    assert np.allclose(source.aggregate(x), restored.aggregate(x))
    assert np.allclose(source.degree_vector(), restored.degree_vector())
    for q in range(5):
        assert source.hop_levels(q).tolist() == restored.hop_levels(q).tolist()


def test_rwr_on_summary_is_a_distribution():
    graph = random_connected_graph(4, n=80)
    summary = summarize(graph, TargetSet.of([0], graph.node_count),
                        EngineConfig(budget_bits=0.5 * graph_size_bits(graph), seed=2))
    answer = rwr_query(summary, 0)
    assert answer.values.sum() == pytest.approx(1.0, abs=1e-6)
    assert np.all(answer.values >= 0)


def test_top_k(toy_graph):
    answer = rwr_query(toy_graph, A)
    top = answer.top(3)
    assert len(top) == 3
    values = [value for _, value in top]
    assert values == sorted(values, reverse=True)


def test_query_errors(toy_graph):
    with pytest.raises(InvalidNodeError):
        rwr_query(toy_graph, 5)
    with pytest.raises(ParameterError):
        rwr_query(toy_graph, 0, walk_prob=1.0)
    with pytest.raises(ParameterError):
        php_query(toy_graph, 0, c=0.0)
    with pytest.raises(ParameterError):
        run_query(toy_graph, 0, "pagerank")


def test_non_convergence_is_reported(toy_graph):
    answer = rwr_query(toy_graph, A, max_iters=2)
    assert not answer.converged
    assert answer.iterations == 2
