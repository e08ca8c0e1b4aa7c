import numpy as np
import pytest

from pegasus.core.graph import Graph
from pegasus.core.summary import initial_summary
from pegasus.nodes.candidates.shingle import draw_ranks, generate_candidates, node_shingles, shingle
from tests.conftest import A, B, C, D, E

# f(a)=5, f(b)=4, f(c)=3, f(d)=2, f(e)=1
EXAMPLE_RANKS = np.array([5, 4, 3, 2, 1])


def test_shingles_over_closed_neighborhoods(toy_graph):
    summary = initial_summary(toy_graph)
    assert [shingle(summary, toy_graph, EXAMPLE_RANKS, u) for u in (A, B, C, D, E)] == [2, 2, 1, 1, 1]


def test_merged_supernode_shingle_is_member_minimum(toy_graph):
    summary = initial_summary(toy_graph)
    summary.merge(A, C)
    assert shingle(summary, toy_graph, EXAMPLE_RANKS, A) == 1


def test_groups_from_shingles(toy_graph):
    groups = generate_candidates(initial_summary(toy_graph), toy_graph, seed=0, iteration=0, ranks=EXAMPLE_RANKS)
    assert sorted(groups) == [[A, B], [C, D, E]]


def test_ranks_are_a_bijection():
    ranks = draw_ranks(50, np.random.default_rng(1))
    assert sorted(ranks.tolist()) == list(range(1, 51))


def test_candidates_are_deterministic(toy_graph):
    summary = initial_summary(toy_graph)
    first = generate_candidates(summary, toy_graph, seed=11, iteration=3)
    second = generate_candidates(summary, toy_graph, seed=11, iteration=3)
    assert first == second


def test_group_cap_is_enforced():
    # 완전 그래프에서는 모든 shingle 이 같아 재분할로도 쪼개지지 않는다
    n = 20
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    graph = Graph.from_edges(n, edges)
    groups = generate_candidates(initial_summary(graph), graph, seed=0, iteration=0, group_cap=6, shingle_rounds=3)
    assert all(2 <= len(group) <= 6 for group in groups)
    flat = [u for group in groups for u in group]
    assert len(flat) == len(set(flat))
    assert len(flat) >= n - 1


def test_star_group_over_cap_is_chunked():
    # 모든 닫힌 이웃이 허브를 포함하므로 허브 순위가 가장 작으면 한 그룹이 된다
    leaves = 600
    graph = Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
    ranks = np.arange(1, leaves + 2)
    summary = initial_summary(graph)
    groups = generate_candidates(summary, graph, seed=0, iteration=0, ranks=ranks, shingle_rounds=0)
    assert sorted(len(group) for group in groups) == [101, 500]
    assert sorted(u for group in groups for u in group) == list(range(leaves + 1))

    groups = generate_candidates(summary, graph, seed=0, iteration=0)
    assert all(2 <= len(group) <= 500 for group in groups)
    flat = [u for group in groups for u in group]
    assert len(flat) == len(set(flat))


def test_singleton_groups_are_dropped():
    graph = Graph.from_edges(4, [(0, 1), (2, 3)])
    ranks = np.array([1, 2, 3, 4])
    groups = generate_candidates(initial_summary(graph), graph, seed=0, iteration=0, ranks=ranks)
    assert sorted(groups) == [[0, 1], [2, 3]]


def _path_graph() -> Graph:
    return Graph.from_edges(6, [(i, i + 1) for i in range(5)])


def _star_graph() -> Graph:
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@pytest.mark.parametrize(
    "graph_factory, u, v, jaccard",
    [
        (_path_graph, 0, 5, 0.0),
        (_path_graph, 0, 2, 1 / 4),
        (_path_graph, 1, 2, 1 / 2),
        (lambda: Graph.from_edges(5, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)]), 0, 1, 1 / 2),
        (lambda: Graph.from_edges(5, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)]), 2, 3, 3 / 5),
        (lambda: Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]), 0, 1, 1.0),
        (lambda: Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), 0, 3, 0.0),
        (lambda: Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), 0, 2, 1 / 4),
        (lambda: Graph.from_edges(3, [(0, 1), (1, 2)]), 0, 2, 1 / 3),
        (lambda: Graph.from_edges(3, [(0, 1), (1, 2)]), 0, 1, 2 / 3),
        (_path_graph, 0, 1, 2 / 3),
        (_path_graph, 0, 3, 0.0),
        (_path_graph, 2, 3, 1 / 2),
        (_path_graph, 1, 4, 0.0),
        (lambda: Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)]), 0, 1, 1.0),
        (_star_graph, 1, 2, 1 / 3),
        (_star_graph, 0, 1, 1 / 2),
        (lambda: Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), 0, 1, 1 / 2),
        (lambda: Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), 2, 3, 1.0),
        (lambda: Graph.from_edges(4, [(0, 1), (2, 3)]), 0, 2, 0.0),
        (lambda: Graph.from_edges(4, [(0, 1), (2, 3)]), 0, 1, 1.0),
    ],
)
def test_shingle_collision_rate_matches_jaccard(graph_factory, u, v, jaccard):
    graph = graph_factory()
    rng = np.random.default_rng(2024)
    trials = 4000
    hits = 0
    for _ in range(trials):
        values = node_shingles(graph, draw_ranks(graph.node_count, rng))
        hits += int(values[u] == values[v])
    assert hits / trials == pytest.approx(jaccard, abs=0.03)
