import json

import numpy as np
import pytest

from pegasus.config import EngineConfig
from pegasus.core.graph import Graph, graph_size_bits
from pegasus.distributed.deployment import (
    GeneratorSpec,
    Scenario,
    answer_multi,
    build_deployment_subgraphs,
    build_deployment_summaries,
    closest_edges,
    load_deployment,
    load_scenario,
    run_distsim,
    save_deployment,
    score_records,
)
from pegasus.core.generators import to_networkx
from pegasus.distributed.partition import LABEL_PROPAGATION_ROUNDS, label_propagation, partition, routing_table
from pegasus.errors import ParameterError
from tests.conftest import random_connected_graph


def _two_cliques(size: int = 50) -> Graph:
    edges = [(u, v) for u in range(size) for v in range(u + 1, size)]
    edges += [(u + size, v + size) for u, v in edges]
    edges.append((0, size))
    return Graph.from_edges(2 * size, edges)


def _path(n: int = 5) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# ── 분할 ─────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("method", ["label_propagation", "louvain"])
def test_partition_recovers_cliques(method):
    parts = partition(_two_cliques(), 2, method=method, seed=0)
    assert sorted(len(p) for p in parts) == [50, 50]
    for part in parts:
        left = sum(1 for u in part if u < 50)
        assert max(left, len(part) - left) >= 49


def test_partition_covers_all_nodes():
    graph = random_connected_graph(2, n=40)
    parts = partition(graph, 3, seed=1)
    assert len(parts) == 3
    assert all(parts)
    assert sorted(u for p in parts for u in p) == list(range(40))


def test_partition_parameter_errors(toy_graph):
    with pytest.raises(ParameterError):
        partition(toy_graph, 0)
    with pytest.raises(ParameterError):
        partition(toy_graph, 6)
    assert partition(toy_graph, 1) == [[0, 1, 2, 3, 4]]


def test_label_propagation_stops_at_round_cap():
    # 첫 라운드에는 모든 라벨이 서로 달라 반드시 라벨이 바뀌므로 수렴하지 않은 채 멈춘다
    communities, rounds = label_propagation(to_networkx(_path(20)), np.random.default_rng(0), max_rounds=1)
    assert rounds == 1
    assert sorted(u for c in communities for u in c) == list(range(20))


def test_label_propagation_is_bounded_and_seeded():
    nx_graph = to_networkx(random_connected_graph(3, n=200))
    first, rounds = label_propagation(nx_graph, np.random.default_rng(5))
    second, _ = label_propagation(nx_graph, np.random.default_rng(5))
    assert 1 <= rounds <= LABEL_PROPAGATION_ROUNDS
    assert sorted(map(sorted, first)) == sorted(map(sorted, second))
    assert sorted(u for c in first for u in c) == list(range(200))
    with pytest.raises(ParameterError):
        label_propagation(nx_graph, np.random.default_rng(5), max_rounds=0)


def test_routing_table():
    assert routing_table([[0, 2], [1]], 3).tolist() == [0, 1, 0]
    with pytest.raises(ParameterError):
        routing_table([[0, 1], [1, 2]], 3)
    with pytest.raises(ParameterError):
        routing_table([[0], [1]], 3)


# ── 배치 ─────────────────────────────────────────────────────────────────────

@pytest.fixture
def summary_deployment():
    graph = random_connected_graph(1, n=40)
    parts = partition(graph, 2, seed=0)
    k = 0.5 * graph_size_bits(graph)
    deployment = build_deployment_summaries(graph, parts, k, EngineConfig(budget_bits=k, seed=0))
    return graph, deployment


def test_summary_deployment_is_communication_free(summary_deployment):
    graph, deployment = summary_deployment
    queries = [(q, "rwr") for q in range(0, 40, 5)] + [(3, "hop")]
    records = answer_multi(deployment, queries)
    assert len(records) == len(queries)
    for record in records:
        assert record.touched == (record.machine,)
        assert record.machine == deployment.routing[record.node]
        assert record.answerable
    assert sum(deployment.access_counts()) == len(queries)
    assert all(m.size_bits() <= deployment.per_machine_budget_bits for m in deployment.machines)


def test_closest_edges_order():
    kept = closest_edges(_path(), [0], 3)
    assert kept.tolist() == [[0, 1], [1, 2], [2, 3]]


def test_subgraph_deployment():
    graph = _path()
    # 엣지 하나는 2·log2 5 ≈ 4.64 bits
    deployment = build_deployment_subgraphs(graph, [[0, 1, 2], [3, 4]], budget_bits=10.0)
    assert deployment.machines[0].payload.edge_array.tolist() == [[0, 1], [1, 2]]
    assert deployment.machines[1].payload.edge_array.tolist() == [[2, 3], [3, 4]]
    with pytest.raises(ParameterError):
        build_deployment_subgraphs(graph, [[0, 1, 2], [3, 4]], budget_bits=4.0)


def test_unanswerable_query_scores_worst():
    graph = _path()
    deployment = build_deployment_subgraphs(graph, [[0, 1, 2], [3, 4]], budget_bits=5.0)
    records = answer_multi(deployment, [(4, "rwr"), (0, "rwr")])
    assert not records[0].answerable
    assert records[1].answerable
    scores = score_records(graph, records)["rwr"]
    assert scores["failures"] == 1
    assert scores["count"] == 2
    assert scores["smape_mean"] >= 0.5


def test_route_rejects_unknown_node(summary_deployment):
    _, deployment = summary_deployment
    with pytest.raises(ParameterError):
        deployment.route(40)


# ── manifest ─────────────────────────────────────────────────────────────────

def test_save_and_load_summary_deployment(tmp_path, summary_deployment):
    _, deployment = summary_deployment
    manifest = save_deployment(deployment, tmp_path / "summary", seed=7)
    assert json.loads(manifest.read_text(encoding="utf-8"))["seed"] == 7
    loaded = load_deployment(manifest)
    assert loaded.kind == "summary"
    assert np.array_equal(loaded.routing, deployment.routing)
    assert [m.payload for m in loaded.machines] == [m.payload for m in deployment.machines]


def test_save_and_load_subgraph_deployment(tmp_path):
    deployment = build_deployment_subgraphs(_path(), [[0, 1, 2], [3, 4]], budget_bits=10.0)
    loaded = load_deployment(save_deployment(deployment, tmp_path / "subgraph"))
    assert loaded.kind == "subgraph"
    assert [m.payload for m in loaded.machines] == [m.payload for m in deployment.machines]


# ── 시나리오 ─────────────────────────────────────────────────────────────────

def test_run_distsim_small_scenario(tmp_path):
    scenario = Scenario(
        generator=GeneratorSpec(model="two_community", n=50, m=2, bridges=5),
        machines=2,
        seeds=[0],
        queries=10,
        kinds=["rwr", "hop"],
        output_dir=str(tmp_path),
    )
    rows = run_distsim(scenario)
    assert {(row.deployment, row.kind) for row in rows} == {
        ("summary", "rwr"), ("summary", "hop"), ("subgraph", "rwr"), ("subgraph", "hop"),
    }
    assert all(row.dataset == "two_community_50" for row in rows)
    assert (tmp_path / "seed_0" / "summary" / "manifest.json").exists()
    assert (tmp_path / "seed_0" / "subgraph" / "routing.tsv").exists()


def test_load_scenario(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"generator": {"model": "ba", "n": 30, "m": 2}, "machines": 3}), encoding="utf-8")
    scenario = load_scenario(path)
    assert scenario.machines == 3
    assert scenario.deployments == ["summary", "subgraph"]


def test_load_scenario_rejects_bad_values(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"generator": {"model": "ba"}, "machines": 0}), encoding="utf-8")
    with pytest.raises(ParameterError):
        load_scenario(path)
