import math

import numpy as np
import pytest

from pegasus.core.graph import Graph, load_edge_list
from pegasus.core.personalization import TargetSet, build_weight_model, load_targets, pair_weight
from pegasus.errors import ParameterError
from tests.conftest import A, B, C, E


def test_weights_for_single_target(toy_graph):
    model = build_weight_model(toy_graph, TargetSet.of([A], 5), alpha=2.0)
    assert model.distance.tolist() == [0, 2, 1, 1, 2]
    assert model.factor.tolist() == [1.0, 0.25, 0.5, 0.5, 0.25]
    assert model.z == pytest.approx(0.23125)
    assert pair_weight(model, A, C) == pytest.approx(2.16216, abs=1e-5)
    assert model.pair_weight(B, E) == pytest.approx(0.27027, abs=1e-5)


def test_uniform_weights_when_alpha_is_one(toy_graph):
    model = build_weight_model(toy_graph, TargetSet.of([A], 5), alpha=1.0)
    assert np.all(model.factor == 1.0)
    assert model.z == pytest.approx(1.0)


def test_average_pair_weight_is_one(toy_graph):
    model = build_weight_model(toy_graph, TargetSet.of([B, E], 5), alpha=1.7)
    total = sum(pair_weight(model, u, v) for u in range(5) for v in range(u + 1, 5))
    assert total == pytest.approx(10.0)


def test_alpha_below_one(toy_graph):
    with pytest.raises(ParameterError):
        build_weight_model(toy_graph, TargetSet.of([A], 5), alpha=0.5)


def test_pair_weight_same_node(toy_graph):
    model = build_weight_model(toy_graph, TargetSet.all_nodes(5), alpha=1.25)
    with pytest.raises(ParameterError):
        pair_weight(model, A, A)


def test_unreachable_nodes_get_zero_weight():
    graph = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    model = build_weight_model(graph, TargetSet.of([0], 5), alpha=1.25)
    assert model.factor[3] == 0.0
    assert model.factor[4] == 0.0
    assert model.distance[3] == -1
    assert model.z > 0


def test_target_set_validation():
    with pytest.raises(ParameterError):
        TargetSet.of([], 5)
    with pytest.raises(ParameterError):
        TargetSet.of([5], 5)
    assert TargetSet.of([3, 1, 3], 5).nodes == (1, 3)


def test_target_sample_is_seeded():
    first = TargetSet.sample(100, 10, np.random.default_rng(3))
    second = TargetSet.sample(100, 10, np.random.default_rng(3))
    assert first == second
    assert len(first) == 10


def test_load_targets_uses_original_ids(tmp_path, toy_file):
    graph = load_edge_list(toy_file)
    path = tmp_path / "targets.txt"
    path.write_text("# targets\n4\n0\n", encoding="utf-8")
    assert load_targets(path, graph).nodes == (0, 4)

    path.write_text("9\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        load_targets(path, graph)


def test_weight_decays_with_distance():
    graph = Graph.from_edges(6, [(i, i + 1) for i in range(5)])
    model = build_weight_model(graph, TargetSet.of([0], 6), alpha=1.5)
    assert np.all(np.diff(model.factor) < 0)
    assert model.factor[5] == pytest.approx(math.pow(1.5, -5))
