import math

import numpy as np
import pytest

from pegasus.core.generators import generate_ba
from pegasus.core.graph import Graph
from pegasus.core.summary import SummaryGraph

# a=0, b=1, c=2, d=3, e=4
A, B, C, D, E = range(5)
TOY_EDGES = [(A, C), (A, D), (B, C), (B, D), (C, E), (D, E)]
TOY_LINES = "1 3\n1 4\n2 3\n2 4\n3 5\n4 5\n"

LOG2_3 = math.log2(3)
LOG2_5 = math.log2(5)


@pytest.fixture
def toy_graph() -> Graph:
    return Graph.from_edges(5, TOY_EDGES)


@pytest.fixture
def exact_summary() -> SummaryGraph:
    """{a,b}, {c,d}, {e} 와 superedge {AB,CD}, {CD,E}. 복원 오차 0."""
    return SummaryGraph.from_partition([A, A, C, C, E], [(A, C), (C, E)])


@pytest.fixture
def crossed_summary() -> SummaryGraph:
    """{a,d}, {b,c}, {e} 와 교차 superedge + 두 self-loop."""
    return SummaryGraph.from_partition([A, B, B, A, E], [(A, B), (A, A), (B, B)])


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy.tsv"
    path.write_text("# toy graph\n0 2\n0 3\n1 2\n1 3\n2 4\n3 4\n", encoding="utf-8")
    return path


def random_connected_graph(seed: int, n: int = 40, m: int = 2) -> Graph:
    """BA 그래프에 임의 엣지를 더한 연결 그래프."""
    base = generate_ba(n, m, seed)
    rng = np.random.default_rng(seed)
    extra = rng.integers(0, n, size=(n // 2, 2))
    extra = extra[extra[:, 0] != extra[:, 1]]
    return Graph.from_edges(n, np.concatenate([base.edge_array, extra]))


def random_summary(graph: Graph, seed: int, blocks: int = 8, superedge_prob: float = 0.3) -> SummaryGraph:
    """임의 분할 + 임의 superedge 집합 (단일 노드 블록에는 self-loop 없음)."""
    rng = np.random.default_rng(seed + 1000)
    labels = rng.integers(0, blocks, size=graph.node_count)
    summary = SummaryGraph.from_partition(labels.tolist())
    ids = summary.supernodes()
    for i, a in enumerate(ids):
        for b in ids[i:]:
            if a == b and len(summary.members[a]) < 2:
                continue
            if rng.random() < superedge_prob:
                summary.add_superedge(a, b)
    return summary
