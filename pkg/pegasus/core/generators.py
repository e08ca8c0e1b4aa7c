"""
합성 그래프 생성기

- generate_ba            : Barabási-Albert (선호적 연결) 그래프
- generate_ws            : Watts-Strogatz (small-world) 그래프
- generate_two_community : BA 그래프 두 개를 임의 다리 엣지로 잇는 2-커뮤니티 그래프

모든 생성기는 (파라미터, seed) 가 같으면 같은 엣지 집합을 만든다.
"""

import networkx as nx
import numpy as np

from pegasus.config import substream
from pegasus.core.graph import Graph
from pegasus.errors import ParameterError


def from_networkx(nx_graph: nx.Graph) -> Graph:
    """0..n-1 정수 노드를 가진 networkx 그래프를 Graph 로 변환한다."""
    n = nx_graph.number_of_nodes()
    edges = np.array([(u, v) for u, v in nx_graph.edges() if u != v], dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, edges)


def to_networkx(graph: Graph) -> nx.Graph:
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(graph.node_count))
    nx_graph.add_edges_from(map(tuple, graph.edge_array.tolist()))
    return nx_graph


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Barabási-Albert 그래프. 간선 수는 대략 m·(n-m)."""
    if not (n > m >= 1):
        raise ParameterError(f"BA 생성기는 n > m ≥ 1 이어야 합니다 (n={n}, m={m}).")
    return from_networkx(nx.barabasi_albert_graph(n, m, seed=seed))


def generate_ws(n: int, k: int, p: float, seed: int) -> Graph:
    """Watts-Strogatz 그래프. p=0 이면 모든 노드의 차수가 k 인 고리 격자."""
    if not (n > k >= 2) or k % 2:
        raise ParameterError(f"WS 생성기는 n > k ≥ 2, k 짝수여야 합니다 (n={n}, k={k}).")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"재배선 확률 p 는 [0, 1] 범위여야 합니다 (p={p}).")
    return from_networkx(nx.watts_strogatz_graph(n, k, p, seed=seed))


def generate_two_community(n_each: int, m: int, bridges: int, seed: int) -> Graph:
    """BA(n_each, m) 두 개를 bridges 개의 임의 엣지로 연결한다.

    노드 0..n_each-1 이 첫 번째, n_each..2·n_each-1 이 두 번째 커뮤니티.
    """
    if bridges < 1:
        raise ParameterError("두 커뮤니티를 잇는 엣지가 하나 이상 필요합니다.")
    left = generate_ba(n_each, m, seed)
    right = generate_ba(n_each, m, seed + 1)
    rng = substream(seed, "generator", 2)
    picked: set[tuple[int, int]] = set()
    while len(picked) < min(bridges, n_each * n_each):
        u = int(rng.integers(n_each))
        v = int(rng.integers(n_each)) + n_each
        picked.add((u, v))
    edges = np.concatenate([
        left.edge_array,
        right.edge_array + n_each,
        np.array(sorted(picked), dtype=np.int64),
    ])
    return Graph.from_edges(2 * n_each, edges)


def generate(model: str, seed: int, n: int = 1000, m: int = 5, k: int = 10, p: float = 0.1, bridges: int = 50) -> Graph:
    """모델 이름으로 생성기를 고른다 (CLI / 시나리오 파일용).

    two_community 는 n 을 커뮤니티 하나의 크기로 쓴다.
    """
    if model == "ba":
        return generate_ba(n, m, seed)
    if model == "ws":
        return generate_ws(n, k, p, seed)
    if model == "two_community":
        return generate_two_community(n, m, bridges, seed)
    raise ParameterError(f"알 수 없는 생성 모델: {model}")
