"""
노드 분할 (partition)

커뮤니티 탐지 → 큰 커뮤니티 분할 → 균형 bin-packing 순으로 V 를 m 개 집합으로 나눈다.

  - label_propagation (기본, 시드 고정, 최대 10 라운드) 또는 louvain
  - ceil(|V|/m) 보다 큰 커뮤니티는 커뮤니티 내부 BFS 순서로 잘라 조각낸다.
  - 조각을 큰 것부터 가장 적게 찬 bin 에 넣는다 (동률이면 작은 bin 번호).
"""

import heapq
import logging
import math
from collections import Counter
from typing import Literal

import networkx as nx
import numpy as np

from pegasus.config import substream
from pegasus.core.generators import to_networkx
from pegasus.core.graph import Graph
from pegasus.errors import ParameterError

logger = logging.getLogger(__name__)

PartitionMethod = Literal["label_propagation", "louvain"]

LABEL_PROPAGATION_ROUNDS = 10


def label_propagation(
    nx_graph: nx.Graph, rng: np.random.Generator, max_rounds: int = LABEL_PROPAGATION_ROUNDS
) -> tuple[list[set[int]], int]:
    """시드 고정 비동기 label propagation.

    라운드마다 노드를 무작위 순서로 방문하여 이웃에서 가장 많은 라벨을 택한다.
    현재 라벨이 최빈 라벨 중 하나이면 유지하고, 아니면 최빈 라벨 중 하나를 고른다.
    한 라운드 동안 바뀐 라벨이 없거나 max_rounds 에 도달하면 멈춘다.

    Returns:
        (커뮤니티 목록, 수행한 라운드 수)
    """
    if max_rounds < 1:
        raise ParameterError("label propagation 라운드 수는 1 이상이어야 합니다.")
    nodes = sorted(nx_graph.nodes())
    labels = {u: u for u in nodes}
    rounds = 0
    converged = False
    while rounds < max_rounds and not converged:
        rounds += 1
        converged = True
        for idx in rng.permutation(len(nodes)).tolist():
            u = nodes[idx]
            counts = Counter(labels[v] for v in nx_graph.neighbors(u))
            if not counts:
                continue
            top = max(counts.values())
            if counts.get(labels[u], 0) == top:
                continue
            best = sorted(label for label, count in counts.items() if count == top)
            labels[u] = best[int(rng.integers(len(best)))]
            converged = False
    if not converged:
        logger.info("label propagation 이 %d 라운드 안에 수렴하지 않아 현재 라벨로 멈춤", max_rounds)

    groups: dict[int, set[int]] = {}
    for u in nodes:
        groups.setdefault(labels[u], set()).add(u)
    return list(groups.values()), rounds


def detect_communities(graph: Graph, method: PartitionMethod, seed: int) -> list[list[int]]:
    nx_graph = to_networkx(graph)
    if method == "label_propagation":
        found, _ = label_propagation(nx_graph, substream(seed, "partition"))
    elif method == "louvain":
        found = nx.community.louvain_communities(nx_graph, seed=seed)
    else:
        raise ParameterError(f"알 수 없는 분할 방법: {method}")
    communities = [sorted(int(u) for u in c) for c in found]
    # 크기 내림차순, 최소 노드 id 오름차순
    communities.sort(key=lambda c: (-len(c), c[0]))
    return communities


def _bfs_order(graph: Graph, nodes: list[int]) -> list[int]:
    """커뮤니티 내부에서 최소 id 부터 BFS 로 방문한 순서 (비연결 부분은 다음 최소 id 부터)."""
    inside = np.zeros(graph.node_count, dtype=bool)
    inside[nodes] = True
    seen = np.zeros(graph.node_count, dtype=bool)
    order: list[int] = []
    for start in nodes:
        if seen[start]:
            continue
        seen[start] = True
        frontier = [start]
        while frontier:
            order.extend(frontier)
            nxt: list[int] = []
            for u in frontier:
                for v in graph.neighbors(u).tolist():
                    if inside[v] and not seen[v]:
                        seen[v] = True
                        nxt.append(v)
            frontier = nxt
    return order


def partition(graph: Graph, m: int, method: PartitionMethod = "label_propagation", seed: int = 0) -> list[list[int]]:
    """V 를 서로소인 m 개의 비어 있지 않은 노드 집합으로 나눈다 (각 집합은 오름차순)."""
    n = graph.node_count
    if m < 1:
        raise ParameterError("머신 수 m 은 1 이상이어야 합니다.")
    if m > n:
        raise ParameterError(f"머신 수 m={m} 이 노드 수 {n} 보다 큽니다.")
    if m == 1:
        return [list(range(n))]

    cap = math.ceil(n / m)
    pieces: list[list[int]] = []
    for community in detect_communities(graph, method, seed):
        if len(community) <= cap:
            pieces.append(community)
            continue
        order = _bfs_order(graph, community)
        pieces.extend(order[i:i + cap] for i in range(0, len(order), cap))
    pieces.sort(key=lambda p: (-len(p), min(p)))

    bins: list[list[int]] = [[] for _ in range(m)]
    loads = [(0, i) for i in range(m)]
    for piece in pieces:
        load, i = heapq.heappop(loads)
        bins[i].extend(piece)
        heapq.heappush(loads, (load + len(piece), i))

    # 조각 수가 m 보다 적으면 빈 bin 이 생길 수 있다
    for i in range(m):
        while not bins[i]:
            donor = max(range(m), key=lambda j: (len(bins[j]), -j))
            bins[donor].sort()
            bins[i].append(bins[donor].pop())

    parts = [sorted(b) for b in bins]
    logger.info("분할 (%s, m=%d): 크기 %s", method, m, [len(p) for p in parts])
    return parts


def routing_table(parts: list[list[int]], node_count: int) -> np.ndarray:
    """routing[u] = u 가 속한 집합 번호."""
    routing = np.full(node_count, -1, dtype=np.int64)
    for i, part in enumerate(parts):
        if np.any(routing[part] >= 0):
            raise ParameterError("분할 집합이 서로소가 아닙니다.")
        routing[part] = i
    if np.any(routing < 0):
        raise ParameterError("분할 집합이 모든 노드를 덮지 않습니다.")
    return routing
