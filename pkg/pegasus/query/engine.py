"""
질의 엔진 (query_engine)

역할:
  - 요약 그래프 위에서 전체 복원 없이 이웃 / HOP / RWR / PHP 질의에 답한다.
  - 원본 그래프 위의 정확한 답(오라클 경로)도 같은 코드로 계산한다.

두 입력은 NeighborhoodSource 프로토콜로 통일된다:
  - GraphSource   : A^(G) 를 그대로 사용 (정확)
  - SummarySource : supernode 단위 인접 행렬 M 을 써서
        aggregate(x)[v] = Σ_{X ~ S_v} Σ_{u∈X} x_u  -  [S_v self-loop]·x_v
    로 한 번의 반복을 O(|V| + |P|) 에 계산한다.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Protocol, Union

import numpy as np
from scipy import sparse

from pegasus.config import DEFAULT_PHP_C, DEFAULT_WALK_PROB
from pegasus.core.graph import Graph
from pegasus.core.summary import SummaryGraph
from pegasus.errors import InvalidNodeError, ParameterError

logger = logging.getLogger(__name__)

QueryKind = Literal["rwr", "hop", "php"]
QUERY_KINDS: tuple[QueryKind, ...] = ("rwr", "hop", "php")


# ── 결과 타입 ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class AnswerVector:
    values: np.ndarray
    kind: QueryKind
    query: int
    converged: bool = True
    iterations: int = 0

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def top(self, k: int) -> list[tuple[int, float]]:
        """값 내림차순 상위 k 개 (같으면 노드 id 오름차순)."""
        order = np.lexsort((np.arange(len(self)), -self.values.astype(np.float64)))
        return [(int(u), float(self.values[u])) for u in order[:k]]


# ── 이웃 소스 ─────────────────────────────────────────────────────────────────

class NeighborhoodSource(Protocol):
    node_count: int

    def neighbor_set(self, q: int) -> np.ndarray: ...

    def degree_vector(self) -> np.ndarray: ...

    def aggregate(self, x: np.ndarray) -> np.ndarray: ...

    def hop_levels(self, q: int) -> np.ndarray: ...


class GraphSource:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.node_count = graph.node_count

    def neighbor_set(self, q: int) -> np.ndarray:
        return self.graph.neighbors(q)

    def degree_vector(self) -> np.ndarray:
        return self.graph.degrees.astype(np.float64)

    def aggregate(self, x: np.ndarray) -> np.ndarray:
        return self.graph.adjacency @ x

    def hop_levels(self, q: int) -> np.ndarray:
        return self.graph.bfs_levels(q)


class SummarySource:
    def __init__(self, summary: SummaryGraph):
        self.summary = summary
        self.node_count = summary.node_count
        ids = summary.supernodes()
        self._index = {sid: i for i, sid in enumerate(ids)}
        self._slot = np.array([self._index[int(s)] for s in summary.membership.tolist()], dtype=np.int64)
        self._self_loop = np.array([summary.has_superedge(s, s) for s in ids], dtype=np.float64)

    @cached_property
    def _matrix(self) -> sparse.csr_matrix:
        """supernode 단위 대칭 인접 행렬 (self-loop 은 대각 1)."""
        k = len(self._index)
        pairs = np.array(
            [(self._index[a], self._index[b]) for a, b in self.summary.superedges()], dtype=np.int64
        ).reshape(-1, 2)
        off = pairs[:, 0] != pairs[:, 1]
        rows = np.concatenate([pairs[:, 0], pairs[off, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[off, 0]])
        return sparse.csr_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(k, k))

    def neighbor_set(self, q: int) -> np.ndarray:
        return get_neighbors(self.summary, q)

    def degree_vector(self) -> np.ndarray:
        sizes = np.bincount(self._slot, minlength=len(self._index)).astype(np.float64)
        return (self._matrix @ sizes)[self._slot] - self._self_loop[self._slot]

    def aggregate(self, x: np.ndarray) -> np.ndarray:
        sums = np.bincount(self._slot, weights=x, minlength=len(self._index))
        return (self._matrix @ sums)[self._slot] - self._self_loop[self._slot] * x

    def hop_levels(self, q: int) -> np.ndarray:
        """supernode 단위로 펼치는 BFS. 각 supernode 의 인접 목록은 한 번만 펼친다."""
        summary = self.summary
        dist = np.full(self.node_count, -1, dtype=np.int64)
        dist[q] = 0
        frontier = [q]
        expanded: set[int] = set()
        level = 0
        while frontier:
            level += 1
            touched = {int(summary.membership[u]) for u in frontier} - expanded
            expanded |= touched
            reached: list[int] = []
            for s in sorted(touched):
                for x in summary.superedge_neighbors(s):
                    reached.extend(summary.members[x])
            if not reached:
                break
            candidates = np.unique(np.asarray(reached, dtype=np.int64))
            frontier_arr = candidates[dist[candidates] < 0]
            dist[frontier_arr] = level
            frontier = frontier_arr.tolist()
        return dist


Source = Union[Graph, SummaryGraph, NeighborhoodSource]


def as_source(source: Source) -> NeighborhoodSource:
    if isinstance(source, Graph):
        return GraphSource(source)
    if isinstance(source, SummaryGraph):
        return SummarySource(source)
    return source


def _check_query(source: NeighborhoodSource, q: int) -> int:
    if not (0 <= int(q) < source.node_count):
        raise InvalidNodeError(f"질의 노드 {q} 는 0..{source.node_count - 1} 범위를 벗어납니다.")
    return int(q)


# ── 질의 ──────────────────────────────────────────────────────────────────────

def get_neighbors(summary: SummaryGraph, q: int) -> np.ndarray:
    """S_q 와 superedge 로 이어진 supernode 들의 멤버 합집합 - {q} (오름차순)."""
    if not (0 <= int(q) < summary.node_count):
        raise InvalidNodeError(f"노드 id {q} 는 0..{summary.node_count - 1} 범위를 벗어납니다.")
    s_q = int(summary.membership[q])
    found: list[int] = []
    for x in summary.superedge_neighbors(s_q):
        found.extend(summary.members[x])
    nodes = np.unique(np.asarray(found, dtype=np.int64))
    return nodes[nodes != q]


def hop_query(source: Source, q: int) -> AnswerVector:
    """BFS hop 거리. 도달 불가 노드는 q 에서의 최대 유한 거리로 채운다."""
    src = as_source(source)
    q = _check_query(src, q)
    dist = src.hop_levels(q)
    unreachable = dist < 0
    if unreachable.any():
        dist = dist.copy()
        dist[unreachable] = int(dist.max())
    return AnswerVector(values=dist, kind="hop", query=q)


def rwr_query(
    source: Source,
    q: int,
    walk_prob: float = DEFAULT_WALK_PROB,
    tol: float = 1e-9,
    max_iters: int = 1000,
) -> AnswerVector:
    """재시작 랜덤 워크 (power iteration).

    r ← c·Σ_{v~u} r_v/deg(v) + ((1-c) + c·Σ_{dangling} r)·e_q
    L1 변화량 < tol 이면 수렴.
    """
    if not (0.0 < walk_prob < 1.0):
        raise ParameterError(f"walk_prob 는 (0, 1) 범위여야 합니다 ({walk_prob}).")
    src = as_source(source)
    q = _check_query(src, q)
    degree = src.degree_vector()
    dangling = degree == 0
    inv_degree = np.zeros_like(degree)
    inv_degree[~dangling] = 1.0 / degree[~dangling]

    r = np.zeros(src.node_count, dtype=np.float64)
    r[q] = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        r_new = walk_prob * src.aggregate(r * inv_degree)
        r_new[q] += (1.0 - walk_prob) + walk_prob * r[dangling].sum()
        change = np.abs(r_new - r).sum()
        r = r_new
        if change < tol:
            converged = True
            break
    if not converged:
        logger.warning("RWR 질의 %d: %d 회 안에 수렴하지 않음", q, max_iters)
    return AnswerVector(values=r, kind="rwr", query=q, converged=converged, iterations=iterations)


def php_query(
    source: Source,
    q: int,
    c: float = DEFAULT_PHP_C,
    tol: float = 1e-9,
    max_iters: int = 1000,
) -> AnswerVector:
    """PHP_u = c·mean_{v~u} PHP_v (u ≠ q), PHP_q = 1. 최대 절대 변화량 < tol 이면 수렴."""
    if not (0.0 < c < 1.0):
        raise ParameterError(f"PHP 계수 c 는 (0, 1) 범위여야 합니다 ({c}).")
    src = as_source(source)
    q = _check_query(src, q)
    degree = src.degree_vector()
    has_nbrs = degree > 0

    x = np.zeros(src.node_count, dtype=np.float64)
    x[q] = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        x_new = np.zeros_like(x)
        x_new[has_nbrs] = c * src.aggregate(x)[has_nbrs] / degree[has_nbrs]
        x_new[q] = 1.0
        change = np.abs(x_new - x).max()
        x = x_new
        if change < tol:
            converged = True
            break
    if not converged:
        logger.warning("PHP 질의 %d: %d 회 안에 수렴하지 않음", q, max_iters)
    return AnswerVector(values=x, kind="php", query=q, converged=converged, iterations=iterations)


def run_query(source: Source, q: int, kind: QueryKind, **options) -> AnswerVector:
    """kind 에 맞는 질의 함수로 보낸다. options: walk_prob / c / tol / max_iters."""
    if kind == "hop":
        return hop_query(source, q)
    if kind == "rwr":
        return rwr_query(source, q, **{k: v for k, v in options.items() if k in ("walk_prob", "tol", "max_iters")})
    if kind == "php":
        return php_query(source, q, **{k: v for k, v in options.items() if k in ("c", "tol", "max_iters")})
    raise ParameterError(f"알 수 없는 질의 종류: {kind}")
