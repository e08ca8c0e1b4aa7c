"""
입력 그래프 (graph_core)

역할:
  - edge-list 파일을 읽어 무방향 단순 그래프(CSR 인접 구조)로 만든다.
  - 전처리: self-loop / 중복·역방향 엣지 제거, 최대 연결 요소만 유지, id 재매핑.
  - 그래프 크기(bits)와 유효 지름(effective diameter)을 계산한다.

노드 id 는 내부적으로 항상 0..|V|-1 의 조밀한 정수이며,
원본 파일의 id 는 Graph.original_ids 에 보관된다.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from pegasus.errors import (
    DisconnectedGraphError,
    EmptyGraphError,
    GraphFormatError,
    InvalidNodeError,
    ParameterError,
)

logger = logging.getLogger(__name__)

EXACT_DIAMETER_LIMIT = 20_000
DIAMETER_SAMPLE_PAIRS = 100_000
_BFS_CHUNK = 256

PathLike = Union[str, Path]


# ── 그래프 타입 ───────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Graph:
    """불변 무방향 단순 그래프.

    indptr / indices 는 대칭 CSR 인접 구조이며 이웃 목록은 오름차순, 중복이 없다.
    """

    indptr: np.ndarray
    indices: np.ndarray
    original_ids: Optional[np.ndarray] = field(default=None)

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Union[np.ndarray, Iterable[tuple[int, int]]],
        original_ids: Optional[np.ndarray] = None,
    ) -> "Graph":
        """엣지 목록으로부터 그래프를 만든다. 중복/역방향 엣지는 하나로 합쳐진다."""
        if node_count < 1:
            raise EmptyGraphError("노드가 없는 그래프는 만들 수 없습니다.")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= node_count):
            raise ParameterError("엣지가 범위를 벗어난 노드 id 를 참조합니다.")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ParameterError("self-loop 는 허용되지 않습니다.")

        src = np.concatenate([arr[:, 0], arr[:, 1]])
        dst = np.concatenate([arr[:, 1], arr[:, 0]])
        mat = sparse.csr_matrix(
            (np.ones(src.shape[0], dtype=np.int32), (src, dst)),
            shape=(node_count, node_count),
        )
        mat.sum_duplicates()
        mat.sort_indices()
        return cls(
            indptr=mat.indptr.astype(np.int64),
            indices=mat.indices.astype(np.int64),
            original_ids=original_ids,
        )

    # ── 기본 속성 ──────────────────────────────────────────────────────────

    @property
    def node_count(self) -> int:
        return int(self.indptr.shape[0] - 1)

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0] // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        self.check_node(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def check_node(self, u: int) -> None:
        if not (0 <= int(u) < self.node_count):
            raise InvalidNodeError(f"노드 id {u} 는 0..{self.node_count - 1} 범위를 벗어납니다.")

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """float64 CSR 인접 행렬 (A^(G))."""
        data = np.ones(self.indices.shape[0], dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.node_count, self.node_count))

    @cached_property
    def edge_array(self) -> np.ndarray:
        """u < v 인 엣지 목록 (shape: |E| x 2), 사전순 정렬."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    def is_connected(self) -> bool:
        if self.node_count <= 1:
            return True
        n_comp, _ = csgraph.connected_components(self.adjacency, directed=False)
        return n_comp == 1

    def bfs_levels(self, sources: Union[int, Iterable[int]]) -> np.ndarray:
        """(다중 출발) BFS hop 거리. 도달 불가 노드는 -1."""
        sources = np.unique(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
        for s in sources:
            self.check_node(int(s))
        dist = np.full(self.node_count, -1, dtype=np.int64)
        dist[sources] = 0
        frontier = sources
        level = 0
        adjacency = self.adjacency
        while frontier.shape[0]:
            level += 1
            reached = np.unique(adjacency[frontier].indices)
            frontier = reached[dist[reached] < 0]
            dist[frontier] = level
        return dist

    # ── 비교 ───────────────────────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self) -> int:
        return hash((self.node_count, self.edge_count))

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


# ── 입출력 ────────────────────────────────────────────────────────────────────

def load_edge_list(path: PathLike, preprocess: bool = False) -> Graph:
    """edge-list 파일을 읽는다.

    Args:
        path: 한 줄에 엣지 하나('u v'), '#' 주석과 빈 줄은 무시.
        preprocess: True 이면 self-loop 제거 + 최대 연결 요소만 유지.

    Returns:
        Graph: original_ids 에 원본 id 재매핑 표가 담긴 그래프
    """
    path = Path(path)
    pairs: list[tuple[int, int]] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_number, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise GraphFormatError(f"정수 토큰 2개가 필요합니다: {line!r}", line_number)
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise GraphFormatError(f"정수가 아닌 토큰: {line!r}", line_number) from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"음수 노드 id: {line!r}", line_number)
            if u == v:
                if preprocess:
                    continue
                raise GraphFormatError(f"self-loop ({u}) 는 전처리(preprocess) 없이 허용되지 않습니다.", line_number)
            pairs.append((u, v))

    if not pairs:
        raise EmptyGraphError(f"{path}: 전처리 후 남은 엣지가 없습니다.")

    raw_edges = np.asarray(pairs, dtype=np.int64)
    ids, inverse = np.unique(raw_edges, return_inverse=True)
    dense = inverse.reshape(-1, 2)
    graph = Graph.from_edges(ids.shape[0], dense, original_ids=ids)
    if preprocess:
        graph = largest_component(graph)
    logger.info("%s 로드: |V|=%d |E|=%d", path, graph.node_count, graph.edge_count)
    return graph


def largest_component(graph: Graph) -> Graph:
    """최대 연결 요소만 남기고 id 를 0..n-1 로 다시 매긴다.

    크기가 같은 요소가 여럿이면 가장 작은 원본 id 를 포함한 요소를 고른다.
    """
    n_comp, labels = csgraph.connected_components(graph.adjacency, directed=False)
    if n_comp == 1:
        return graph
    original = graph.original_ids if graph.original_ids is not None else np.arange(graph.node_count)
    sizes = np.bincount(labels, minlength=n_comp)
    min_ids = np.full(n_comp, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(min_ids, labels, original)
    # 크기 내림차순, 최소 원본 id 오름차순
    best = int(np.lexsort((min_ids, -sizes))[0])

    keep = np.flatnonzero(labels == best)
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.shape[0])
    edges = graph.edge_array
    mask = (labels[edges[:, 0]] == best) & (labels[edges[:, 1]] == best)
    sub = remap[edges[mask]]
    if sub.shape[0] == 0:
        raise EmptyGraphError("최대 연결 요소에 엣지가 없습니다.")
    return Graph.from_edges(keep.shape[0], sub, original_ids=original[keep])


def save_edge_list(graph: Graph, path: PathLike, header: Optional[str] = None) -> None:
    """edge-list 로 저장한다. 원본 id 가 있으면 원본 id 로, 없으면 조밀 id 로 쓴다."""
    path = Path(path)
    edges = graph.edge_array
    if graph.original_ids is not None:
        edges = graph.original_ids[edges]
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"# nodes={graph.node_count} edges={graph.edge_count}\n")
        for u, v in edges.tolist():
            fh.write(f"{u} {v}\n")


def write_id_map(graph: Graph, path: PathLike) -> None:
    """재매핑 표(sidecar)를 'dense<TAB>original' 형식으로 저장한다."""
    original = graph.original_ids if graph.original_ids is not None else np.arange(graph.node_count)
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# dense\toriginal\n")
        for dense, orig in enumerate(original):
            fh.write(f"{dense}\t{orig}\n")


# ── 크기 / 지름 ───────────────────────────────────────────────────────────────

def graph_size_bits(graph: Graph) -> float:
    """입력 그래프 크기 2·|E|·log2|V| (bits)."""
    if graph.node_count < 1:
        raise ParameterError("노드가 하나 이상 필요합니다.")
    if graph.edge_count == 0:
        return 0.0
    return 2.0 * graph.edge_count * math.log2(graph.node_count)


def effective_diameter(
    graph: Graph,
    percentile: float = 0.9,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """도달 가능한 순서쌍 중 percentile 이상이 h hop 이내에 있는 최소 h.

    |V| ≤ 20,000 이면 전수 BFS, 그보다 크면 출발 노드를 균등 추출하여
    100,000 개 이상의 쌍으로 추정한다.
    """
    if not (0.0 < percentile <= 1.0):
        raise ParameterError("percentile 은 (0, 1] 범위여야 합니다.")
    if not graph.is_connected():
        raise DisconnectedGraphError("비연결 그래프입니다. 최대 연결 요소 전처리(--preprocess)를 먼저 적용하세요.")
    n = graph.node_count
    if n == 1:
        return 0.0

    if n <= EXACT_DIAMETER_LIMIT:
        sources = np.arange(n)
    else:
        rng = rng or np.random.default_rng(0)
        n_sources = max(64, math.ceil(DIAMETER_SAMPLE_PAIRS / (n - 1)))
        sources = rng.choice(n, size=min(n_sources, n), replace=False)

    hist = np.zeros(1, dtype=np.int64)
    for start in range(0, sources.shape[0], _BFS_CHUNK):
        chunk = sources[start:start + _BFS_CHUNK]
        dist = csgraph.shortest_path(graph.adjacency, unweighted=True, indices=chunk)
        levels = dist[np.isfinite(dist) & (dist > 0)].astype(np.int64)
        counts = np.bincount(levels)
        if counts.shape[0] > hist.shape[0]:
            counts[:hist.shape[0]] += hist
            hist = counts
        else:
            hist[:counts.shape[0]] += counts

    cumulative = np.cumsum(hist)
    total = cumulative[-1]
    h = int(np.searchsorted(cumulative, percentile * total - 1e-9 * total))
    return float(h)
