"""
요약 그래프 (summary_model)

SummaryGraph = (S, P)
  - S: 노드 집합 V 의 분할. 각 블록이 supernode 이며 id 는 블록의 최초 대표 노드 id.
  - P: supernode 쌍(자기 자신 포함)의 집합인 superedge.

복원 규칙: u ≠ v 이고 {S_u, S_v} ∈ P 이면 복원 그래프에 엣지 {u, v} 가 있다.
병합 단계 외에는 수정하지 않으며, 질의/비용 계산은 정지 상태에서만 읽는다.
"""

import heapq
import math
from typing import Iterable, Iterator

import numpy as np

from pegasus.core.graph import Graph
from pegasus.errors import DeadSupernodeError, ParameterError, SizeGuardError

RECONSTRUCT_LIMIT = 5_000


class SummaryGraph:
    """supernode 멤버십 + superedge 인접 집합."""

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.membership = np.arange(node_count, dtype=np.int64)
        self.members: dict[int, list[int]] = {u: [u] for u in range(node_count)}
        self._adj: dict[int, set[int]] = {u: set() for u in range(node_count)}
        self._superedge_count = 0

    # ── 생성 ───────────────────────────────────────────────────────────────

    @classmethod
    def from_partition(
        cls,
        membership: Iterable[int],
        superedges: Iterable[tuple[int, int]] = (),
    ) -> "SummaryGraph":
        """멤버십 배열과 superedge 목록으로 요약 그래프를 만든다.

        supernode id 는 입력 라벨과 무관하게 블록의 최소 노드 id 로 정규화된다.
        superedge 는 입력 라벨 기준으로 주어진다.
        """
        labels = np.asarray(list(membership), dtype=np.int64)
        n = labels.shape[0]
        if n < 1:
            raise ParameterError("노드가 하나 이상 필요합니다.")
        summary = cls.__new__(cls)
        summary.node_count = n
        summary.members = {}
        label_to_id: dict[int, int] = {}
        for u, label in enumerate(labels.tolist()):
            sid = label_to_id.setdefault(label, u)
            summary.members.setdefault(sid, []).append(u)
        summary.membership = np.array([label_to_id[x] for x in labels.tolist()], dtype=np.int64)
        summary._adj = {sid: set() for sid in summary.members}
        summary._superedge_count = 0
        for a, b in superedges:
            if a not in label_to_id or b not in label_to_id:
                raise ParameterError(f"존재하지 않는 supernode 라벨을 참조하는 superedge ({a}, {b})")
            summary.add_superedge(label_to_id[a], label_to_id[b])
        return summary

    def copy(self) -> "SummaryGraph":
        other = SummaryGraph.__new__(SummaryGraph)
        other.node_count = self.node_count
        other.membership = self.membership.copy()
        other.members = {k: list(v) for k, v in self.members.items()}
        other._adj = {k: set(v) for k, v in self._adj.items()}
        other._superedge_count = self._superedge_count
        return other

    # ── 조회 ───────────────────────────────────────────────────────────────

    @property
    def supernode_count(self) -> int:
        return len(self.members)

    @property
    def superedge_count(self) -> int:
        return self._superedge_count

    def is_alive(self, a: int) -> bool:
        return a in self.members

    def check_alive(self, *ids: int) -> None:
        for a in ids:
            if a not in self.members:
                raise DeadSupernodeError(f"supernode {a} 는 존재하지 않습니다.")

    def supernodes(self) -> list[int]:
        return sorted(self.members)

    def superedge_neighbors(self, a: int) -> set[int]:
        """a 와 superedge 로 연결된 supernode 집합 (self-loop 이면 a 포함)."""
        self.check_alive(a)
        return self._adj[a]

    def has_superedge(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, ())

    def superedges(self) -> Iterator[tuple[int, int]]:
        """정규 순서 (작은 id 먼저) 로 정렬된 superedge 목록."""
        for a in sorted(self._adj):
            for b in sorted(self._adj[a]):
                if a <= b:
                    yield a, b

    # ── 수정 ───────────────────────────────────────────────────────────────

    def add_superedge(self, a: int, b: int) -> None:
        self.check_alive(a, b)
        if a == b and len(self.members[a]) < 2:
            raise ParameterError(f"단일 노드 supernode {a} 에는 self-loop 를 둘 수 없습니다.")
        if b in self._adj[a]:
            return
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._superedge_count += 1

    def remove_superedge(self, a: int, b: int) -> None:
        if b not in self._adj.get(a, ()):
            return
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._superedge_count -= 1

    def merge(self, a: int, b: int) -> int:
        """a, b 를 합치고 두 supernode 에 닿은 superedge 를 모두 제거한다.

        Returns:
            int: 병합된 supernode id (둘 중 작은 id)
        """
        self.check_alive(a, b)
        if a == b:
            raise ParameterError("같은 supernode 끼리는 병합할 수 없습니다.")
        keep, drop = (a, b) if a < b else (b, a)
        for x in list(self._adj[keep]):
            self.remove_superedge(keep, x)
        for x in list(self._adj[drop]):
            self.remove_superedge(drop, x)
        moved = self.members.pop(drop)
        self.membership[moved] = keep
        self.members[keep] = list(heapq.merge(self.members[keep], moved))
        del self._adj[drop]
        return keep

    # ── 비교 / 표현 ────────────────────────────────────────────────────────

    def canonical(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        """supernode 를 최소 멤버 순으로 0..|S|-1 재번호한 표현."""
        order = {sid: rank for rank, sid in enumerate(sorted(self.members, key=lambda s: self.members[s][0]))}
        membership = tuple(order[int(s)] for s in self.membership.tolist())
        edges = tuple(sorted(tuple(sorted((order[a], order[b]))) for a, b in self.superedges()))
        return membership, edges

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SummaryGraph):
            return NotImplemented
        return self.node_count == other.node_count and self.canonical() == other.canonical()

    def __repr__(self) -> str:
        return f"SummaryGraph(|V|={self.node_count}, |S|={self.supernode_count}, |P|={self.superedge_count})"


# ── 연산 ──────────────────────────────────────────────────────────────────────

def initial_summary(graph: Graph) -> SummaryGraph:
    """모든 노드가 단일 supernode, 입력 엣지 하나당 superedge 하나."""
    summary = SummaryGraph(graph.node_count)
    for u, v in graph.edge_array.tolist():
        summary._adj[u].add(v)
        summary._adj[v].add(u)
    summary._superedge_count = graph.edge_count
    return summary


def reconstruct_edges(summary: SummaryGraph, allow_large: bool = False) -> Graph:
    """요약 그래프에서 복원 그래프 Ĝ 를 전부 만든다 (검증용)."""
    if summary.node_count > RECONSTRUCT_LIMIT and not allow_large:
        raise SizeGuardError(
            f"|V|={summary.node_count} > {RECONSTRUCT_LIMIT}: 전체 복원은 검증용입니다 (allow_large=True 로 강제)."
        )
    chunks: list[np.ndarray] = []
    for a, b in summary.superedges():
        ma = np.asarray(summary.members[a], dtype=np.int64)
        if a == b:
            iu, iv = np.triu_indices(ma.shape[0], k=1)
            chunks.append(np.stack([ma[iu], ma[iv]], axis=1))
        else:
            mb = np.asarray(summary.members[b], dtype=np.int64)
            uu, vv = np.meshgrid(ma, mb, indexing="ij")
            chunks.append(np.stack([uu.ravel(), vv.ravel()], axis=1))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(summary.node_count, edges)


def summary_size_bits(summary: SummaryGraph) -> float:
    """요약 그래프 크기 (2|P| + |V|)·log2|S| (bits). |S|=1 이면 0."""
    s = summary.supernode_count
    if s < 1:
        raise ParameterError("supernode 가 하나 이상 필요합니다.")
    if s == 1:
        return 0.0
    return (2.0 * summary.superedge_count + summary.node_count) * math.log2(s)
