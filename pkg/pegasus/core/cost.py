"""
개인화 비용 모델 (summary_model 의 비용 부분)

supernode 쌍 {A, B} 의 충분 통계 PairStats:
  - present_mass : A-B 사이 입력 엣지의 W 합 (A=B 이면 내부 엣지)
  - total_mass   : A-B 가 걸치는 서로 다른 노드 쌍 전체의 W 합
  - edge_count   : A-B 사이 입력 엣지 수

W(u,v) = w_u·w_v / z 로 분해되므로 total_mass 는 supernode 별 Σw, Σw² 만으로 구한다.
  A ≠ B : (Σ_A w)(Σ_B w) / z
  A = B : ((Σ_A w)² - Σ_A w²) / (2z)

오차는 순서 없는 노드 쌍을 한 번씩 센다.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from pegasus.core.graph import Graph
from pegasus.core.personalization import WeightModel
from pegasus.core.summary import SummaryGraph, reconstruct_edges, summary_size_bits
from pegasus.errors import ParameterError, SizeGuardError

BRUTE_FORCE_LIMIT = 5_000


# ── 타입 ──────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PairStats:
    present_mass: float
    total_mass: float
    edge_count: int


class MassTable:
    """supernode 별 Σw, Σw² 테이블. 병합 시 merge() 로 갱신한다."""

    def __init__(self, model: WeightModel, summary: SummaryGraph):
        self.model = model
        self.wsum = np.zeros(summary.node_count, dtype=np.float64)
        self.wsq = np.zeros(summary.node_count, dtype=np.float64)
        np.add.at(self.wsum, summary.membership, model.factor)
        np.add.at(self.wsq, summary.membership, model.factor * model.factor)

    def merge(self, keep: int, drop: int) -> None:
        self.wsum[keep] += self.wsum[drop]
        self.wsq[keep] += self.wsq[drop]
        self.wsum[drop] = 0.0
        self.wsq[drop] = 0.0

    def total_mass(self, a: int, b: int) -> float:
        z = self.model.z
        if a == b:
            return max(0.0, (self.wsum[a] * self.wsum[a] - self.wsq[a]) / (2.0 * z))
        return float(self.wsum[a] * self.wsum[b] / z)


# ── 간선 묶음 (bucketing) ─────────────────────────────────────────────────────

def gather_member_edges(graph: Graph, members: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """members 의 모든 인접 엣지를 (owner, neighbor) 배열로 모은다."""
    members = np.asarray(members, dtype=np.int64)
    lengths = graph.degrees[members]
    total = int(lengths.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    owners = np.repeat(members, lengths)
    starts = graph.indptr[members]
    offsets = np.repeat(starts - (np.cumsum(lengths) - lengths), lengths)
    neighbors = graph.indices[offsets + np.arange(total)]
    return owners, neighbors


def bucket_incident(
    graph: Graph, model: WeightModel, summary: SummaryGraph, a: int
) -> dict[int, tuple[float, int]]:
    """supernode a 의 멤버에 닿은 엣지를 이웃 supernode 별로 묶는다.

    Returns:
        dict: X -> (present_mass, edge_count). X=a 인 내부 엣지는 한 번만 센다.
    """
    owners, neighbors = gather_member_edges(graph, np.asarray(summary.members[a]))
    if owners.shape[0] == 0:
        return {}
    weights = model.factor[owners] * model.factor[neighbors] / model.z
    keys, inverse = np.unique(summary.membership[neighbors], return_inverse=True)
    masses = np.bincount(inverse, weights=weights, minlength=keys.shape[0])
    counts = np.bincount(inverse, minlength=keys.shape[0])
    out: dict[int, tuple[float, int]] = {}
    for x, mass, count in zip(keys.tolist(), masses.tolist(), counts.tolist()):
        if x == a:
            mass, count = mass / 2.0, count // 2
        out[x] = (mass, count)
    return out


# ── 쌍 통계 / 비용 ────────────────────────────────────────────────────────────

def _pair_total_mass(model: WeightModel, summary: SummaryGraph, a: int, b: int) -> float:
    """MassTable 없이 두 supernode 의 멤버만으로 총 질량을 구한다."""
    fa = model.factor[np.asarray(summary.members[a], dtype=np.int64)]
    if a == b:
        return max(0.0, float(fa.sum() ** 2 - np.dot(fa, fa)) / (2.0 * model.z))
    fb = model.factor[np.asarray(summary.members[b], dtype=np.int64)]
    return float(fa.sum() * fb.sum() / model.z)


def pair_stats(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    a: int,
    b: int,
    masses: Optional[MassTable] = None,
) -> PairStats:
    """O(Σ_{u∈A∪B} deg(u)) 시간에 {A, B} 의 충분 통계를 계산한다."""
    summary.check_alive(a, b)
    # 더 작은 쪽의 인접 엣지만 훑는다
    side, other = (a, b) if len(summary.members[a]) <= len(summary.members[b]) else (b, a)
    present, count = bucket_incident(graph, model, summary, side).get(other, (0.0, 0))
    total = masses.total_mass(a, b) if masses is not None else _pair_total_mass(model, summary, a, b)
    return PairStats(present_mass=present, total_mass=total, edge_count=count)


def pair_cost(stats: PairStats, superedge_present: bool, supernode_count: int, node_count: int) -> float:
    """쌍 비용: superedge 가 있으면 2·log2|S| + log2|V|·(누락 질량), 없으면 log2|V|·(엣지 질량)."""
    if supernode_count < 1:
        raise ParameterError("supernode 가 하나 이상 필요합니다.")
    log_v = math.log2(node_count) if node_count > 1 else 0.0
    if superedge_present:
        return 2.0 * math.log2(supernode_count) + log_v * max(0.0, stats.total_mass - stats.present_mass)
    return log_v * stats.present_mass


def optimal_superedge_choice(stats: PairStats, supernode_count: int, node_count: int) -> tuple[bool, float]:
    """비용이 작은 쪽을 고른다. 같으면 superedge 없음 (더 희소한 요약)."""
    with_edge = pair_cost(stats, True, supernode_count, node_count)
    without = pair_cost(stats, False, supernode_count, node_count)
    if with_edge < without:
        return True, with_edge
    return False, without


def supernode_cost(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    a: int,
    masses: Optional[MassTable] = None,
) -> float:
    """Cost_A = Σ_B Cost_AB (현재 superedge 집합 기준, B=A 포함)."""
    summary.check_alive(a)
    masses = masses or MassTable(model, summary)
    buckets = bucket_incident(graph, model, summary, a)
    s, n = summary.supernode_count, summary.node_count
    total = 0.0
    for x in sorted(set(buckets) | summary.superedge_neighbors(a)):
        present, count = buckets.get(x, (0.0, 0))
        stats = PairStats(present, masses.total_mass(a, x), count)
        total += pair_cost(stats, summary.has_superedge(a, x), s, n)
    return total


# ── 전체 비용 ─────────────────────────────────────────────────────────────────

def pair_table(graph: Graph, model: WeightModel, summary: SummaryGraph) -> dict[str, np.ndarray]:
    """엣지나 superedge 가 있는 모든 supernode 쌍의 통계를 한 번에 집계한다. O(|E| + |P|)."""
    n = summary.node_count
    edges = graph.edge_array
    sa = summary.membership[edges[:, 0]]
    sb = summary.membership[edges[:, 1]]
    lo, hi = np.minimum(sa, sb), np.maximum(sa, sb)
    weights = model.factor[edges[:, 0]] * model.factor[edges[:, 1]] / model.z

    superedges = np.array(list(summary.superedges()), dtype=np.int64).reshape(-1, 2)
    keys = np.concatenate([lo * n + hi, superedges[:, 0] * n + superedges[:, 1]])
    uniq, inverse = np.unique(keys, return_inverse=True)
    m = edges.shape[0]
    present = np.bincount(inverse[:m], weights=weights, minlength=uniq.shape[0])
    counts = np.bincount(inverse[:m], minlength=uniq.shape[0])
    flagged = np.zeros(uniq.shape[0], dtype=bool)
    flagged[inverse[m:]] = True

    a, b = uniq // n, uniq % n
    masses = MassTable(model, summary)
    total = np.where(
        a == b,
        np.maximum(0.0, (masses.wsum[a] ** 2 - masses.wsq[a]) / (2.0 * model.z)),
        masses.wsum[a] * masses.wsum[b] / model.z,
    )
    return {"a": a, "b": b, "present": present, "total": total, "count": counts, "superedge": flagged}


def personalized_error(graph: Graph, model: WeightModel, summary: SummaryGraph) -> float:
    """RE^(T) = Σ_{u<v} W(u,v)·|A^(G) - A^(Ĝ)| (쌍 통계 집계, 전체 복원 없음)."""
    table = pair_table(graph, model, summary)
    missing = np.maximum(0.0, table["total"] - table["present"])
    errors = np.where(table["superedge"], missing, table["present"])
    return math.fsum(errors.tolist())


def personalized_error_by_reconstruction(graph: Graph, model: WeightModel, summary: SummaryGraph) -> float:
    """복원 그래프를 실제로 만들어 계산하는 오차 (검증용 오라클, |V| ≤ 5,000)."""
    if graph.node_count > BRUTE_FORCE_LIMIT:
        raise SizeGuardError(f"|V|={graph.node_count} > {BRUTE_FORCE_LIMIT}: 전수 오차 계산은 검증용입니다.")
    n = graph.node_count
    restored = reconstruct_edges(summary)
    original_keys = graph.edge_array[:, 0] * n + graph.edge_array[:, 1]
    restored_keys = restored.edge_array[:, 0] * n + restored.edge_array[:, 1]
    diff = np.setxor1d(original_keys, restored_keys, assume_unique=True)
    u, v = diff // n, diff % n
    return math.fsum((model.factor[u] * model.factor[v] / model.z).tolist())


def total_cost(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    method: Literal["aggregate", "decomposed", "brute_force"] = "aggregate",
) -> float:
    """Cost = Size(Ḡ) + log2|V|·RE^(T)(Ḡ).

    - aggregate   : 쌍 통계 집계로 오차를 구한다 (크기 제한 없음)
    - decomposed  : |V|·log2|S| + Σ Cost_AB (쌍 분해식)
    - brute_force : 복원 그래프를 만들어 오차를 구한다 (|V| ≤ 5,000)
    """
    n = summary.node_count
    log_v = math.log2(n) if n > 1 else 0.0
    if method == "brute_force":
        return summary_size_bits(summary) + log_v * personalized_error_by_reconstruction(graph, model, summary)
    if method == "aggregate":
        return summary_size_bits(summary) + log_v * personalized_error(graph, model, summary)
    if method != "decomposed":
        raise ParameterError(f"알 수 없는 비용 계산 방식: {method}")

    s = summary.supernode_count
    table = pair_table(graph, model, summary)
    costs = [
        pair_cost(PairStats(p, t, int(c)), bool(flag), s, n)
        for p, t, c, flag in zip(
            table["present"].tolist(), table["total"].tolist(), table["count"].tolist(), table["superedge"].tolist()
        )
    ]
    log_s = math.log2(s) if s > 1 else 0.0
    return n * log_s + math.fsum(costs)


# ── 증분 비용 추적 ────────────────────────────────────────────────────────────

class CostTracker:
    """병합/희소화를 거치며 전체 비용을 증분으로 유지한다.

    병합 시 |S| 가 하나 줄면 병합에 닿지 않은 superedge 와 멤버십 비트도
    log2|S| 변화만큼 비용이 바뀐다.
    """

    def __init__(self, graph: Graph, model: WeightModel, summary: SummaryGraph):
        self.total = total_cost(graph, model, summary)

    def record_merge(
        self,
        removed: float,
        added: float,
        node_count: int,
        supernodes_before: int,
        untouched_superedges: int,
    ) -> float:
        shift = _log2_or_zero(supernodes_before - 1) - _log2_or_zero(supernodes_before)
        self.total += added - removed + (node_count + 2 * untouched_superedges) * shift
        return self.total

    def record_drop(self, present_cost: float, absent_cost: float) -> float:
        self.total += absent_cost - present_cost
        return self.total


def _log2_or_zero(x: int) -> float:
    return math.log2(x) if x > 1 else 0.0
