"""
병합 평가 (evaluate_merge)

역할:
  - 현재 요약에서 Cost_A + Cost_B - Cost_AB 를 구한다 (병합 전 두 supernode 가 부담하는 비용).
  - A∪B 로 합친 뒤 각 이웃 X 와의 superedge 를 optimal_superedge_choice 로 골라
    병합 후 비용 Cost_{A∪B} 를 구한다 (병합 후 |S| 는 하나 줄어든다).
  - Δ = (Cost_A + Cost_B - Cost_AB) - Cost_{A∪B}
  - 상대 감소량 = Δ / (Cost_A + Cost_B - Cost_AB), 분모가 0 이면 0

두 supernode 멤버의 인접 엣지만 훑으므로 O(Σ_{u∈A∪B} deg(u)) 시간.
"""

from dataclasses import dataclass
from typing import Literal, Optional

from pegasus.core.cost import MassTable, PairStats, bucket_incident, optimal_superedge_choice, pair_cost
from pegasus.core.graph import Graph
from pegasus.core.personalization import WeightModel
from pegasus.core.summary import SummaryGraph
from pegasus.errors import ParameterError


@dataclass(frozen=True)
class MergePlan:
    a: int
    b: int
    delta: float
    rel_delta: float
    cost_before: float                  # Cost_A + Cost_B - Cost_AB
    cost_after: float                   # Cost_{A∪B}
    superedges: frozenset[int]          # 병합 후 superedge 상대 (self-loop 는 병합 id)

    @property
    def keep(self) -> int:
        return min(self.a, self.b)

    def score(self, reduction: Literal["relative", "absolute"] = "relative") -> float:
        return self.rel_delta if reduction == "relative" else self.delta


def evaluate_merge(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    a: int,
    b: int,
    masses: Optional[MassTable] = None,
) -> MergePlan:
    if a == b:
        raise ParameterError("같은 supernode 끼리는 병합할 수 없습니다.")
    summary.check_alive(a, b)
    masses = masses or MassTable(model, summary)
    s, n = summary.supernode_count, summary.node_count

    bucket_a = bucket_incident(graph, model, summary, a)
    bucket_b = bucket_incident(graph, model, summary, b)

    def side_cost(x: int, bucket: dict[int, tuple[float, int]]) -> float:
        total = 0.0
        for y in sorted(set(bucket) | summary.superedge_neighbors(x)):
            present, count = bucket.get(y, (0.0, 0))
            total += pair_cost(PairStats(present, masses.total_mass(x, y), count), summary.has_superedge(x, y), s, n)
        return total

    present_ab, count_ab = bucket_a.get(b, (0.0, 0))
    cost_ab = pair_cost(
        PairStats(present_ab, masses.total_mass(a, b), count_ab), summary.has_superedge(a, b), s, n
    )
    cost_before = side_cost(a, bucket_a) + side_cost(b, bucket_b) - cost_ab

    # ── 병합 후 ────────────────────────────────────────────────────────────
    keep = min(a, b)
    wsum = masses.wsum[a] + masses.wsum[b]
    wsq = masses.wsq[a] + masses.wsq[b]
    z = model.z

    merged: dict[int, tuple[float, int]] = {}
    for bucket in (bucket_a, bucket_b):
        for x, (present, count) in bucket.items():
            key = keep if x in (a, b) else x
            old_present, old_count = merged.get(key, (0.0, 0))
            merged[key] = (old_present + present, old_count + count)
    # a-b 사이 엣지는 양쪽 버킷에 한 번씩 들어 있다
    if count_ab:
        self_present, self_count = merged[keep]
        merged[keep] = (self_present - present_ab, self_count - count_ab)

    cost_after = 0.0
    chosen: set[int] = set()
    for x in sorted(merged):
        present, count = merged[x]
        if count == 0:
            continue
        if x == keep:
            total = max(0.0, (wsum * wsum - wsq) / (2.0 * z))
        else:
            total = float(wsum * masses.wsum[x] / z)
        flag, cost = optimal_superedge_choice(PairStats(present, total, count), s - 1, n)
        cost_after += cost
        if flag:
            chosen.add(x)

    delta = cost_before - cost_after
    rel_delta = delta / cost_before if cost_before > 0 else 0.0
    return MergePlan(
        a=a,
        b=b,
        delta=delta,
        rel_delta=rel_delta,
        cost_before=cost_before,
        cost_after=cost_after,
        superedges=frozenset(chosen),
    )
