"""
추가 희소화 노드 (sparsify)

역할:
  - 반복이 끝난 뒤에도 요약 크기가 예산 k 를 넘으면 superedge 를 제거한다.
  - superedge 는 (있음 기준) 쌍 비용 오름차순, 같으면 사전순으로 한 번만 정렬하여
    크기 ≤ k 가 될 때까지 앞에서부터 떨어뜨린다. 멤버십은 바꾸지 않는다.
  - |V|·log2|S| > k 이면 superedge 를 모두 지워도 불가능하므로 BudgetInfeasibleError.
  - 다음 노드: END
"""

import logging
import math
from typing import Optional

import numpy as np

from pegasus.config import EngineConfig
from pegasus.core.cost import CostTracker, PairStats, pair_cost, pair_table
from pegasus.core.graph import Graph
from pegasus.core.personalization import WeightModel
from pegasus.core.summary import SummaryGraph, summary_size_bits
from pegasus.errors import BudgetInfeasibleError
from pegasus.pipeline.state import SummarizeState

logger = logging.getLogger(__name__)


def sparsify(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    budget_bits: float,
    tracker: Optional[CostTracker] = None,
) -> int:
    """Returns: 제거한 superedge 수 (summary 는 제자리에서 갱신)"""
    if summary_size_bits(summary) <= budget_bits:
        return 0
    s, n = summary.supernode_count, summary.node_count
    log_s = math.log2(s) if s > 1 else 0.0
    residual = n * log_s
    if residual > budget_bits:
        raise BudgetInfeasibleError(residual_bits=residual, budget_bits=budget_bits)

    table = pair_table(graph, model, summary)
    flagged = np.flatnonzero(table["superedge"])
    ranked = []
    for i in flagged.tolist():
        stats = PairStats(float(table["present"][i]), float(table["total"][i]), int(table["count"][i]))
        present_cost = pair_cost(stats, True, s, n)
        ranked.append((present_cost, int(table["a"][i]), int(table["b"][i]), pair_cost(stats, False, s, n)))
    ranked.sort()

    dropped = 0
    for present_cost, a, b, absent_cost in ranked:
        if summary_size_bits(summary) <= budget_bits:
            break
        summary.remove_superedge(a, b)
        if tracker is not None:
            tracker.record_drop(present_cost, absent_cost)
        dropped += 1
    logger.info("희소화: superedge %d 개 제거, 크기 %.1f bits", dropped, summary_size_bits(summary))
    return dropped


# ── Node Factory ──────────────────────────────────────────────────────────────

def make_sparsify_node(graph: Graph, model: WeightModel, config: EngineConfig):
    """그래프·가중치 모델·설정을 주입받아 희소화 노드 함수를 반환한다."""

    def sparsify_node(state: SummarizeState) -> dict:
        summary = state["summary"]
        dropped = sparsify(graph, model, summary, config.budget_bits, state.get("tracker"))
        return {
            "summary": summary,
            "sparsified": state.get("sparsified", 0) + dropped,
            "size_bits": summary_size_bits(summary),
        }

    return sparsify_node
