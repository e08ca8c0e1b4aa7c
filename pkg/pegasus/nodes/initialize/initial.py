"""
초기화 노드 (initialize)

역할:
  - 모든 노드를 단일 supernode 로, 입력 엣지마다 superedge 하나를 둔다.
  - supernode 별 가중치 합 테이블과 증분 비용 추적기를 만든다.
  - θ 를 초기값(adaptive: theta_init, fixed: θ(0)=1)으로 둔다.
  - 예산이 |V| bits 보다 작으면 병합 전에 BudgetInfeasibleError.
  - 다음 노드: route_budget (generate_candidates | END)
"""

import logging

from pegasus.config import EngineConfig
from pegasus.core.cost import CostTracker, MassTable
from pegasus.core.graph import Graph
from pegasus.core.personalization import WeightModel
from pegasus.core.summary import initial_summary, summary_size_bits
from pegasus.errors import BudgetInfeasibleError
from pegasus.nodes.threshold.update import fixed_threshold
from pegasus.pipeline.state import SummarizeState, ThresholdState

logger = logging.getLogger(__name__)


def make_initialize_node(graph: Graph, model: WeightModel, config: EngineConfig):
    """그래프·가중치 모델·설정을 주입받아 초기화 노드 함수를 반환한다."""

    def initialize_node(state: SummarizeState) -> dict:
        # supernode 가 둘 이상이면 superedge 없이도 |V|·log2 2 = |V| bits
        floor_bits = float(graph.node_count)
        if graph.node_count > 1 and config.budget_bits < floor_bits:
            raise BudgetInfeasibleError(residual_bits=floor_bits, budget_bits=config.budget_bits)

        summary = initial_summary(graph)
        if config.threshold_mode == "fixed":
            theta = fixed_threshold(0, config.max_iterations)
        else:
            theta = config.theta_init
        size_bits = summary_size_bits(summary)
        logger.info(
            "초기 요약: |V|=%d |E|=%d size=%.1f bits, 예산 %.1f bits",
            graph.node_count, graph.edge_count, size_bits, config.budget_bits,
        )
        return {
            "summary": summary,
            "masses": MassTable(model, summary),
            "tracker": CostTracker(graph, model, summary),
            "iteration": 0,
            "groups": [],
            "threshold": ThresholdState(theta=theta),
            "size_bits": size_bits,
            "theta_trace": [theta],
        }

    return initialize_node
