"""
요약 파이프라인 빌더 (build_pipeline)

노드 등록 → 엣지 연결 → 컴파일 순서로 그래프를 구성한다.

전체 흐름:
  [START]
    │
    ▼
  initialize ─── budget ─┬─▶ [END]
                         └─▶ generate_candidates ─▶ merge_groups ─▶ update_threshold ─── iteration ─┬─▶ generate_candidates
                                                                                                     ├─▶ sparsify ─▶ [END]
                                                                                                     └─▶ [END]
"""

import logging
import time
from typing import Optional

from langgraph.graph import END, StateGraph
from pydantic import BaseModel, Field

from pegasus.config import EngineConfig
from pegasus.core.graph import Graph
from pegasus.core.personalization import TargetSet, WeightModel, build_weight_model
from pegasus.core.summary import SummaryGraph
from pegasus.nodes.candidates.shingle import make_generate_candidates_node
from pegasus.nodes.initialize.initial import make_initialize_node
from pegasus.nodes.merge.merge_and_add import make_merge_groups_node
from pegasus.nodes.sparsify.sparsify import make_sparsify_node
from pegasus.nodes.threshold.update import make_update_threshold_node
from pegasus.pipeline.route import make_route_budget, make_route_iteration
from pegasus.pipeline.state import SummarizeState

logger = logging.getLogger(__name__)


def build_pipeline(graph: Graph, model: WeightModel, config: EngineConfig, checkpointer=None):
    """
    그래프·가중치 모델·엔진 설정을 받아 요약 파이프라인을 컴파일하여 반환한다.

    Args:
        graph: 전처리된 입력 그래프
        model: 타깃 집합으로부터 만든 가중치 모델
        config: 엔진 설정 (예산, β, t_max, seed ...)
        checkpointer: LangGraph checkpointer. 요약은 한 번에 끝나므로 보통 None.

    Returns:
        CompiledGraph: invoke 가능한 LangGraph 그래프
    """

    # ── 노드 함수 생성 (그래프/모델/설정 주입) ────────────────────────────
    initialize          = make_initialize_node(graph, model, config)
    generate_candidates = make_generate_candidates_node(graph, config)
    merge_groups        = make_merge_groups_node(graph, model, config)
    update_threshold    = make_update_threshold_node(config)
    sparsify            = make_sparsify_node(graph, model, config)

    # ── 그래프 초기화 ─────────────────────────────────────────────────────
    pipeline = StateGraph(SummarizeState)

    # ── 노드 등록 ─────────────────────────────────────────────────────────
    pipeline.add_node("initialize",          initialize)
    pipeline.add_node("generate_candidates", generate_candidates)
    pipeline.add_node("merge_groups",        merge_groups)
    pipeline.add_node("update_threshold",    update_threshold)
    pipeline.add_node("sparsify",            sparsify)

    # ── 엔트리 포인트 ─────────────────────────────────────────────────────
    pipeline.set_entry_point("initialize")

    # ── 초기화 → (END | 후보 생성) ────────────────────────────────────────
    pipeline.add_conditional_edges(
        "initialize",
        make_route_budget(config.budget_bits),
        {
            END:                   END,
            "generate_candidates": "generate_candidates",
        },
    )

    # ── 한 반복: 후보 생성 → 병합 → 임계값 갱신 ──────────────────────────
    pipeline.add_edge("generate_candidates", "merge_groups")
    pipeline.add_edge("merge_groups", "update_threshold")

    # ── 임계값 갱신 → (다음 반복 | 희소화 | END) ──────────────────────────
    pipeline.add_conditional_edges(
        "update_threshold",
        make_route_iteration(config.budget_bits, config.max_iterations),
        {
            END:                   END,
            "generate_candidates": "generate_candidates",
            "sparsify":            "sparsify",
        },
    )

    pipeline.add_edge("sparsify", END)

    return pipeline.compile(checkpointer=checkpointer)


def get_initial_state(config: EngineConfig) -> dict:
    """파이프라인 최초 실행 시 사용할 초기 state 를 반환한다."""
    state = {
        "iteration":   0,
        "groups":      [],
        "merges":      0,
        "sparsified":  0,
        "theta_trace": [],
    }
    if config.audit:
        state["merge_log"] = []
        state["iteration_log"] = []
    return state


# ── 실행 ──────────────────────────────────────────────────────────────────────

class RunReport(BaseModel):
    iterations_used: int = Field(description="실행된 반복 수")
    final_size_bits: float = Field(description="최종 요약 크기 (bits)")
    budget_bits: float = Field(description="요약 크기 예산 k (bits)")
    merges: int = Field(description="실행된 병합 수")
    sparsified_superedges: int = Field(description="희소화로 제거된 superedge 수")
    theta_trace: list[float] = Field(description="반복별 θ (초기값 포함)")
    wall_ms: float = Field(description="실행 시간 (ms)")
    supernodes: int = Field(description="|S|")
    superedges: int = Field(description="|P|")
    final_cost: float = Field(description="증분 추적한 전체 비용 (크기 + log2|V|·오차)")
    config: dict = Field(default_factory=dict, description="실행에 쓰인 전체 설정")
    merge_log: Optional[list[dict]] = Field(None, description="감사 로그: 병합 순서")
    iteration_log: Optional[list[dict]] = Field(None, description="감사 로그: 반복별 |S|, |P|, 크기, 비용, |L|")


def run_summarize(
    graph: Graph,
    targets: TargetSet,
    config: EngineConfig,
    model: Optional[WeightModel] = None,
) -> tuple[SummaryGraph, RunReport]:
    """요약 파이프라인을 실행하고 요약 그래프와 실행 리포트를 반환한다."""
    started = time.perf_counter()
    model = model or build_weight_model(graph, targets, config.alpha)
    pipeline = build_pipeline(graph, model, config)
    final = pipeline.invoke(
        get_initial_state(config),
        config={"recursion_limit": 4 * config.max_iterations + 10},
    )
    summary: SummaryGraph = final["summary"]
    report = RunReport(
        iterations_used=final["iteration"],
        final_size_bits=final["size_bits"],
        budget_bits=config.budget_bits,
        merges=final.get("merges", 0),
        sparsified_superedges=final.get("sparsified", 0),
        theta_trace=final.get("theta_trace", []),
        wall_ms=(time.perf_counter() - started) * 1000.0,
        supernodes=summary.supernode_count,
        superedges=summary.superedge_count,
        final_cost=final["tracker"].total,
        config=config.model_dump(),
        merge_log=final.get("merge_log"),
        iteration_log=final.get("iteration_log"),
    )
    logger.info(
        "요약 완료: 반복 %d, 병합 %d, 희소화 %d, 크기 %.1f / %.1f bits",
        report.iterations_used, report.merges, report.sparsified_superedges,
        report.final_size_bits, report.budget_bits,
    )
    return summary, report


def summarize(graph: Graph, targets: TargetSet, config: EngineConfig) -> SummaryGraph:
    """타깃 집합에 맞춘 개인화 요약 그래프 (크기 ≤ config.budget_bits)."""
    summary, _ = run_summarize(graph, targets, config)
    return summary
