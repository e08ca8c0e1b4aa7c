from dataclasses import dataclass, field
from typing import Optional, TypedDict

from pegasus.core.cost import CostTracker, MassTable
from pegasus.core.summary import SummaryGraph


@dataclass
class ThresholdState:
    """병합 임계값 θ 와 이번 반복에서 거절된 최대 감소량 목록 L."""

    theta: float
    rejected: list[float] = field(default_factory=list)


class SummarizeState(TypedDict, total=False):
    """요약 파이프라인(LangGraph) 상태 정의.

    그래프/가중치 모델/설정은 노드 팩토리가 클로저로 보관하고,
    state 에는 반복마다 바뀌는 값만 싣는다.
    """

    # ── 요약 그래프 ───────────────────────────────────────
    summary: SummaryGraph
    masses: MassTable                     # supernode 별 Σw, Σw²
    tracker: CostTracker                  # 증분 전체 비용

    # ── 반복 진행 ─────────────────────────────────────────
    iteration: int                        # 완료된 반복 수 t
    groups: list[list[int]]               # 이번 반복의 후보 그룹
    threshold: ThresholdState             # θ 와 거절된 감소량 목록 L
    size_bits: float                      # 현재 요약 크기 (bits)

    # ── 누적 결과 ─────────────────────────────────────────
    merges: int
    sparsified: int                       # 희소화로 제거된 superedge 수
    theta_trace: list[float]              # 반복별 θ

    # ── 감사 로그 (EngineConfig.audit) ────────────────────
    # merge_log 항목: {"iteration", "a", "b", "score", "theta"}
    # iteration_log 항목: {"iteration", "supernodes", "superedges", "size_bits", "cost", "rejected"}
    merge_log: Optional[list[dict]]
    iteration_log: Optional[list[dict]]
