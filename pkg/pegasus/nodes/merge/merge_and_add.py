"""
병합-추가 노드 (merge_and_add)

역할:
  - 후보 그룹마다 |C| 개의 supernode 쌍을 복원추출하여 점수(상대/절대 비용 감소)가
    가장 큰 쌍을 고른다. 동점이면 (작은 id, 큰 id) 가 사전순으로 앞선 쌍.
  - 점수 ≥ θ 이면 병합하고 계획된 superedge 를 설치, 연속 실패 횟수를 0 으로 되돌린다.
  - 아니면 점수를 L 에 추가하고 실패 횟수를 늘린다.
  - 그룹 크기가 1 이 되거나 실패 횟수가 log2(현재 그룹 크기) 를 넘으면 그룹 종료.
  - 다음 노드: update_threshold (항상)
"""

import logging
import math
from typing import Literal, Optional

import numpy as np

from pegasus.config import EngineConfig, substream
from pegasus.core.cost import CostTracker, MassTable
from pegasus.core.graph import Graph
from pegasus.core.personalization import WeightModel
from pegasus.core.summary import SummaryGraph, summary_size_bits
from pegasus.nodes.merge.evaluate import MergePlan, evaluate_merge
from pegasus.pipeline.state import SummarizeState, ThresholdState

logger = logging.getLogger(__name__)


def apply_merge(
    summary: SummaryGraph,
    plan: MergePlan,
    masses: Optional[MassTable] = None,
    tracker: Optional[CostTracker] = None,
) -> int:
    """plan 대로 병합하고 병합된 supernode 에 superedge 를 설치한다."""
    a, b = plan.a, plan.b
    supernodes_before = summary.supernode_count
    incident = (
        len(summary.superedge_neighbors(a))
        + len(summary.superedge_neighbors(b))
        - (1 if summary.has_superedge(a, b) else 0)
    )
    untouched = summary.superedge_count - incident

    keep = summary.merge(a, b)
    if masses is not None:
        masses.merge(keep, max(a, b))
    for x in sorted(plan.superedges):
        summary.add_superedge(keep, x)
    if tracker is not None:
        tracker.record_merge(plan.cost_before, plan.cost_after, summary.node_count, supernodes_before, untouched)
    return keep


def merge_and_add(
    graph: Graph,
    model: WeightModel,
    summary: SummaryGraph,
    group: list[int],
    threshold: ThresholdState,
    rng: np.random.Generator,
    masses: Optional[MassTable] = None,
    tracker: Optional[CostTracker] = None,
    reduction: Literal["relative", "absolute"] = "relative",
    merge_log: Optional[list[dict]] = None,
) -> int:
    """한 후보 그룹 안에서 병합을 반복한다.

    Returns:
        int: 실행된 병합 수 (summary, threshold.rejected 는 제자리에서 갱신)
    """
    masses = masses or MassTable(model, summary)
    members = sorted(group)
    failures = 0
    merges = 0

    while len(members) > 1 and failures <= math.log2(len(members)):
        size = len(members)
        plans: dict[tuple[int, int], MergePlan] = {}
        best: Optional[MergePlan] = None
        best_key: tuple[float, int, int] = (-math.inf, 0, 0)
        for _ in range(size):
            i = int(rng.integers(size))
            j = int(rng.integers(size))
            while j == i:
                j = int(rng.integers(size))
            pair = (min(members[i], members[j]), max(members[i], members[j]))
            plan = plans.get(pair)
            if plan is None:
                plan = plans[pair] = evaluate_merge(graph, model, summary, pair[0], pair[1], masses)
            # 점수 내림차순, 같으면 작은 쌍
            key = (plan.score(reduction), -pair[0], -pair[1])
            if best is None or key > best_key:
                best, best_key = plan, key

        score = best.score(reduction)
        if score >= threshold.theta:
            keep = apply_merge(summary, best, masses, tracker)
            members.remove(max(best.a, best.b))
            merges += 1
            failures = 0
            logger.debug("병합 %d + %d → %d (점수 %.6f, θ %.6f)", best.a, best.b, keep, score, threshold.theta)
            if merge_log is not None:
                merge_log.append({"a": best.a, "b": best.b, "score": score, "theta": threshold.theta})
        else:
            threshold.rejected.append(score)
            failures += 1
    return merges


# ── Node Factory ──────────────────────────────────────────────────────────────

def make_merge_groups_node(graph: Graph, model: WeightModel, config: EngineConfig):
    """그래프·가중치 모델·설정을 주입받아 병합 노드 함수를 반환한다."""

    def merge_groups_node(state: SummarizeState) -> dict:
        summary = state["summary"]
        iteration = state["iteration"]
        merge_log = state.get("merge_log")
        merges = 0
        for index, group in enumerate(state.get("groups") or []):
            entries = [] if merge_log is not None else None
            merges += merge_and_add(
                graph,
                model,
                summary,
                group,
                state["threshold"],
                substream(config.seed, "pairs", iteration, index),
                masses=state["masses"],
                tracker=state["tracker"],
                reduction=config.reduction,
                merge_log=entries,
            )
            if merge_log is not None:
                merge_log.extend({"iteration": iteration, **entry} for entry in entries)

        update = {
            "summary": summary,
            "merges": state.get("merges", 0) + merges,
            "size_bits": summary_size_bits(summary),
            "groups": [],
        }
        if merge_log is not None:
            update["merge_log"] = merge_log
        return update

    return merge_groups_node
