"""
임계값 갱신 노드 (update_threshold)

역할:
  - adaptive : ⌊β·|L|⌋ ≥ 1 이면 θ ← L 의 ⌊β·|L|⌋ 번째 최댓값, 아니면 유지
  - fixed    : θ(t) = 1/(1+t) (t < t_max), 이후 0
  - 어느 경우든 L 을 비우고 반복 카운터를 올린다.
  - 다음 노드: route_iteration (generate_candidates | sparsify | END)
"""

import logging
import math

import numpy as np

from pegasus.config import EngineConfig
from pegasus.core.summary import summary_size_bits
from pegasus.pipeline.state import SummarizeState, ThresholdState

logger = logging.getLogger(__name__)


def update_threshold(state: ThresholdState, beta: float) -> ThresholdState:
    """O(|L|) 선택으로 θ 를 갱신한 새 ThresholdState (L 은 비어 있음)."""
    k = math.floor(beta * len(state.rejected))
    theta = state.theta
    if k >= 1:
        values = np.asarray(state.rejected, dtype=np.float64)
        # k 번째 최댓값 = 오름차순 (n-k) 번째
        theta = float(np.partition(values, values.shape[0] - k)[values.shape[0] - k])
    return ThresholdState(theta=theta, rejected=[])


def fixed_threshold(iteration: int, max_iterations: int) -> float:
    """고정 스케줄 θ(t) = 1/(1+t). t ≥ t_max 이면 0."""
    if iteration >= max_iterations:
        return 0.0
    return 1.0 / (1.0 + iteration)


# ── Node Factory ──────────────────────────────────────────────────────────────

def make_update_threshold_node(config: EngineConfig):
    """엔진 설정을 주입받아 임계값 갱신 노드 함수를 반환한다."""

    def update_threshold_node(state: SummarizeState) -> dict:
        current = state["threshold"]
        iteration = state["iteration"] + 1
        rejected = len(current.rejected)
        if config.threshold_mode == "fixed":
            threshold = ThresholdState(theta=fixed_threshold(iteration, config.max_iterations))
        else:
            threshold = update_threshold(current, config.beta)

        summary = state["summary"]
        size_bits = summary_size_bits(summary)
        cost = state["tracker"].total
        logger.info(
            "반복 %d: |S|=%d |P|=%d size=%.1f bits cost=%.1f θ=%.6f |L|=%d",
            iteration, summary.supernode_count, summary.superedge_count, size_bits, cost, threshold.theta, rejected,
        )
        update = {
            "iteration": iteration,
            "threshold": threshold,
            "size_bits": size_bits,
            "theta_trace": [*state.get("theta_trace", []), threshold.theta],
        }
        if state.get("iteration_log") is not None:
            update["iteration_log"] = [
                *state["iteration_log"],
                {
                    "iteration": iteration,
                    "supernodes": summary.supernode_count,
                    "superedges": summary.superedge_count,
                    "size_bits": size_bits,
                    "cost": cost,
                    "rejected": rejected,
                },
            ]
        return update

    return update_threshold_node
