"""
라우팅 함수 모음

각 노드의 conditional_edge 에서 호출되는 함수들.
state 를 읽어 다음 노드 이름(str)을 반환한다.
"""

from langgraph.graph import END

from pegasus.pipeline.state import SummarizeState


def make_route_budget(budget_bits: float):
    """initialize 이후 라우팅.

    - 예산 충족 → END
    - 그 외     → generate_candidates
    """

    def route_budget(state: SummarizeState) -> str:
        if state["size_bits"] <= budget_bits:
            return END
        return "generate_candidates"

    return route_budget


def make_route_iteration(budget_bits: float, max_iterations: int):
    """update_threshold 이후 라우팅.

    - 예산 충족         → END
    - t < t_max         → generate_candidates (다음 반복)
    - t = t_max, 초과   → sparsify
    """

    def route_iteration(state: SummarizeState) -> str:
        if state["size_bits"] <= budget_bits:
            return END
        if state["iteration"] < max_iterations:
            return "generate_candidates"
        return "sparsify"

    return route_iteration
