"""
평가 지표

- smape                       : Σ |x - x̂| / (|x| + |x̂|) (둘 다 0 이면 0), 합과 평균
- spearman                    : 평균 순위(동점) 벡터의 Pearson 상관계수
- compression_rate            : Size(Ḡ) / Size(G)
- weighted_summary_size_bits  : 가중 superedge 요약의 크기 (외부 요약용)
- relative_personalized_error : 노드 u 에 대한 RE^({u}) 의 비 (개인화 / 비개인화)
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import stats

from pegasus.core.cost import personalized_error
from pegasus.core.graph import Graph, graph_size_bits
from pegasus.core.personalization import TargetSet, build_weight_model
from pegasus.core.summary import SummaryGraph, summary_size_bits
from pegasus.errors import LengthMismatchError, ParameterError, SizeGuardError, UndefinedCorrelationError
from pegasus.query.engine import AnswerVector

RELATIVE_ERROR_LIMIT = 50_000

Vector = Union[AnswerVector, np.ndarray, list]


@dataclass(frozen=True)
class MetricReport:
    smape_sum: float
    smape_mean: float
    spearman: float
    compression_rate: float
    query_count: int


def _values(x: Vector) -> np.ndarray:
    if isinstance(x, AnswerVector):
        x = x.values
    return np.asarray(x, dtype=np.float64)


def smape(x: Vector, xhat: Vector) -> tuple[float, float]:
    """Returns: (합, 길이로 나눈 평균)"""
    a, b = _values(x), _values(xhat)
    if a.shape != b.shape:
        raise LengthMismatchError(f"길이가 다릅니다: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        return 0.0, 0.0
    denom = np.abs(a) + np.abs(b)
    terms = np.zeros_like(a)
    nonzero = denom > 0
    terms[nonzero] = np.abs(a - b)[nonzero] / denom[nonzero]
    total = math.fsum(terms.tolist())
    return total, total / a.shape[0]


def spearman(x: Vector, xhat: Vector) -> float:
    a, b = _values(x), _values(xhat)
    if a.shape != b.shape:
        raise LengthMismatchError(f"길이가 다릅니다: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise UndefinedCorrelationError("순위 상관계수에는 원소가 2개 이상 필요합니다.")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise UndefinedCorrelationError("상수 벡터에는 순위 상관계수가 정의되지 않습니다.")
    rho = stats.pearsonr(stats.rankdata(a, method="average"), stats.rankdata(b, method="average"))[0]
    return float(np.clip(rho, -1.0, 1.0))


def compression_rate(summary: SummaryGraph, graph: Graph) -> float:
    if graph.edge_count < 1:
        raise ParameterError("엣지가 없는 그래프의 압축률은 정의되지 않습니다.")
    return summary_size_bits(summary) / graph_size_bits(graph)


def weighted_summary_size_bits(supernodes: int, superedges: int, nodes: int, max_weight: int) -> float:
    """|P|·(2·log2|S| + log2 ω_max) + |V|·log2|S|"""
    if min(supernodes, superedges, nodes, max_weight) < 1:
        raise ParameterError("모든 값은 1 이상이어야 합니다.")
    log_s = math.log2(supernodes)
    return superedges * (2.0 * log_s + math.log2(max_weight)) + nodes * log_s


def relative_personalized_error(
    graph: Graph,
    summary: SummaryGraph,
    focus: int,
    alpha: float,
    baseline: SummaryGraph,
) -> Optional[float]:
    """RE^({focus})(summary) / RE^({focus})(baseline).

    분모가 0 이면 분자도 0 일 때 None(해당 없음), 분자만 양수이면 +inf.
    """
    if graph.node_count > RELATIVE_ERROR_LIMIT:
        raise SizeGuardError(f"|V|={graph.node_count} > {RELATIVE_ERROR_LIMIT}")
    graph.check_node(focus)
    model = build_weight_model(graph, TargetSet.of([focus], graph.node_count), alpha)
    numerator = personalized_error(graph, model, summary)
    denominator = personalized_error(graph, model, baseline)
    if denominator > 0:
        return numerator / denominator
    if numerator > 0:
        return math.inf
    return None
