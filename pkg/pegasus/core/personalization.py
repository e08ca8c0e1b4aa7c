"""
개인화 가중치 모델 (personalization)

역할:
  - 타깃 노드 집합 T 로부터 다중 출발 BFS 로 hop 거리 D(u,T) 를 구한다.
  - 노드별 인자 w_u = α^(-D(u,T)) 와 정규화 상수 z 를 계산한다.
  - 노드 쌍 가중치 W(u,v) = w_u·w_v / z  (|V|x|V| 행렬은 만들지 않는다)

z 는 서로 다른 노드 쌍 전체에 대한 W 의 평균이 1 이 되도록 정한다:
    z = ((Σ w)² - Σ w²) / (|V|·(|V|-1))
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from pegasus.core.graph import Graph
from pegasus.errors import ParameterError

logger = logging.getLogger(__name__)


# ── 타입 ──────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TargetSet:
    """중복 없는 비어 있지 않은 타깃 노드 집합."""

    nodes: tuple[int, ...]

    @classmethod
    def of(cls, nodes: Iterable[int], node_count: int) -> "TargetSet":
        unique = sorted({int(u) for u in nodes})
        if not unique:
            raise ParameterError("타깃 노드 집합이 비어 있습니다.")
        if unique[0] < 0 or unique[-1] >= node_count:
            raise ParameterError(f"타깃 노드 id 는 0..{node_count - 1} 범위여야 합니다.")
        return cls(tuple(unique))

    @classmethod
    def all_nodes(cls, node_count: int) -> "TargetSet":
        return cls(tuple(range(node_count)))

    @classmethod
    def sample(cls, node_count: int, size: int, rng: np.random.Generator) -> "TargetSet":
        if not (1 <= size <= node_count):
            raise ParameterError(f"타깃 표본 크기는 1..{node_count} 범위여야 합니다.")
        picked = rng.choice(node_count, size=size, replace=False)
        return cls.of(picked.tolist(), node_count)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class WeightModel:
    distance: np.ndarray   # D(u,T), 도달 불가 노드는 -1
    factor: np.ndarray     # w_u = α^(-D(u,T)), 도달 불가 노드는 0
    z: float
    alpha: float

    @property
    def node_count(self) -> int:
        return int(self.factor.shape[0])

    def pair_weight(self, u: int, v: int) -> float:
        return pair_weight(self, u, v)


# ── 연산 ──────────────────────────────────────────────────────────────────────

def build_weight_model(graph: Graph, targets: TargetSet, alpha: float) -> WeightModel:
    """다중 출발 BFS 로 거리와 가중치 인자, 정규화 상수 z 를 계산한다."""
    if alpha < 1.0:
        raise ParameterError(f"α 는 1 이상이어야 합니다 (α={alpha}).")
    if len(targets) == 0:
        raise ParameterError("타깃 노드 집합이 비어 있습니다.")
    n = graph.node_count
    if max(targets.nodes) >= n:
        raise ParameterError("타깃 노드가 그래프 범위를 벗어납니다.")

    distance = graph.bfs_levels(targets.nodes)
    reachable = distance >= 0
    factor = np.zeros(n, dtype=np.float64)
    factor[reachable] = np.power(float(alpha), -distance[reachable].astype(np.float64))
    if not reachable.all():
        logger.warning("타깃에서 도달할 수 없는 노드 %d 개: 가중치 0 으로 처리", int((~reachable).sum()))

    if n < 2:
        return WeightModel(distance=distance, factor=factor, z=1.0, alpha=float(alpha))
    total = math.fsum(factor.tolist())
    squares = math.fsum((factor * factor).tolist())
    z = (total * total - squares) / (n * (n - 1))
    if z <= 0.0:
        raise ParameterError("모든 노드 쌍의 가중치가 0 입니다 (타깃이 고립 노드 하나뿐).")
    return WeightModel(distance=distance, factor=factor, z=z, alpha=float(alpha))


def pair_weight(model: WeightModel, u: int, v: int) -> float:
    """W(u,v) = w_u·w_v / z. 자기 자신과의 쌍은 정의되지 않는다."""
    if u == v:
        raise ParameterError("같은 노드 쌍(u=v)에는 가중치가 없습니다.")
    return float(model.factor[u] * model.factor[v] / model.z)


# ── 타깃 파일 ─────────────────────────────────────────────────────────────────

def load_targets(path: Union[str, Path], graph: Graph) -> TargetSet:
    """한 줄에 노드 id 하나, '#' 주석 허용. 원본 id 는 그래프의 재매핑 표로 변환한다."""
    lookup = None
    if graph.original_ids is not None:
        lookup = {int(orig): dense for dense, orig in enumerate(graph.original_ids.tolist())}
    nodes: list[int] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_number, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                value = int(line.split()[0])
            except ValueError:
                raise ParameterError(f"{path}:{line_number}: 정수 노드 id 가 아닙니다: {line!r}") from None
            if lookup is not None:
                if value not in lookup:
                    raise ParameterError(f"{path}:{line_number}: 그래프에 없는 노드 {value}")
                value = lookup[value]
            nodes.append(value)
    return TargetSet.of(nodes, graph.node_count)
