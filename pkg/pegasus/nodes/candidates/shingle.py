"""
후보 그룹 생성 노드 (generate_candidates)

역할:
  - 반복마다 새 해시 f: V → {1..|V|} (시드 고정 Fisher-Yates 순열) 를 뽑는다.
  - supernode A 의 shingle F(A) = min_{u∈A} min_{v∈N(u)∪{u}} f(v)
  - shingle 이 같은 supernode 끼리 후보 그룹으로 묶는다.
  - group_cap 을 넘는 그룹은 새 순열로 최대 shingle_rounds 번 재분할하고,
    그래도 크면 무작위로 섞어 group_cap 이하 조각으로 자른다.
  - 크기 1 그룹은 버린다.
  - 다음 노드: merge_groups (항상)
"""

import logging
from typing import Optional

import numpy as np

from pegasus.config import EngineConfig, substream
from pegasus.core.graph import Graph
from pegasus.core.summary import SummaryGraph
from pegasus.pipeline.state import SummarizeState

logger = logging.getLogger(__name__)


# ── 해시 / shingle ────────────────────────────────────────────────────────────

def draw_ranks(node_count: int, rng: np.random.Generator) -> np.ndarray:
    """ranks[u] = f(u). 1..|V| 의 전단사."""
    return rng.permutation(node_count).astype(np.int64) + 1


def node_shingles(graph: Graph, ranks: np.ndarray) -> np.ndarray:
    """각 노드의 닫힌 이웃 N(u)∪{u} 에 대한 최소 rank."""
    out = ranks.astype(np.int64).copy()
    has_nbrs = graph.degrees > 0
    if has_nbrs.any():
        starts = graph.indptr[:-1][has_nbrs]
        nbr_min = np.minimum.reduceat(ranks[graph.indices], starts)
        out[has_nbrs] = np.minimum(out[has_nbrs], nbr_min)
    return out


def supernode_shingles(summary: SummaryGraph, per_node: np.ndarray) -> np.ndarray:
    """id 로 인덱싱되는 supernode shingle 배열 (살아 있지 않은 id 는 의미 없음)."""
    out = np.full(summary.node_count, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(out, summary.membership, per_node)
    return out


def shingle(summary: SummaryGraph, graph: Graph, ranks: np.ndarray, a: int) -> int:
    summary.check_alive(a)
    members = np.asarray(summary.members[a], dtype=np.int64)
    return int(node_shingles(graph, ranks)[members].min())


# ── 그룹 분할 ─────────────────────────────────────────────────────────────────

def _split_by_key(ids: np.ndarray, keys: np.ndarray) -> list[np.ndarray]:
    """keys 가 같은 id 끼리 묶는다. 그룹은 key 오름차순, 그룹 내부는 id 오름차순."""
    order = np.lexsort((ids, keys))
    ids, keys = ids[order], keys[order]
    cuts = np.flatnonzero(np.diff(keys)) + 1
    return np.split(ids, cuts)


def generate_candidates(
    summary: SummaryGraph,
    graph: Graph,
    seed: int,
    iteration: int,
    group_cap: int = 500,
    shingle_rounds: int = 10,
    ranks: Optional[np.ndarray] = None,
) -> list[list[int]]:
    """살아 있는 supernode 들을 shingle 로 묶은 후보 그룹 목록 (크기 ≥ 2)."""
    if ranks is None:
        ranks = draw_ranks(graph.node_count, substream(seed, "hash", iteration, 0))
    live = np.asarray(summary.supernodes(), dtype=np.int64)
    keys = supernode_shingles(summary, node_shingles(graph, ranks))
    pending = _split_by_key(live, keys[live])

    for round_no in range(1, shingle_rounds + 1):
        if all(group.shape[0] <= group_cap for group in pending):
            break
        fresh = supernode_shingles(
            summary,
            node_shingles(graph, draw_ranks(graph.node_count, substream(seed, "hash", iteration, round_no))),
        )
        refined: list[np.ndarray] = []
        for group in pending:
            if group.shape[0] > group_cap:
                refined.extend(_split_by_key(group, fresh[group]))
            else:
                refined.append(group)
        pending = refined

    groups: list[list[int]] = []
    chunk_rng = substream(seed, "chunk", iteration)
    for group in pending:
        if group.shape[0] > group_cap:
            shuffled = chunk_rng.permutation(group)
            pieces = [shuffled[i:i + group_cap] for i in range(0, shuffled.shape[0], group_cap)]
            logger.debug("그룹 %d 개를 무작위 분할 (크기 %d)", len(pieces), group.shape[0])
        else:
            pieces = [group]
        groups.extend(sorted(piece.tolist()) for piece in pieces if piece.shape[0] > 1)
    return groups


# ── Node Factory ──────────────────────────────────────────────────────────────

def make_generate_candidates_node(graph: Graph, config: EngineConfig):
    """그래프와 엔진 설정을 주입받아 후보 생성 노드 함수를 반환한다."""

    def generate_candidates_node(state: SummarizeState) -> dict:
        groups = generate_candidates(
            state["summary"],
            graph,
            seed=config.seed,
            iteration=state["iteration"],
            group_cap=config.group_cap,
            shingle_rounds=config.shingle_rounds,
        )
        logger.debug("반복 %d: 후보 그룹 %d 개", state["iteration"], len(groups))
        return {"groups": groups}

    return generate_candidates_node
