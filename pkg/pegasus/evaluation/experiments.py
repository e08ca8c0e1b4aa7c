"""
실험 드라이버

역할:
  - run_query_accuracy_experiment : 요약별·질의 종류별 SMAPE / Spearman 평균
  - run_personalization_experiment: 타깃 노드에서의 상대 개인화 오차 (α, |T| 별)
  - run_scaling_experiment        : BA 그래프 |E| 대비 실행 시간과 선형 적합 R²
  - run_beta_sweep                : β 에 따른 질의 정확도

모든 드라이버는 명시적 seed 를 받고 JSON-lines 로 쓸 수 있는 ResultRow 를 돌려준다.
"""

import csv
import io
import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from pegasus.config import DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MAX_ITERATIONS, EngineConfig, QueryConfig, substream, validated
from pegasus.core.generators import generate_ba
from pegasus.core.graph import Graph, graph_size_bits
from pegasus.core.personalization import TargetSet
from pegasus.core.summary import SummaryGraph
from pegasus.errors import PegasusError, UndefinedCorrelationError
from pegasus.evaluation.metrics import MetricReport, compression_rate, relative_personalized_error, smape, spearman
from pegasus.pipeline.build_pipeline import run_summarize, summarize
from pegasus.query.engine import QueryKind, run_query

logger = logging.getLogger(__name__)


# ── 결과 행 ───────────────────────────────────────────────────────────────────

class ResultRow(BaseModel):
    dataset: str = Field(description="데이터셋 이름 또는 경로")
    seed: int = Field(description="실행 시드")
    alpha: float = Field(description="개인화 정도 α")
    beta: float = Field(description="적응형 임계값 β")
    budget_ratio: float = Field(description="예산 / 입력 그래프 크기")
    kind: str = Field(description="질의 종류 또는 실험 종류")
    smape_sum: Optional[float] = Field(None, description="질의당 SMAPE 합의 평균")
    smape_mean: Optional[float] = Field(None, description="질의당 SMAPE 평균의 평균")
    spearman: Optional[float] = Field(None, description="질의당 Spearman 의 평균")
    compression_rate: Optional[float] = Field(None, description="Size(Ḡ)/Size(G)")
    wall_ms: float = Field(0.0, description="요약 실행 시간 (ms)")
    summary: Optional[str] = Field(None, description="요약 라벨")
    deployment: Optional[str] = Field(None, description="분산 배치 종류: summary | subgraph")
    target_size: Optional[int] = Field(None, description="|T|")
    relative_error: Optional[float] = Field(None, description="타깃 노드에서 잰 상대 개인화 오차")
    edges: Optional[int] = Field(None, description="|E| (스케일링 실험)")
    query_count: int = Field(0, description="성공한 질의 수")
    failures: int = Field(0, description="실패/답할 수 없는 질의 수")


def write_rows(rows: Iterable[ResultRow], out: Union[str, Path, TextIO]) -> None:
    """JSON-lines 로 쓴다."""
    if isinstance(out, (str, Path)):
        with Path(out).open("w", encoding="utf-8", newline="\n") as fh:
            write_rows(rows, fh)
        return
    for row in rows:
        out.write(row.model_dump_json() + "\n")


def read_rows(path: Union[str, Path]) -> list[ResultRow]:
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(ResultRow.model_validate(json.loads(line)))
    return rows


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    """외부 플롯 도구용 CSV (열 순서 = ResultRow 필드 순서)."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(ResultRow.model_fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.model_dump().items()})
    return buffer.getvalue()


# ── 질의 정확도 ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class AccuracyEntry:
    summary_index: int
    kind: str
    report: MetricReport
    failures: int


_WORKER: dict = {}


def _init_worker(graph: Graph, summaries: list[SummaryGraph], kinds: list[str], options: dict) -> None:
    _WORKER.update(graph=graph, summaries=summaries, kinds=kinds, options=options)


def _score_query(q: int) -> list[tuple[int, str, Optional[tuple[float, float, float]]]]:
    """한 질의 노드에 대해 (요약 index, 종류, (smape 합, smape 평균, spearman) | None) 목록.

    순위 상관이 정의되지 않는 답(상수 벡터)은 SMAPE 만 남기고 spearman 을 NaN 으로 둔다.
    """
    graph, summaries, kinds, options = _WORKER["graph"], _WORKER["summaries"], _WORKER["kinds"], _WORKER["options"]
    out = []
    for kind in kinds:
        truth = run_query(graph, q, kind, **options)
        for index, summary in enumerate(summaries):
            try:
                approx = run_query(summary, q, kind, **options)
                total, mean = smape(truth, approx)
            except PegasusError as exc:
                logger.warning("질의 %d (%s, 요약 %d) 실패: %s", q, kind, index, exc)
                out.append((index, kind, None))
                continue
            try:
                rho = spearman(truth, approx)
            except UndefinedCorrelationError:
                logger.debug("질의 %d (%s, 요약 %d): 순위 상관 정의되지 않음", q, kind, index)
                rho = math.nan
            out.append((index, kind, (total, mean, rho)))
    return out


def _defined_mean(values: np.ndarray) -> float:
    defined = values[~np.isnan(values)]
    return float(defined.mean()) if defined.shape[0] else math.nan


def run_query_accuracy_experiment(
    graph: Graph,
    summaries: Sequence[SummaryGraph],
    query_nodes: Sequence[int],
    kinds: Sequence[QueryKind],
    query_config: Optional[QueryConfig] = None,
    threads: int = 1,
) -> list[AccuracyEntry]:
    """요약마다, 질의 종류마다 원본 그래프의 정답과 비교한 평균 지표 표.

    결과 순서는 (요약 index, kinds 순서) 로 고정이다.
    """
    if not kinds or not summaries or not query_nodes:
        return []
    for q in query_nodes:
        graph.check_node(q)
    query_config = query_config or QueryConfig()
    options = {
        "walk_prob": query_config.walk_prob,
        "c": query_config.php_c,
        "tol": query_config.tol,
        "max_iters": query_config.max_iters,
    }
    args = (graph, list(summaries), list(kinds), options)
    if threads > 1 and len(query_nodes) > 1:
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker, initargs=args) as pool:
            per_query = list(pool.map(_score_query, query_nodes))
    else:
        _init_worker(*args)
        per_query = [_score_query(q) for q in query_nodes]

    table = []
    for index, summary in enumerate(summaries):
        rate = compression_rate(summary, graph) if graph.edge_count else math.nan
        for kind in kinds:
            scores = [
                score
                for results in per_query
                for (i, k, score) in results
                if i == index and k == kind and score is not None
            ]
            failures = len(query_nodes) - len(scores)
            if scores:
                arr = np.asarray(scores, dtype=np.float64)
                report = MetricReport(
                    smape_sum=float(arr[:, 0].mean()),
                    smape_mean=float(arr[:, 1].mean()),
                    spearman=_defined_mean(arr[:, 2]),
                    compression_rate=rate,
                    query_count=len(scores),
                )
            else:
                report = MetricReport(math.nan, math.nan, math.nan, rate, 0)
            table.append(AccuracyEntry(summary_index=index, kind=kind, report=report, failures=failures))
    return table


def sample_query_nodes(graph: Graph, count: int, seed: int) -> list[int]:
    count = min(count, graph.node_count)
    return sorted(substream(seed, "queries").choice(graph.node_count, size=count, replace=False).tolist())


def _engine_config(graph: Graph, budget_ratio: float, alpha: float, beta: float, seed: int, **extra) -> EngineConfig:
    return validated(
        EngineConfig,
        budget_bits=budget_ratio * graph_size_bits(graph),
        alpha=alpha,
        beta=beta,
        seed=seed,
        **extra,
    )


def _accuracy_rows(
    table: list[AccuracyEntry], base: dict, labels: Sequence[str], wall: Sequence[float]
) -> list[ResultRow]:
    rows = []
    for entry in table:
        report = entry.report
        rows.append(
            ResultRow(
                **base[entry.summary_index],
                kind=entry.kind,
                smape_sum=report.smape_sum,
                smape_mean=report.smape_mean,
                spearman=report.spearman,
                compression_rate=report.compression_rate,
                wall_ms=wall[entry.summary_index],
                summary=labels[entry.summary_index],
                query_count=report.query_count,
                failures=entry.failures,
            )
        )
    return rows


def run_personalized_accuracy(
    graph: Graph,
    dataset: str,
    seed: int,
    query_count: int = 100,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    budget_ratio: float = 0.5,
    kinds: Sequence[QueryKind] = ("rwr", "hop", "php"),
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    threads: int = 1,
) -> list[ResultRow]:
    """T = 질의 노드일 때 개인화(α) 요약과 비개인화(α=1) 요약의 질의 정확도 비교."""
    queries = sample_query_nodes(graph, query_count, seed)
    if not queries:
        return []
    targets = TargetSet.of(queries, graph.node_count)
    summaries, labels, wall, base = [], [], [], []
    for label, a in (("personalized", alpha), ("non_personalized", 1.0)):
        cfg = _engine_config(graph, budget_ratio, a, beta, seed, max_iterations=max_iterations)
        summary, report = run_summarize(graph, targets, cfg)
        summaries.append(summary)
        labels.append(label)
        wall.append(report.wall_ms)
        base.append({"dataset": dataset, "seed": seed, "alpha": a, "beta": beta,
                     "budget_ratio": budget_ratio, "target_size": len(targets)})
    table = run_query_accuracy_experiment(graph, summaries, queries, kinds, threads=threads)
    return _accuracy_rows(table, base, labels, wall)


# ── 개인화 효과 ───────────────────────────────────────────────────────────────

def run_personalization_experiment(
    graph: Graph,
    dataset: str,
    seeds: Sequence[int],
    target_sizes: Sequence[int] = (1,),
    alphas: Sequence[float] = (1.0, 1.25, 1.5),
    beta: float = DEFAULT_BETA,
    budget_ratio: float = 0.5,
    focus_count: int = 3,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> list[ResultRow]:
    """타깃 노드 자체(최대 focus_count 개)에서 상대 개인화 오차를 잰다.

    비교 기준은 같은 예산의 비개인화 요약(T=V, α=1).
    """
    rows = []
    for seed in seeds:
        baseline_cfg = _engine_config(graph, budget_ratio, 1.0, beta, seed, max_iterations=max_iterations)
        baseline = summarize(graph, TargetSet.all_nodes(graph.node_count), baseline_cfg)
        for size in target_sizes:
            targets = TargetSet.sample(graph.node_count, size, substream(seed, "targets", size))
            focus_nodes = list(targets.nodes[:focus_count])
            for alpha in alphas:
                cfg = _engine_config(graph, budget_ratio, alpha, beta, seed, max_iterations=max_iterations)
                summary, report = run_summarize(graph, targets, cfg)
                ratios = [
                    r for r in (relative_personalized_error(graph, summary, p, alpha, baseline) for p in focus_nodes)
                    if r is not None
                ]
                rows.append(
                    ResultRow(
                        dataset=dataset,
                        seed=seed,
                        alpha=alpha,
                        beta=beta,
                        budget_ratio=budget_ratio,
                        kind="personalization",
                        compression_rate=compression_rate(summary, graph),
                        wall_ms=report.wall_ms,
                        target_size=size,
                        relative_error=statistics.fmean(ratios) if ratios else None,
                        query_count=len(ratios),
                        failures=len(focus_nodes) - len(ratios),
                    )
                )
    return rows


# ── 스케일링 ──────────────────────────────────────────────────────────────────

def run_scaling_experiment(
    edge_counts: Sequence[int],
    m: int = 5,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    budget_ratio: float = 0.5,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> tuple[list[ResultRow], float]:
    """BA(n, m) 그래프 (|E| ≈ m·(n-m)) 에서 요약 시간을 재고 |E| 대비 선형 적합 R² 를 돌려준다."""
    rows = []
    for target_edges in edge_counts:
        n = target_edges // m + m
        graph = generate_ba(n, m, seed)
        cfg = _engine_config(graph, budget_ratio, alpha, beta, seed, max_iterations=max_iterations)
        targets = TargetSet.sample(graph.node_count, 1, substream(seed, "targets", n))
        started = time.perf_counter()
        summary = summarize(graph, targets, cfg)
        wall_ms = (time.perf_counter() - started) * 1000.0
        logger.info("스케일링: |E|=%d, %.0f ms", graph.edge_count, wall_ms)
        rows.append(
            ResultRow(
                dataset=f"ba_{n}_{m}",
                seed=seed,
                alpha=alpha,
                beta=beta,
                budget_ratio=budget_ratio,
                kind="scaling",
                compression_rate=compression_rate(summary, graph),
                wall_ms=wall_ms,
                edges=graph.edge_count,
            )
        )
    if len(rows) < 2:
        return rows, math.nan
    fit = stats.linregress([row.edges for row in rows], [row.wall_ms for row in rows])
    return rows, float(fit.rvalue ** 2)


# ── β 스윕 ────────────────────────────────────────────────────────────────────

def run_beta_sweep(
    graph: Graph,
    dataset: str,
    seed: int,
    betas: Sequence[float] = (0.01, 0.05, 0.1, 0.2, 0.5),
    alpha: float = DEFAULT_ALPHA,
    budget_ratio: float = 0.5,
    query_count: int = 100,
    kinds: Sequence[QueryKind] = ("rwr",),
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    threads: int = 1,
) -> list[ResultRow]:
    queries = sample_query_nodes(graph, query_count, seed)
    if not queries:
        return []
    targets = TargetSet.of(queries, graph.node_count)
    summaries, labels, wall, base = [], [], [], []
    for beta in betas:
        cfg = _engine_config(graph, budget_ratio, alpha, beta, seed, max_iterations=max_iterations)
        summary, report = run_summarize(graph, targets, cfg)
        summaries.append(summary)
        labels.append(f"beta={beta}")
        wall.append(report.wall_ms)
        base.append({"dataset": dataset, "seed": seed, "alpha": alpha, "beta": beta,
                     "budget_ratio": budget_ratio, "target_size": len(targets)})
    table = run_query_accuracy_experiment(graph, summaries, queries, kinds, threads=threads)
    return _accuracy_rows(table, base, labels, wall)


def median_by(rows: Sequence[ResultRow], field: str, **match) -> float:
    """조건에 맞는 행들의 field 중앙값 (시드 간 중앙값 비교용)."""
    values = [
        getattr(row, field)
        for row in rows
        if all(getattr(row, k) == v for k, v in match.items()) and getattr(row, field) is not None
    ]
    return statistics.median(values) if values else math.nan
