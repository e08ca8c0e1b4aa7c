"""
통신 없는 분산 다중 질의 시뮬레이션 (distributed_sim)

역할:
  - build_deployment_summaries : 머신 i 마다 T = V_i, 예산 k 인 개인화 요약을 만든다.
  - build_deployment_subgraphs : 비교 기준. V_i 에 가까운 엣지부터 2·|E_i|·log2|V| ≤ k 만큼 담는다.
  - answer_multi               : 질의 노드의 담당 머신 하나의 payload 만 읽어 답한다.
  - save_deployment / load_deployment : manifest(JSON) + routing TSV + payload 파일
  - run_distsim                : 시나리오 파일 실행, 배치 종류별 ResultRow

머신은 같은 프로세스 안의 격리된 객체이며, payload 접근 횟수를 세어
질의마다 정확히 한 머신만 읽었는지 확인할 수 있다.
"""

import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from pegasus.config import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_MAX_ITERATIONS,
    EngineConfig,
    QueryConfig,
    substream,
    validated,
)
from pegasus.core.generators import generate
from pegasus.core.graph import Graph, graph_size_bits, load_edge_list, save_edge_list
from pegasus.core.personalization import TargetSet
from pegasus.core.pgs_format import load_summary, save_summary
from pegasus.core.summary import SummaryGraph, summary_size_bits
from pegasus.distributed.partition import PartitionMethod, partition, routing_table
from pegasus.errors import BudgetInfeasibleError, ParameterError, PegasusError
from pegasus.evaluation.experiments import ResultRow
from pegasus.evaluation.metrics import smape, spearman
from pegasus.pipeline.build_pipeline import summarize
from pegasus.query.engine import AnswerVector, GraphSource, NeighborhoodSource, QueryKind, SummarySource, run_query

logger = logging.getLogger(__name__)

DeploymentKind = Literal["summary", "subgraph"]


# ── 머신 / 배치 ───────────────────────────────────────────────────────────────

@dataclass(eq=False)
class Machine:
    index: int
    payload: Union[SummaryGraph, Graph]
    accesses: int = 0
    _source: Optional[NeighborhoodSource] = field(default=None, repr=False)

    @property
    def kind(self) -> DeploymentKind:
        return "summary" if isinstance(self.payload, SummaryGraph) else "subgraph"

    def source(self) -> NeighborhoodSource:
        """payload 를 읽는 유일한 통로. 호출마다 접근 횟수를 센다."""
        self.accesses += 1
        if self._source is None:
            if isinstance(self.payload, SummaryGraph):
                self._source = SummarySource(self.payload)
            else:
                self._source = GraphSource(self.payload)
        return self._source

    def size_bits(self) -> float:
        if isinstance(self.payload, SummaryGraph):
            return summary_size_bits(self.payload)
        return graph_size_bits(self.payload)


@dataclass(eq=False)
class Deployment:
    machine_count: int
    per_machine_budget_bits: float
    routing: np.ndarray
    machines: list[Machine]
    kind: DeploymentKind

    def route(self, q: int) -> Machine:
        if not (0 <= int(q) < self.routing.shape[0]):
            raise ParameterError(f"질의 노드 {q} 는 라우팅 표에 없습니다.")
        return self.machines[int(self.routing[q])]

    def access_counts(self) -> list[int]:
        return [m.accesses for m in self.machines]


@dataclass(frozen=True, eq=False)
class QueryRecord:
    index: int
    node: int
    kind: QueryKind
    machine: int
    touched: tuple[int, ...]                # 이 질의 중 payload 를 읽은 머신 목록
    answer: Optional[AnswerVector]          # None 이면 답할 수 없음

    @property
    def answerable(self) -> bool:
        return self.answer is not None


# ── 배치 구성 ─────────────────────────────────────────────────────────────────

def _build_part_summary(args: tuple[Graph, list[int], EngineConfig, int]) -> SummaryGraph:
    graph, part, config, index = args
    try:
        return summarize(graph, TargetSet.of(part, graph.node_count), config)
    except BudgetInfeasibleError as exc:
        raise BudgetInfeasibleError(exc.residual_bits, exc.budget_bits, machine=index) from exc


def build_deployment_summaries(
    graph: Graph,
    parts: list[list[int]],
    budget_bits: float,
    config: EngineConfig,
    threads: int = 1,
) -> Deployment:
    """머신마다 T = V_i, 예산 k 로 요약을 만든다. 머신 i 의 시드는 (seed, i) 에서 파생."""
    routing = routing_table(parts, graph.node_count)
    jobs = [
        (graph, part, config.model_copy(update={"budget_bits": budget_bits, "seed": config.seed + i}), i)
        for i, part in enumerate(parts)
    ]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            summaries = list(pool.map(_build_part_summary, jobs))
    else:
        summaries = [_build_part_summary(job) for job in jobs]
    machines = [Machine(index=i, payload=s) for i, s in enumerate(summaries)]
    logger.info("요약 배치: m=%d, 머신별 크기 %s", len(parts), [round(m.size_bits(), 1) for m in machines])
    return Deployment(len(parts), budget_bits, routing, machines, kind="summary")


def closest_edges(graph: Graph, part: list[int], max_edges: int) -> np.ndarray:
    """가까운 끝점의 V_i 까지 hop 거리 오름차순, 같으면 (u, v) 사전순으로 max_edges 개."""
    edges = graph.edge_array
    dist = graph.bfs_levels(part).astype(np.float64)
    dist[dist < 0] = np.inf
    edge_dist = np.minimum(dist[edges[:, 0]], dist[edges[:, 1]])
    order = np.lexsort((edges[:, 1], edges[:, 0], edge_dist))
    return edges[order[:max_edges]]


def build_deployment_subgraphs(graph: Graph, parts: list[list[int]], budget_bits: float) -> Deployment:
    """겹치는 부분 그래프 배치. 크기는 전체 |V| 기준 2·|E_i|·log2|V| 로 센다."""
    routing = routing_table(parts, graph.node_count)
    per_edge = 2.0 * math.log2(graph.node_count) if graph.node_count > 1 else 0.0
    if per_edge <= 0 or budget_bits < per_edge:
        raise ParameterError(f"예산 {budget_bits:.4f} bits 로는 엣지 하나({per_edge:.4f} bits)도 담을 수 없습니다.")
    max_edges = min(graph.edge_count, math.floor(budget_bits / per_edge + 1e-9))
    machines = []
    for i, part in enumerate(parts):
        kept = closest_edges(graph, part, max_edges)
        machines.append(Machine(index=i, payload=Graph.from_edges(graph.node_count, kept)))
    logger.info("부분 그래프 배치: m=%d, 머신당 엣지 %d 개", len(parts), max_edges)
    return Deployment(len(parts), budget_bits, routing, machines, kind="subgraph")


# ── 질의 ──────────────────────────────────────────────────────────────────────

def answer_multi(
    deployment: Deployment,
    queries: Sequence[tuple[int, QueryKind]],
    query_config: Optional[QueryConfig] = None,
) -> list[QueryRecord]:
    """각 질의를 담당 머신 하나에서만 계산한다. 결과는 질의 순서대로."""
    query_config = query_config or QueryConfig()
    options = {
        "walk_prob": query_config.walk_prob,
        "c": query_config.php_c,
        "tol": query_config.tol,
        "max_iters": query_config.max_iters,
    }
    records = []
    for index, (q, kind) in enumerate(queries):
        machine = deployment.route(q)
        before = deployment.access_counts()
        source = machine.source()
        if machine.kind == "subgraph" and source.graph.degrees[q] == 0:
            logger.warning("질의 %d: 머신 %d 의 부분 그래프에 노드가 없어 답할 수 없음", q, machine.index)
            answer = None
        else:
            answer = run_query(source, q, kind, **options)
        after = deployment.access_counts()
        touched = tuple(i for i, (a, b) in enumerate(zip(before, after)) if b > a)
        records.append(QueryRecord(index, int(q), kind, machine.index, touched, answer))
    return records


def score_records(graph: Graph, records: Sequence[QueryRecord], query_config: Optional[QueryConfig] = None) -> dict:
    """질의 종류별 평균 SMAPE / Spearman. 답할 수 없는 질의는 최악값(항마다 1, Spearman 0)."""
    query_config = query_config or QueryConfig()
    options = {"walk_prob": query_config.walk_prob, "c": query_config.php_c,
               "tol": query_config.tol, "max_iters": query_config.max_iters}
    per_kind: dict[str, dict[str, list[float]]] = {}
    for record in records:
        bucket = per_kind.setdefault(record.kind, {"sum": [], "mean": [], "rho": [], "failures": []})
        if record.answer is None:
            n = graph.node_count
            bucket["sum"].append(float(n))
            bucket["mean"].append(1.0)
            bucket["rho"].append(0.0)
            bucket["failures"].append(1.0)
            continue
        truth = run_query(graph, record.node, record.kind, **options)
        total, mean = smape(truth, record.answer)
        try:
            rho = spearman(truth, record.answer)
        except PegasusError:
            rho = 0.0
        bucket["sum"].append(total)
        bucket["mean"].append(mean)
        bucket["rho"].append(rho)
        bucket["failures"].append(0.0)
    return {
        kind: {
            "smape_sum": statistics.fmean(b["sum"]),
            "smape_mean": statistics.fmean(b["mean"]),
            "spearman": statistics.fmean(b["rho"]),
            "failures": int(sum(b["failures"])),
            "count": len(b["sum"]),
        }
        for kind, b in per_kind.items()
    }


# ── manifest ──────────────────────────────────────────────────────────────────

class DeploymentManifest(BaseModel):
    m: int = Field(description="머신 수")
    k_bits: float = Field(description="머신당 예산 (bits)")
    kind: DeploymentKind = Field(description="payload 종류")
    method: str = Field("label_propagation", description="분할 방법")
    seed: int = Field(0, description="시드")
    payloads: list[str] = Field(description="머신별 payload 파일 (PGS v1 | edge-list)")
    routing: str = Field(description="node<TAB>machine TSV 파일")


def save_deployment(
    deployment: Deployment, directory: Union[str, Path], method: str = "label_propagation", seed: int = 0
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payloads = []
    for machine in deployment.machines:
        if isinstance(machine.payload, SummaryGraph):
            name = f"machine_{machine.index}.pgs"
            save_summary(machine.payload, directory / name)
        else:
            name = f"machine_{machine.index}.txt"
            save_edge_list(machine.payload, directory / name)
        payloads.append(name)
    with (directory / "routing.tsv").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# node\tmachine\n")
        for u, i in enumerate(deployment.routing.tolist()):
            fh.write(f"{u}\t{i}\n")
    manifest = DeploymentManifest(
        m=deployment.machine_count,
        k_bits=deployment.per_machine_budget_bits,
        kind=deployment.kind,
        method=method,
        seed=seed,
        payloads=payloads,
        routing="routing.tsv",
    )
    path = directory / "manifest.json"
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_deployment(manifest_path: Union[str, Path]) -> Deployment:
    manifest_path = Path(manifest_path)
    manifest = DeploymentManifest.model_validate(json.loads(manifest_path.read_text(encoding="utf-8")))
    base = manifest_path.parent
    routing_rows = []
    with (base / manifest.routing).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                u, i = line.split()
                routing_rows.append((int(u), int(i)))
    routing = np.empty(len(routing_rows), dtype=np.int64)
    for u, i in routing_rows:
        routing[u] = i
    machines = []
    for i, name in enumerate(manifest.payloads):
        if manifest.kind == "summary":
            payload = load_summary(base / name)
        else:
            loaded = load_edge_list(base / name)
            # 부분 그래프 파일은 전체 id 공간의 조밀 id 로 저장되어 있다
            payload = Graph.from_edges(routing.shape[0], loaded.original_ids[loaded.edge_array])
        machines.append(Machine(index=i, payload=payload))
    return Deployment(manifest.m, manifest.k_bits, routing, machines, kind=manifest.kind)


# ── 시나리오 ──────────────────────────────────────────────────────────────────

class GeneratorSpec(BaseModel):
    model: Literal["ba", "ws", "two_community"] = Field(description="생성 모델")
    n: int = Field(1000, description="노드 수 (two_community 는 커뮤니티 하나의 크기)")
    m: int = Field(5, description="BA 연결 수")
    k: int = Field(10, description="WS 고리 차수")
    p: float = Field(0.1, description="WS 재배선 확률")
    bridges: int = Field(50, description="two_community 다리 엣지 수")


class Scenario(BaseModel):
    dataset: Optional[str] = Field(None, description="edge-list 경로 (generator 와 택일)")
    generator: Optional[GeneratorSpec] = Field(None, description="합성 그래프 생성 설정")
    preprocess: bool = Field(True, description="최대 연결 요소 전처리")
    machines: int = Field(2, ge=1, description="머신 수 m")
    budget_ratio: float = Field(0.5, gt=0, description="머신당 예산 / 입력 그래프 크기")
    method: Literal["label_propagation", "louvain"] = Field("label_propagation", description="분할 방법")
    seeds: list[int] = Field(default_factory=lambda: [0], description="반복 실행 시드 목록")
    queries: int = Field(100, ge=0, description="질의 노드 표본 수")
    kinds: list[Literal["rwr", "hop", "php"]] = Field(default_factory=lambda: ["rwr"], description="질의 종류")
    deployments: list[DeploymentKind] = Field(
        default_factory=lambda: ["summary", "subgraph"], description="비교할 배치 종류"
    )
    alpha: float = Field(DEFAULT_ALPHA, ge=1.0, description="개인화 정도 α")
    beta: float = Field(DEFAULT_BETA, gt=0, lt=1, description="β")
    max_iterations: int = Field(DEFAULT_MAX_ITERATIONS, gt=0, description="t_max")
    output_dir: Optional[str] = Field(None, description="manifest / payload 를 쓸 디렉터리")


def load_scenario(path: Union[str, Path]) -> Scenario:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return validated(Scenario, **raw)


def scenario_graph(scenario: Scenario, seed: int) -> Graph:
    if scenario.dataset:
        return load_edge_list(scenario.dataset, preprocess=scenario.preprocess)
    if scenario.generator is None:
        raise ParameterError("시나리오에 dataset 또는 generator 가 필요합니다.")
    spec = scenario.generator
    return generate(spec.model, seed, n=spec.n, m=spec.m, k=spec.k, p=spec.p, bridges=spec.bridges)


def run_distsim(scenario: Scenario, threads: int = 1, audit: bool = True) -> list[ResultRow]:
    """시나리오의 시드마다 배치를 만들고 질의를 돌려 배치 종류별 행을 만든다."""
    rows: list[ResultRow] = []
    for seed in scenario.seeds:
        graph = scenario_graph(scenario, seed)
        k = scenario.budget_ratio * graph_size_bits(graph)
        parts = partition(graph, scenario.machines, scenario.method, seed)
        count = min(scenario.queries, graph.node_count)
        nodes = sorted(substream(seed, "queries").choice(graph.node_count, size=count, replace=False).tolist())
        queries = [(q, kind) for kind in scenario.kinds for q in nodes]
        dataset = scenario.dataset or f"{scenario.generator.model}_{scenario.generator.n}"

        for kind_of_deployment in scenario.deployments:
            if kind_of_deployment == "summary":
                config = validated(
                    EngineConfig,
                    budget_bits=k,
                    alpha=scenario.alpha,
                    beta=scenario.beta,
                    max_iterations=scenario.max_iterations,
                    seed=seed,
                )
                deployment = build_deployment_summaries(graph, parts, k, config, threads=threads)
            else:
                deployment = build_deployment_subgraphs(graph, parts, k)
            if scenario.output_dir:
                save_deployment(
                    deployment, Path(scenario.output_dir) / f"seed_{seed}" / kind_of_deployment,
                    method=scenario.method, seed=seed,
                )

            records = answer_multi(deployment, queries)
            if audit:
                bad = [r.index for r in records if r.touched != (r.machine,)]
                if bad:
                    raise PegasusError(f"질의 {bad[:5]} 가 담당 머신 외의 payload 를 읽었습니다.")
            for kind, scores in score_records(graph, records).items():
                rows.append(
                    ResultRow(
                        dataset=dataset,
                        seed=seed,
                        alpha=scenario.alpha,
                        beta=scenario.beta,
                        budget_ratio=scenario.budget_ratio,
                        kind=kind,
                        smape_sum=scores["smape_sum"],
                        smape_mean=scores["smape_mean"],
                        spearman=scores["spearman"],
                        compression_rate=statistics.fmean(m.size_bits() for m in deployment.machines)
                        / graph_size_bits(graph),
                        deployment=kind_of_deployment,
                        query_count=scores["count"] - scores["failures"],
                        failures=scores["failures"],
                    )
                )
    return rows
