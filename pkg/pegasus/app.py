"""
pegasus 명령행 애플리케이션

실행:
    python -m pegasus.app <subcommand> [options]

서브커맨드:
    summarize  - edge-list → 개인화 요약 (PGS v1) + JSON 실행 리포트
    query      - 요약 또는 원본 그래프 위의 RWR / HOP / PHP 질의 → TSV
    evaluate   - 요약별 질의 정확도 / 실험 드라이버 → JSON-lines
    distsim    - 분산 다중 질의 시뮬레이션 시나리오 → JSON-lines
    generate   - BA / WS / 2-커뮤니티 합성 그래프 → edge-list
    stats      - |V|, |E|, 입력 그래프 크기(bits), 유효 지름
    plot       - JSON-lines 결과 → CSV

종료 코드:
    0 성공 / 2 입력 파싱 실패·파일 없음 / 3 예산 충족 불가 / 4 파라미터 오류

환경 변수:
    PEGASUS_SEED, PEGASUS_THREADS (명시한 플래그가 우선)
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from dotenv import load_dotenv
load_dotenv()

import numpy as np

from pegasus.config import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_PHP_C,
    DEFAULT_WALK_PROB,
    EngineConfig,
    QueryConfig,
    RunConfig,
    resolve_run_config,
    substream,
    validated,
)
from pegasus.core.generators import generate
from pegasus.core.graph import Graph, effective_diameter, graph_size_bits, load_edge_list, save_edge_list, write_id_map
from pegasus.core.personalization import TargetSet, load_targets
from pegasus.core.pgs_format import format_summary, load_summary
from pegasus.distributed.deployment import load_scenario, run_distsim
from pegasus.errors import ParameterError, exit_code_for
from pegasus.evaluation.experiments import (
    ResultRow,
    read_rows,
    rows_to_csv,
    run_beta_sweep,
    run_personalization_experiment,
    run_personalized_accuracy,
    run_query_accuracy_experiment,
    run_scaling_experiment,
    sample_query_nodes,
    write_rows,
)
from pegasus.pipeline.build_pipeline import run_summarize
from pegasus.query.engine import QUERY_KINDS, AnswerVector, run_query

logger = logging.getLogger("pegasus")


# ── 헬퍼 ─────────────────────────────────────────────────────────────────────

def _open_output(path: Optional[str]) -> TextIO:
    if path is None or path == "-":
        return sys.stdout
    return Path(path).open("w", encoding="utf-8", newline="\n")


def _close_output(stream: TextIO) -> None:
    if stream is not sys.stdout:
        stream.close()


def _dataset_name(path: str) -> str:
    return Path(path).stem


def _read_id_map(path: str) -> np.ndarray:
    """'dense<TAB>original' 사이드카를 읽어 dense → original 배열로 돌려준다."""
    pairs = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                dense, original = line.split()
                pairs.append((int(dense), int(original)))
    ids = np.empty(len(pairs), dtype=np.int64)
    for dense, original in pairs:
        ids[dense] = original
    return ids


def _to_dense(node: int, original_ids: Optional[np.ndarray]) -> int:
    if original_ids is None:
        return node
    hits = np.flatnonzero(original_ids == node)
    if hits.shape[0] == 0:
        raise ParameterError(f"그래프에 없는 노드 {node}")
    return int(hits[0])


def _format_answer(answer: AnswerVector, top: Optional[int], original_ids: Optional[np.ndarray]) -> str:
    """node<TAB>value TSV. top 이 있으면 값 내림차순 상위 K 개."""
    if top is not None:
        rows = answer.top(top)
    else:
        rows = [(u, answer.values[u]) for u in range(len(answer))]
    lines = []
    for u, value in rows:
        node = int(original_ids[u]) if original_ids is not None else u
        text = str(int(value)) if answer.kind == "hop" else repr(float(value))
        lines.append(f"{node}\t{text}")
    return "\n".join(lines) + "\n"


def _resolve_targets(args: argparse.Namespace, graph: Graph, run: RunConfig) -> TargetSet:
    if args.targets:
        return load_targets(args.targets, graph)
    if args.targets_sample is not None:
        return TargetSet.sample(graph.node_count, args.targets_sample, substream(run.seed, "targets"))
    return TargetSet.all_nodes(graph.node_count)


def _budget_bits(args: argparse.Namespace, graph: Graph) -> float:
    if args.budget_bits is not None:
        return args.budget_bits
    if args.budget_ratio is None:
        raise ParameterError("--budget-ratio 또는 --budget-bits 가 필요합니다.")
    return args.budget_ratio * graph_size_bits(graph)


# ── 서브커맨드 ────────────────────────────────────────────────────────────────

def cmd_summarize(args: argparse.Namespace, run: RunConfig) -> int:
    graph = load_edge_list(args.input, preprocess=args.preprocess)
    config = validated(
        EngineConfig,
        budget_bits=_budget_bits(args, graph),
        alpha=args.alpha,
        beta=args.beta,
        max_iterations=args.iters,
        seed=run.seed,
        group_cap=args.group_cap,
        shingle_rounds=args.shingle_rounds,
        theta_init=args.theta_init,
        threshold_mode=args.threshold_mode,
        reduction=args.reduction,
        audit=args.audit,
    )
    targets = _resolve_targets(args, graph, run)
    summary, report = run_summarize(graph, targets, config)

    # 요약 파일은 출력 경로와 무관하게 같은 바이트여야 한다
    resolved = {"engine": config.model_dump(), "run": run.model_dump(exclude={"output"}), "input": args.input,
                "preprocess": args.preprocess, "targets": len(targets)}
    out = _open_output(run.output)
    try:
        out.write(format_summary(summary, comment=json.dumps(resolved, sort_keys=True)))
    finally:
        _close_output(out)

    report_data = report.model_dump()
    report_data["config"] = {**resolved, "run": run.model_dump()}
    if args.report:
        report_path = Path(args.report)
    elif run.output:
        report_path = Path(f"{run.output}.report.json")
    else:
        report_path = None
    if report_path is not None:
        report_path.write_text(json.dumps(report_data, indent=2, sort_keys=True), encoding="utf-8")
    if run.output and graph.original_ids is not None:
        write_id_map(graph, f"{run.output}.ids.tsv")
    return 0


def cmd_query(args: argparse.Namespace, run: RunConfig) -> int:
    options = validated(
        QueryConfig, walk_prob=args.walk_prob, php_c=args.php_c, tol=args.tol, max_iters=args.max_iters
    )
    if args.exact or args.summary is None:
        if args.graph is None:
            raise ParameterError("--exact 에는 --graph 가 필요합니다.")
        graph = load_edge_list(args.graph, preprocess=args.preprocess)
        source, original_ids = graph, graph.original_ids
    else:
        source = load_summary(args.summary)
        original_ids = _read_id_map(args.id_map) if args.id_map else None

    q = _to_dense(args.node, original_ids)
    answer = run_query(
        source, q, args.type,
        walk_prob=options.walk_prob, c=options.php_c, tol=options.tol, max_iters=options.max_iters,
    )
    if not answer.converged:
        logger.warning("질의가 max_iters=%d 안에 수렴하지 않았습니다.", options.max_iters)
    out = _open_output(run.output)
    try:
        out.write(_format_answer(answer, args.top, original_ids))
    finally:
        _close_output(out)
    return 0


def cmd_evaluate(args: argparse.Namespace, run: RunConfig) -> int:
    graph = load_edge_list(args.input, preprocess=args.preprocess)
    dataset = _dataset_name(args.input)
    kinds = list(args.kinds)
    rows: list[ResultRow] = []

    if args.experiment == "summaries":
        summaries = [load_summary(path) for path in args.summaries]
        queries = sample_query_nodes(graph, args.queries, run.seed)
        table = run_query_accuracy_experiment(graph, summaries, queries, kinds, threads=run.threads)
        for entry in table:
            r = entry.report
            rows.append(ResultRow(
                dataset=dataset, seed=run.seed, alpha=args.alpha, beta=args.beta,
                budget_ratio=args.budget_ratio, kind=entry.kind, smape_sum=r.smape_sum,
                smape_mean=r.smape_mean, spearman=r.spearman, compression_rate=r.compression_rate,
                summary=args.summaries[entry.summary_index], query_count=r.query_count,
                failures=entry.failures,
            ))
    elif args.experiment == "accuracy":
        for seed in args.seeds or [run.seed]:
            rows += run_personalized_accuracy(
                graph, dataset, seed, query_count=args.queries, alpha=args.alpha, beta=args.beta,
                budget_ratio=args.budget_ratio, kinds=kinds, max_iterations=args.iters, threads=run.threads,
            )
    elif args.experiment == "personalization":
        rows = run_personalization_experiment(
            graph, dataset, args.seeds or [run.seed], target_sizes=args.target_sizes, alphas=args.alphas,
            beta=args.beta, budget_ratio=args.budget_ratio, max_iterations=args.iters,
        )
    elif args.experiment == "beta":
        for seed in args.seeds or [run.seed]:
            rows += run_beta_sweep(
                graph, dataset, seed, betas=args.betas, alpha=args.alpha, budget_ratio=args.budget_ratio,
                query_count=args.queries, kinds=kinds, max_iterations=args.iters, threads=run.threads,
            )
    else:
        raise ParameterError(f"알 수 없는 실험: {args.experiment}")

    out = _open_output(run.output)
    try:
        write_rows(rows, out)
    finally:
        _close_output(out)
    return 0


def cmd_scaling(args: argparse.Namespace, run: RunConfig) -> int:
    rows, r_squared = run_scaling_experiment(
        args.edges, m=args.m, seed=run.seed, alpha=args.alpha, beta=args.beta,
        budget_ratio=args.budget_ratio, max_iterations=args.iters,
    )
    logger.info("선형 적합 R² = %.4f", r_squared)
    out = _open_output(run.output)
    try:
        write_rows(rows, out)
    finally:
        _close_output(out)
    print(f"r_squared={r_squared:.6f}", file=sys.stderr)
    return 0


def cmd_distsim(args: argparse.Namespace, run: RunConfig) -> int:
    scenario = load_scenario(args.scenario)
    rows = run_distsim(scenario, threads=run.threads)
    out = _open_output(run.output)
    try:
        write_rows(rows, out)
    finally:
        _close_output(out)
    return 0


def cmd_generate(args: argparse.Namespace, run: RunConfig) -> int:
    graph = generate(args.model, run.seed, n=args.n, m=args.m, k=args.k, p=args.p, bridges=args.bridges)
    header = f"model={args.model} n={args.n} m={args.m} k={args.k} p={args.p} bridges={args.bridges} seed={run.seed}"
    if run.output and run.output != "-":
        save_edge_list(graph, run.output, header=header)
    else:
        sys.stdout.write(f"# {header}\n# nodes={graph.node_count} edges={graph.edge_count}\n")
        for u, v in graph.edge_array.tolist():
            sys.stdout.write(f"{u} {v}\n")
    return 0


def cmd_stats(args: argparse.Namespace, run: RunConfig) -> int:
    graph = load_edge_list(args.input, preprocess=args.preprocess)
    lines = [
        f"nodes={graph.node_count}",
        f"edges={graph.edge_count}",
        f"size_bits={graph_size_bits(graph):.4f}",
    ]
    if graph.is_connected():
        diameter = effective_diameter(graph, args.percentile, rng=substream(run.seed, "diameter"))
        lines.append(f"effective_diameter={diameter:g}")
    else:
        lines.append("effective_diameter=disconnected")
    out = _open_output(run.output)
    try:
        out.write("\n".join(lines) + "\n")
    finally:
        _close_output(out)
    return 0


def cmd_plot(args: argparse.Namespace, run: RunConfig) -> int:
    rows = read_rows(args.input)
    out = _open_output(run.output)
    try:
        out.write(rows_to_csv(rows))
    finally:
        _close_output(out)
    return 0


# ── 인자 파서 ─────────────────────────────────────────────────────────────────

def _add_engine_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="개인화 정도 α (≥ 1)")
    parser.add_argument("--beta", type=float, default=DEFAULT_BETA, help="적응형 임계값 β")
    parser.add_argument("--iters", type=int, default=DEFAULT_MAX_ITERATIONS, help="최대 반복 횟수 t_max")
    parser.add_argument("--budget-ratio", type=float, default=None, help="예산 = 비율 × 입력 그래프 크기")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pegasus", description="개인화 그래프 요약 엔진")
    parser.add_argument("--seed", type=int, default=None, help="마스터 시드 (기본: PEGASUS_SEED 또는 0)")
    parser.add_argument("--threads", type=int, default=None, help="evaluate / distsim 워커 수")
    parser.add_argument("--log-level", default="WARNING", help="logging 레벨")
    parser.add_argument("-o", "--output", default=None, help="출력 경로 (기본: stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    # summarize
    p = sub.add_parser("summarize", help="개인화 요약 그래프 생성")
    p.add_argument("-i", "--input", required=True, help="edge-list 파일")
    p.add_argument("--preprocess", action="store_true", help="self-loop 제거 + 최대 연결 요소만 유지")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--targets", help="타깃 노드 파일 (한 줄에 하나)")
    group.add_argument("--targets-all", action="store_true", help="T = V (기본)")
    group.add_argument("--targets-sample", type=int, default=None, help="균등 추출한 타깃 N 개")
    _add_engine_options(p)
    p.add_argument("--budget-bits", type=float, default=None, help="예산 k (bits)")
    p.add_argument("--group-cap", type=int, default=500, help="후보 그룹 최대 크기")
    p.add_argument("--shingle-rounds", type=int, default=10, help="그룹 재분할 최대 라운드")
    p.add_argument("--theta-init", type=float, default=0.5, help="초기 θ")
    p.add_argument("--threshold-mode", choices=["adaptive", "fixed"], default="adaptive")
    p.add_argument("--reduction", choices=["relative", "absolute"], default="relative")
    p.add_argument("--audit", action="store_true", help="리포트에 병합 순서 / 반복별 로그 포함")
    p.add_argument("--report", default=None, help="JSON 실행 리포트 경로 (기본: <output>.report.json)")
    p.set_defaults(handler=cmd_summarize)

    # query
    p = sub.add_parser("query", help="RWR / HOP / PHP 질의")
    p.add_argument("--summary", help="PGS v1 요약 파일")
    p.add_argument("--graph", help="원본 edge-list (--exact 오라클 경로)")
    p.add_argument("--id-map", help="요약과 함께 쓴 id 사이드카 (원본 id 로 입출력)")
    p.add_argument("--preprocess", action="store_true")
    p.add_argument("--exact", action="store_true", help="원본 그래프로 정확히 계산")
    p.add_argument("--type", choices=list(QUERY_KINDS), required=True)
    p.add_argument("--node", type=int, required=True, help="질의 노드 q")
    p.add_argument("--top", type=int, default=None, help="값 내림차순 상위 K 개만 출력")
    p.add_argument("--walk-prob", type=float, default=DEFAULT_WALK_PROB)
    p.add_argument("--php-c", type=float, default=DEFAULT_PHP_C)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=1000)
    p.set_defaults(handler=cmd_query)

    # evaluate
    p = sub.add_parser("evaluate", help="질의 정확도 / 실험 드라이버")
    p.add_argument("-i", "--input", required=True, help="원본 edge-list")
    p.add_argument("--preprocess", action="store_true")
    p.add_argument("--experiment", choices=["summaries", "accuracy", "personalization", "beta"],
                   default="summaries")
    p.add_argument("--summaries", nargs="*", default=[], help="평가할 PGS v1 파일들")
    p.add_argument("--queries", type=int, default=100, help="질의 노드 표본 수")
    p.add_argument("--kinds", nargs="*", choices=list(QUERY_KINDS), default=["rwr", "hop", "php"])
    p.add_argument("--seeds", type=int, nargs="*", default=None)
    p.add_argument("--alphas", type=float, nargs="*", default=[1.0, 1.25, 1.5])
    p.add_argument("--betas", type=float, nargs="*", default=[0.01, 0.05, 0.1, 0.2, 0.5])
    p.add_argument("--target-sizes", type=int, nargs="*", default=[1])
    _add_engine_options(p)
    p.set_defaults(handler=cmd_evaluate, budget_ratio=0.5)

    # scaling
    p = sub.add_parser("scaling", help="BA 그래프 크기별 실행 시간 (선형성 확인)")
    p.add_argument("--edges", type=int, nargs="+", default=[100_000, 200_000, 400_000, 800_000])
    p.add_argument("--m", type=int, default=5)
    _add_engine_options(p)
    p.set_defaults(handler=cmd_scaling, budget_ratio=0.5)

    # distsim
    p = sub.add_parser("distsim", help="분산 다중 질의 시뮬레이션")
    p.add_argument("--scenario", required=True, help="시나리오 JSON 파일")
    p.set_defaults(handler=cmd_distsim)

    # generate
    p = sub.add_parser("generate", help="합성 그래프 생성")
    p.add_argument("--model", choices=["ba", "ws", "two_community"], required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--bridges", type=int, default=50)
    p.set_defaults(handler=cmd_generate)

    # stats
    p = sub.add_parser("stats", help="그래프 통계")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--preprocess", action="store_true")
    p.add_argument("--percentile", type=float, default=0.9)
    p.set_defaults(handler=cmd_stats)

    # plot
    p = sub.add_parser("plot", help="JSON-lines 결과 → CSV")
    p.add_argument("-i", "--input", required=True)
    p.set_defaults(handler=cmd_plot)

    return parser


def _hoist_output(argv: list[str]) -> list[str]:
    """서브커맨드 뒤에 온 -o/--output, --seed, --threads, --log-level 을 앞으로 옮긴다."""
    globals_with_value = {"-o", "--output", "--seed", "--threads", "--log-level"}
    head, rest = [], []
    i = 0
    while i < len(argv):
        token = argv[i]
        name = token.split("=", 1)[0]
        if name in globals_with_value:
            if "=" in token:
                head.append(token)
            else:
                head.extend(argv[i:i + 2])
                i += 1
        else:
            rest.append(token)
        i += 1
    return head + rest


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_hoist_output(list(sys.argv[1:] if argv is None else argv)))
    try:
        run = resolve_run_config(args.seed, args.threads, args.log_level, args.output)
        logging.basicConfig(
            level=run.log_level,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return args.handler(args, run)
    except Exception as exc:  # noqa: BLE001
        code = exit_code_for(exc)
        if code == 1:
            logger.exception("예상하지 못한 오류")
        else:
            print(f"pegasus: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
