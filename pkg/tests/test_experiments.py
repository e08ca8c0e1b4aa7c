import io
import math

import pytest

from pegasus.core.generators import generate_ba
from pegasus.core.summary import SummaryGraph, initial_summary
from pegasus.distributed.deployment import GeneratorSpec, Scenario, run_distsim
from pegasus.evaluation.experiments import (
    ResultRow,
    median_by,
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
from tests.conftest import A, B, random_connected_graph


def _row(seed: int, kind: str = "rwr", smape_mean: float = 0.1) -> ResultRow:
    return ResultRow(dataset="toy", seed=seed, alpha=1.25, beta=0.1, budget_ratio=0.5, kind=kind, smape_mean=smape_mean)


# ── 질의 정확도 ───────────────────────────────────────────────────────────────

def test_no_queries_gives_empty_table(toy_graph):
    assert run_query_accuracy_experiment(toy_graph, [initial_summary(toy_graph)], [], ["rwr"]) == []


def test_initial_summary_is_exact():
    graph = random_connected_graph(3, n=30)
    table = run_query_accuracy_experiment(graph, [initial_summary(graph)], [0, 5, 7], ["hop", "rwr"])
    assert [(entry.summary_index, entry.kind) for entry in table] == [(0, "hop"), (0, "rwr")]
    hop, rwr = table
    assert hop.report.smape_sum == 0.0
    assert hop.report.spearman == pytest.approx(1.0)
    assert rwr.report.smape_mean < 1e-6
    assert rwr.report.spearman > 0.99
    assert rwr.report.query_count == 3
    assert rwr.failures == 0


def test_undefined_rank_correlation_keeps_smape(toy_graph):
    # supernode 하나, superedge 없음: HOP 답이 모두 0 인 상수 벡터
    collapsed = SummaryGraph.from_partition([0, 0, 0, 0, 0])
    (entry,) = run_query_accuracy_experiment(toy_graph, [collapsed], [A], ["hop"])
    assert entry.failures == 0
    assert entry.report.query_count == 1
    assert entry.report.smape_sum == pytest.approx(4.0)
    assert entry.report.smape_mean == pytest.approx(0.8)
    assert math.isnan(entry.report.spearman)


def test_spearman_averages_only_defined_queries(toy_graph):
    table = run_query_accuracy_experiment(toy_graph, [initial_summary(toy_graph)], [A, B], ["hop"])
    assert table[0].report.spearman == pytest.approx(1.0)


def test_sample_query_nodes_is_deterministic():
    graph = random_connected_graph(0, n=30)
    first = sample_query_nodes(graph, 10, seed=4)
    assert first == sample_query_nodes(graph, 10, seed=4)
    assert len(set(first)) == 10
    assert len(sample_query_nodes(graph, 100, seed=4)) == 30


def test_personalized_accuracy_rows():
    graph = generate_ba(80, 2, seed=1)
    rows = run_personalized_accuracy(graph, "ba_80", seed=0, query_count=5, kinds=("rwr",), max_iterations=5)
    assert [row.summary for row in rows] == ["personalized", "non_personalized"]
    assert rows[1].alpha == 1.0
    assert all(row.target_size == 5 for row in rows)


def test_beta_sweep_rows():
    graph = generate_ba(60, 2, seed=2)
    rows = run_beta_sweep(graph, "ba_60", seed=0, betas=(0.1, 0.5), query_count=4, max_iterations=5)
    assert [row.beta for row in rows] == [0.1, 0.5]
    assert [row.summary for row in rows] == ["beta=0.1", "beta=0.5"]


def test_personalization_experiment_rows():
    graph = generate_ba(60, 2, seed=3)
    rows = run_personalization_experiment(graph, "ba_60", seeds=[0], alphas=(1.0, 2.0), max_iterations=5)
    assert [row.alpha for row in rows] == [1.0, 2.0]
    assert all(row.kind == "personalization" and row.target_size == 1 for row in rows)


# ── 결과 행 ──────────────────────────────────────────────────────────────────

def test_rows_survive_json_lines(tmp_path):
    rows = [_row(0), _row(1, kind="hop", smape_mean=None)]
    path = tmp_path / "rows.jsonl"
    write_rows(rows, path)
    assert read_rows(path) == rows


def test_write_rows_to_stream():
    buffer = io.StringIO()
    write_rows([_row(0), _row(1)], buffer)
    assert len(buffer.getvalue().splitlines()) == 2


def test_rows_to_csv_header():
    text = rows_to_csv([_row(0)])
    header, line = text.splitlines()
    assert header.split(",") == list(ResultRow.model_fields)
    assert line.startswith("toy,0,1.25,0.1,0.5,rwr,")


def test_median_by():
    rows = [_row(0, smape_mean=0.3), _row(1, smape_mean=0.1), _row(2, smape_mean=0.2), _row(3, kind="hop", smape_mean=9.0)]
    assert median_by(rows, "smape_mean", kind="rwr") == pytest.approx(0.2)
    assert math.isnan(median_by(rows, "smape_mean", kind="php"))


# ── 경향 재현 (느림) ──────────────────────────────────────────────────────────

SEEDS = range(5)


@pytest.mark.slow
def test_personalization_lowers_error_at_targets():
    graph = generate_ba(5000, 5, seed=0)
    alphas = (1.0, 1.25, 1.5)
    rows = run_personalization_experiment(graph, "ba_5000", seeds=SEEDS, target_sizes=(1,), alphas=alphas)
    medians = [median_by(rows, "relative_error", alpha=a) for a in alphas]
    assert medians[1] < 1.0
    assert medians[0] >= medians[1] >= medians[2]


@pytest.mark.slow
def test_personalized_summaries_answer_queries_better():
    graph = generate_ba(5000, 5, seed=0)
    rows = []
    for seed in SEEDS:
        rows += run_personalized_accuracy(graph, "ba_5000", seed=seed, query_count=100, alpha=1.25, kinds=("rwr", "hop"))
    for kind in ("rwr", "hop"):
        personalized = dict(kind=kind, summary="personalized")
        baseline = dict(kind=kind, summary="non_personalized")
        assert median_by(rows, "smape_mean", **personalized) < median_by(rows, "smape_mean", **baseline)
        assert median_by(rows, "spearman", **personalized) >= median_by(rows, "spearman", **baseline)


@pytest.mark.slow
def test_runtime_grows_linearly_with_edges():
    rows, r_squared = run_scaling_experiment([100_000, 200_000, 400_000, 800_000], m=5, seed=0)
    assert r_squared >= 0.95
    assert rows[-1].wall_ms < 8.5 * rows[0].wall_ms


@pytest.mark.slow
def test_summary_deployment_beats_subgraph_deployment():
    scenario = Scenario(
        generator=GeneratorSpec(model="two_community", n=2500, m=5, bridges=50),
        machines=2,
        seeds=list(SEEDS),
        queries=100,
        kinds=["rwr"],
    )
    rows = run_distsim(scenario, audit=True)
    summary = median_by(rows, "smape_mean", deployment="summary")
    subgraph = median_by(rows, "smape_mean", deployment="subgraph")
    assert summary < subgraph
