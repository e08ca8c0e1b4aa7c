import math

import pytest

from pegasus.core.pgs_format import format_summary, load_summary, parse_summary, save_summary
from pegasus.core.summary import SummaryGraph, initial_summary, reconstruct_edges, summary_size_bits
from pegasus.errors import DeadSupernodeError, ParameterError, SizeGuardError, SummaryFormatError
from tests.conftest import A, B, C, D, E, LOG2_3, LOG2_5, random_connected_graph, random_summary


def test_initial_summary(toy_graph):
    summary = initial_summary(toy_graph)
    assert summary.supernode_count == 5
    assert summary.superedge_count == 6
    assert reconstruct_edges(summary) == toy_graph
    assert summary_size_bits(summary) == pytest.approx(17 * LOG2_5)


def test_exact_summary_reconstructs_toy_graph(toy_graph, exact_summary):
    assert reconstruct_edges(exact_summary) == toy_graph
    assert summary_size_bits(exact_summary) == pytest.approx(9 * LOG2_3)
    assert summary_size_bits(exact_summary) == pytest.approx(14.2647, abs=1e-4)


def test_crossed_summary_reconstruction(crossed_summary):
    restored = reconstruct_edges(crossed_summary).edge_array.tolist()
    assert restored == [[A, B], [A, C], [A, D], [B, C], [B, D], [C, D]]


def test_single_supernode_has_zero_size():
    summary = SummaryGraph.from_partition([0, 0, 0])
    assert summary_size_bits(summary) == 0.0


def test_merge_keeps_smaller_id_and_drops_incident_superedges(toy_graph):
    summary = initial_summary(toy_graph)
    keep = summary.merge(B, A)
    assert keep == A
    assert summary.members[A] == [A, B]
    assert summary.membership.tolist() == [A, A, C, D, E]
    assert not summary.is_alive(B)
    assert summary.superedge_count == 2
    assert list(summary.superedges()) == [(C, E), (D, E)]


def test_dead_supernode(toy_graph):
    summary = initial_summary(toy_graph)
    summary.merge(A, B)
    with pytest.raises(DeadSupernodeError):
        summary.add_superedge(B, C)
    with pytest.raises(DeadSupernodeError):
        summary.superedge_neighbors(B)


def test_singleton_self_loop_rejected(toy_graph):
    summary = initial_summary(toy_graph)
    with pytest.raises(ParameterError):
        summary.add_superedge(A, A)


def test_superedge_count_ignores_duplicates(exact_summary):
    exact_summary.add_superedge(C, A)
    assert exact_summary.superedge_count == 2
    exact_summary.add_superedge(A, A)
    assert exact_summary.superedge_count == 3
    assert exact_summary.has_superedge(A, A)


def test_equality_is_canonical():
    first = SummaryGraph.from_partition([7, 7, 3, 3, 9], [(7, 3), (3, 9)])
    second = SummaryGraph.from_partition([0, 0, 1, 1, 2], [(0, 1), (1, 2)])
    assert first == second
    assert first.supernodes() == [0, 2, 4]


def test_reconstruct_guard():
    with pytest.raises(SizeGuardError):
        reconstruct_edges(SummaryGraph(5_001))


# ── PGS v1 ───────────────────────────────────────────────────────────────────

def test_format_exact_summary(exact_summary):
    assert format_summary(exact_summary) == "PGS 1 5 3 2\n0 0\n1 0\n2 1\n3 1\n4 2\n0 1\n1 2\n"


def test_format_with_comment(exact_summary):
    text = format_summary(exact_summary, comment='{"seed": 1}')
    assert text.startswith('# {"seed": 1}\nPGS 1 5 3 2\n')
    assert parse_summary(text) == exact_summary


def test_save_and_load(tmp_path, crossed_summary):
    path = tmp_path / "crossed.pgs"
    save_summary(crossed_summary, path)
    assert load_summary(path) == crossed_summary
    assert path.read_bytes() == format_summary(crossed_summary).encode("utf-8")


def test_random_summaries_survive_file_format():
    for seed in range(5):
        graph = random_connected_graph(seed, n=30)
        summary = random_summary(graph, seed)
        assert parse_summary(format_summary(summary)) == summary


@pytest.mark.parametrize(
    "text",
    [
        "",
        "PGS 2 1 1 0\n0 0\n",
        "PGX 1 1 1 0\n0 0\n",
        "PGS 1 2 1 0\n0 0\n",
        "PGS 1 2 2 0\n0 0\n0 1\n",
        "PGS 1 2 1 0\n0 0\n1 1\n",
        "PGS 1 2 2 2\n0 0\n1 1\n0 1\n1 0\n",
        "PGS 1 2 2 1\n0 0\n1 1\n0 0\n",
        "PGS 1 2 2 1\n0 0\n1 1\n0 x\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(SummaryFormatError):
        parse_summary(text)


def test_size_decreases_with_merges(toy_graph):
    summary = initial_summary(toy_graph)
    before = summary_size_bits(summary)
    summary.merge(A, B)
    assert summary_size_bits(summary) < before
    assert summary_size_bits(summary) == pytest.approx((2 * 2 + 5) * math.log2(4))
