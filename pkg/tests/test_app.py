import json

import pytest

from pegasus.app import main
from pegasus.core.pgs_format import load_summary
from pegasus.core.summary import summary_size_bits
from pegasus.evaluation.experiments import ResultRow, write_rows


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("PEGASUS_SEED", raising=False)
    monkeypatch.delenv("PEGASUS_THREADS", raising=False)


def _parse_tsv(text: str) -> list[tuple[int, float]]:
    rows = []
    for line in text.strip().splitlines():
        node, value = line.split("\t")
        rows.append((int(node), float(value)))
    return rows


def test_stats(toy_file, capsys):
    assert main(["stats", "-i", str(toy_file)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:3] == ["nodes=5", "edges=6", "size_bits=27.8631"]
    assert out[3].startswith("effective_diameter=")


def test_missing_file_exit_code(tmp_path, capsys):
    assert main(["stats", "-i", str(tmp_path / "missing.tsv")]) == 2
    assert capsys.readouterr().err.startswith("pegasus:")


def test_parse_error_exit_code(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0 1\n0 x\n", encoding="utf-8")
    assert main(["stats", "-i", str(path)]) == 2


def test_invalid_utf8_exit_code(tmp_path, capsys):
    path = tmp_path / "latin.tsv"
    path.write_bytes(b"0 1\n\xff\xfe 2\n")
    assert main(["stats", "-i", str(path)]) == 2
    assert capsys.readouterr().err.startswith("pegasus:")


def test_invalid_alpha_exit_code(toy_file, tmp_path):
    argv = ["summarize", "-i", str(toy_file), "--budget-ratio", "0.5", "--alpha", "0.5", "-o", str(tmp_path / "s.pgs")]
    assert main(argv) == 4


def test_infeasible_budget_exit_code(toy_file, tmp_path):
    argv = ["summarize", "-i", str(toy_file), "--budget-bits", "1", "-o", str(tmp_path / "s.pgs")]
    assert main(argv) == 3


def test_summarize_writes_summary_and_report(toy_file, tmp_path):
    out = tmp_path / "toy.pgs"
    argv = ["summarize", "-i", str(toy_file), "--budget-ratio", "0.5", "--seed", "1", "-o", str(out)]
    assert main(argv) == 0
    summary = load_summary(out)
    assert summary.node_count == 5
    assert summary_size_bits(summary) <= 0.5 * 27.8631 + 1e-3
    report = json.loads((tmp_path / "toy.pgs.report.json").read_text(encoding="utf-8"))
    assert report["config"]["engine"]["seed"] == 1
    assert (tmp_path / "toy.pgs.ids.tsv").exists()


def test_summarize_is_deterministic(toy_file, tmp_path):
    for name in ("first.pgs", "second.pgs"):
        assert main(["--seed", "3", "summarize", "-i", str(toy_file), "--budget-ratio", "0.5",
                     "-o", str(tmp_path / name)]) == 0
    first = (tmp_path / "first.pgs").read_bytes()
    assert first == (tmp_path / "second.pgs").read_bytes()
    assert b"first.pgs" not in first


def test_exact_hop_query(toy_file, capsys):
    assert main(["query", "--graph", str(toy_file), "--exact", "--type", "hop", "--node", "0"]) == 0
    rows = _parse_tsv(capsys.readouterr().out)
    assert rows == [(0, 0), (1, 2), (2, 1), (3, 1), (4, 2)]


def test_initial_summary_query_matches_exact(toy_file, tmp_path, capsys):
    out = tmp_path / "initial.pgs"
    # 예산이 초기 요약 크기보다 크면 병합 없이 끝난다
    assert main(["summarize", "-i", str(toy_file), "--budget-ratio", "2.0", "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["query", "--summary", str(out), "--id-map", f"{out}.ids.tsv", "--type", "rwr", "--node", "0"]) == 0
    approx = _parse_tsv(capsys.readouterr().out)
    assert main(["query", "--graph", str(toy_file), "--exact", "--type", "rwr", "--node", "0"]) == 0
    exact = _parse_tsv(capsys.readouterr().out)
    assert [u for u, _ in approx] == [u for u, _ in exact]
    assert all(abs(a - b) < 1e-9 for (_, a), (_, b) in zip(approx, exact))


def test_top_k_query(toy_file, capsys):
    assert main(["query", "--graph", str(toy_file), "--exact", "--type", "rwr", "--node", "0", "--top", "3"]) == 0
    rows = _parse_tsv(capsys.readouterr().out)
    assert len(rows) == 3
    values = [value for _, value in rows]
    assert values == sorted(values, reverse=True)


def test_query_unknown_node(toy_file):
    assert main(["query", "--graph", str(toy_file), "--exact", "--type", "rwr", "--node", "9"]) == 4


def test_generate_is_deterministic(tmp_path):
    for name in ("a.txt", "b.txt"):
        argv = ["generate", "--model", "ba", "--n", "50", "--m", "2", "--seed", "7", "-o", str(tmp_path / name)]
        assert main(argv) == 0
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()


def test_evaluate_without_queries(toy_file, tmp_path):
    out = tmp_path / "rows.jsonl"
    assert main(["evaluate", "-i", str(toy_file), "--queries", "0", "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == ""


def test_plot(tmp_path, capsys):
    path = tmp_path / "rows.jsonl"
    write_rows([ResultRow(dataset="toy", seed=0, alpha=1.25, beta=0.1, budget_ratio=0.5, kind="rwr")], path)
    assert main(["plot", "-i", str(path)]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.startswith("dataset,seed,alpha")


def test_bad_arguments_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(["query", "--type", "pagerank", "--node", "0"])
    assert info.value.code == 2
