"""
요약 그래프 파일 포맷 "PGS v1"

    PGS 1 <|V|> <|S|> <|P|>
    <node> <supernode>          (|V| 줄, node 오름차순)
    <superA> <superB>           (|P| 줄, 정규 순서, self-loop 는 같은 id 두 번)

supernode 번호는 최소 멤버 순으로 0..|S|-1 로 다시 매겨 기록한다.
'#' 로 시작하는 줄과 빈 줄은 무시한다.
"""

from pathlib import Path
from typing import Union

import numpy as np

from pegasus.core.summary import SummaryGraph
from pegasus.errors import ParameterError, SummaryFormatError

MAGIC = "PGS"
VERSION = 1


def format_summary(summary: SummaryGraph, comment: str = "") -> str:
    membership, superedges = summary.canonical()
    lines = [f"# {line}" for line in comment.splitlines() if line]
    lines.append(f"{MAGIC} {VERSION} {summary.node_count} {summary.supernode_count} {len(superedges)}")
    lines.extend(f"{u} {s}" for u, s in enumerate(membership))
    lines.extend(f"{a} {b}" for a, b in superedges)
    return "\n".join(lines) + "\n"


def save_summary(summary: SummaryGraph, path: Union[str, Path], comment: str = "") -> None:
    Path(path).write_text(format_summary(summary, comment), encoding="utf-8", newline="\n")


def parse_summary(text: str) -> SummaryGraph:
    """PGS v1 텍스트를 읽어 SummaryGraph 를 만든다."""
    rows: list[tuple[int, list[str]]] = []
    for line_number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            rows.append((line_number, line.split()))
    if not rows:
        raise SummaryFormatError("빈 요약 파일입니다.")

    line_number, header = rows[0]
    if len(header) != 5 or header[0] != MAGIC:
        raise SummaryFormatError(f"{line_number}번째 줄: 'PGS 1 |V| |S| |P|' 헤더가 필요합니다.")
    try:
        version, n, s, p = (int(x) for x in header[1:])
    except ValueError:
        raise SummaryFormatError(f"{line_number}번째 줄: 헤더 값이 정수가 아닙니다.") from None
    if version != VERSION:
        raise SummaryFormatError(f"지원하지 않는 PGS 버전: {version}")
    if n < 1 or not (1 <= s <= n) or p < 0:
        raise SummaryFormatError(f"헤더 값이 올바르지 않습니다: |V|={n} |S|={s} |P|={p}")

    body = rows[1:]
    if len(body) != n + p:
        raise SummaryFormatError(f"본문 줄 수 {len(body)} 가 |V|+|P|={n + p} 와 다릅니다.")
    pairs = np.empty((len(body), 2), dtype=np.int64)
    for i, (line_number, tokens) in enumerate(body):
        if len(tokens) != 2:
            raise SummaryFormatError(f"{line_number}번째 줄: 정수 2개가 필요합니다.")
        try:
            pairs[i] = (int(tokens[0]), int(tokens[1]))
        except ValueError:
            raise SummaryFormatError(f"{line_number}번째 줄: 정수가 아닌 토큰") from None

    nodes, labels = pairs[:n, 0], pairs[:n, 1]
    if not np.array_equal(np.sort(nodes), np.arange(n)):
        raise SummaryFormatError("멤버십 줄은 노드 0..|V|-1 을 정확히 한 번씩 포함해야 합니다.")
    membership = np.empty(n, dtype=np.int64)
    membership[nodes] = labels
    if np.unique(membership).shape[0] != s:
        raise SummaryFormatError(f"supernode 수가 헤더의 |S|={s} 와 다릅니다.")
    superedges = [tuple(sorted(edge)) for edge in pairs[n:].tolist()]
    if len(set(superedges)) != p:
        raise SummaryFormatError("중복된 superedge 가 있습니다.")
    try:
        return SummaryGraph.from_partition(membership.tolist(), superedges)
    except ParameterError as exc:
        raise SummaryFormatError(str(exc)) from exc


def load_summary(path: Union[str, Path]) -> SummaryGraph:
    return parse_summary(Path(path).read_text(encoding="utf-8"))
