"""Text formats for hypergraphs, embeddings, run traces and metrics.

Hyperedge lists: one hyperedge per line of whitespace-separated node ids,
``#`` comments, blank lines ignored, optional ``%n <int>`` directive fixing
the node count. Embeddings: CSV with header ``id,kind,x0,...``. Metrics: a
JSON object carrying the summary values and the full per-iteration trace.
"""

from __future__ import annotations

import json

import numpy as np

from .core import Hypergraph
from .spectral import Embedding
from .trace import RunTrace, TraceRecord


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _as_text(data) -> str:
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def parse_hyperedge_list(data, one_based: bool = False) -> Hypergraph:
    """Parse a hyperedge-list file; hyperedge order follows line order.

    Duplicate members on a line are collapsed. Unless a ``%n`` directive is
    present, the node count is 1 + the largest id seen.
    """
    n_override = None
    edges: list[frozenset[int]] = []
    max_id = -1
    for lineno, raw in enumerate(_as_text(data).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("%n"):
            try:
                n_override = int(line.split()[1])
            except (IndexError, ValueError):
                raise ParseError(f"malformed %n directive {line!r}", lineno) from None
            continue
        members = set()
        for token in line.split():
            try:
                node = int(token)
            except ValueError:
                raise ParseError(f"non-integer node id {token!r}", lineno) from None
            if one_based:
                node -= 1
            if node < 0:
                raise ParseError(f"negative node id {node}", lineno)
            members.add(node)
            max_id = max(max_id, node)
        edges.append(frozenset(members))
    n = n_override if n_override is not None else max_id + 1
    if n < 1:
        raise ParseError("no nodes found and no %n directive", 0)
    return Hypergraph(n=n, hyperedges=tuple(edges))


def write_hyperedge_list(H: Hypergraph) -> str:
    """Serialize a hypergraph; the %n header preserves isolated trailing nodes.

    Empty hyperedges produce no line and are therefore not round-tripped.
    """
    lines = [f"%n {H.n}"]
    for edge in H.hyperedges:
        if edge:
            lines.append(" ".join(str(i) for i in sorted(edge)))
    return "\n".join(lines) + "\n"


def write_embedding(Y: Embedding) -> str:
    """CSV serialization of an embedding, lossless to better than 1e-12."""
    header = "id,kind," + ",".join(f"x{d}" for d in range(Y.dim))
    lines = [header]
    for i in range(Y.n + Y.s):
        kind = "node" if i < Y.n else "edge"
        ident = i if i < Y.n else i - Y.n
        coords = ",".join(f"{v:.17g}" for v in Y.coords[i])
        lines.append(f"{ident},{kind},{coords}")
    return "\n".join(lines) + "\n"


def read_embedding(data) -> Embedding:
    """Parse an embedding CSV produced by :func:`write_embedding`."""
    lines = _as_text(data).splitlines()
    if not lines or not lines[0].startswith("id,kind,"):
        raise ParseError("missing embedding header", 1)
    dim = len(lines[0].split(",")) - 2
    rows: dict[str, list[tuple[int, np.ndarray]]] = {"node": [], "edge": []}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != dim + 2:
            raise ParseError(f"expected {dim + 2} fields, got {len(fields)}", lineno)
        try:
            ident = int(fields[0])
            coords = np.array([float(v) for v in fields[2:]])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        kind = fields[1]
        if kind not in rows:
            raise ParseError(f"unknown kind {kind!r}", lineno)
        rows[kind].append((ident, coords))
    for kind, entries in rows.items():
        ids = sorted(ident for ident, _ in entries)
        if ids != list(range(len(entries))):
            raise ParseError(f"{kind} ids are not dense", 0)
        entries.sort(key=lambda e: e[0])
    nodes = np.array([c for _, c in rows["node"]]).reshape(len(rows["node"]), dim)
    centres = np.array([c for _, c in rows["edge"]]).reshape(len(rows["edge"]), dim)
    return Embedding(
        coords=np.vstack([nodes, centres]), n=len(rows["node"]), s=len(rows["edge"])
    )


def write_metrics(trace: RunTrace, summary: dict) -> str:
    """JSON metrics document: summary fields plus the per-iteration trace."""
    doc = dict(summary)
    doc["iterations"] = len(trace)
    doc["trace"] = [
        {"loss_smooth": t.loss_smooth, "loss_hard": t.loss_hard, "r": t.r, "tau": t.tau}
        for t in trace
    ]
    for key, value in doc.items():
        if isinstance(value, float) and not np.isfinite(value):
            raise ValueError(f"non-finite metrics field {key!r}")
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_metrics(data) -> tuple[RunTrace, dict]:
    """Inverse of :func:`write_metrics`."""
    doc = json.loads(_as_text(data))
    trace = RunTrace(
        records=[
            TraceRecord(t["loss_smooth"], t["loss_hard"], t["r"], t["tau"])
            for t in doc.pop("trace")
        ]
    )
    return trace, doc


def write_trace_csv(trace: RunTrace) -> str:
    """Delimited per-iteration series for external plotting."""
    lines = ["iteration,loss_smooth,loss_hard,r,tau"]
    for it, t in enumerate(trace):
        lines.append(f"{it},{t.loss_smooth:.17g},{t.loss_hard:.17g},{t.r:.17g},{t.tau:.17g}")
    return "\n".join(lines) + "\n"
