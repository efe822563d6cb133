"""
Serialisation of a run: JSON report, CSV tables and DOT / GraphML graphs.

Everything written here is a pure function of the run's inputs, so repeated
runs produce byte-identical files. Reals are kept to 6 significant digits in
the report itself, which makes ``RunReport.from_dict(json.loads(text))``
reproduce the report exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .cluster import SimilarityGraph
from .errors import DataError

SIGNIFICANT_DIGITS = 6


def round_sig(x: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    return float(f"{x:.{digits}g}")


def normalize(obj: Any) -> Any:
    """JSON-native copy of ``obj`` with every real rounded to 6 significant digits."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    return obj


def matrix_to_dict(values, row_labels, col_labels) -> dict:
    return {
        "rows": [lab.full for lab in row_labels],
        "rows_short": [lab.short for lab in row_labels],
        "columns": list(col_labels),
        "values": np.asarray(values).tolist(),
    }


@dataclass
class RunReport:
    config: dict
    cleaning: dict
    encoding: list
    ranked_columns: list
    correlation: dict
    determination: dict
    eigenvalues: list
    variance_report: dict
    selection: dict
    common_variance_full: dict
    loadings: dict
    common_variance: dict
    loadings_rotated: dict
    common_variance_rotated: dict
    rotation: dict
    clusters: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            setattr(self, f.name, normalize(getattr(self, f.name)))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> RunReport:
        names = {f.name for f in dataclasses.fields(cls)}
        missing = names - set(data)
        if missing - {"metadata"}:
            raise DataError(f"report is missing keys: {sorted(missing)}")
        return cls(**{k: v for k, v in data.items() if k in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    return path


def emit_json(report: RunReport, path: str | Path) -> Path:
    return _write_text(path, report.to_json())


def load_json(path: str | Path) -> RunReport:
    with Path(path).open(encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))


def percent(fraction: float) -> str:
    return f"{100.0 * fraction:.1f}%"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _graph_nodes(graph: SimilarityGraph):
    """Factor nodes in factor order, then attribute nodes in matrix order."""
    factors = [(f"f{c.factor_index + 1}", c.factor) for c in graph.clusters]
    members = sorted(graph.edges, key=lambda m: m.attribute_index)
    attributes = [(f"a{m.attribute_index + 1}", m.attribute) for m in members]
    edges = [
        (f"a{m.attribute_index + 1}", f"f{c.factor_index + 1}", m)
        for c in graph.clusters
        for m in sorted(c.members, key=lambda m: m.attribute_index)
    ]
    return factors, attributes, edges


def render_dot(graph: SimilarityGraph, label_mode: str = "full") -> str:
    factors, attributes, edges = _graph_nodes(graph)
    lines = [
        "digraph similarity {",
        f"  // rule: {graph.rule.value}; edges point from attribute to factor",
        "  rankdir=LR;",
    ]
    for node, name in factors:
        lines.append(f"  {node} [label={_dot_quote(name)}, shape=box];")
    for node, label in attributes:
        lines.append(f"  {node} [label={_dot_quote(label.get(label_mode))}, shape=ellipse];")
    for src, dst, m in edges:
        lines.append(f"  {src} -> {dst} [label={_dot_quote(percent(m.shared_variance))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(graph: SimilarityGraph, path: str | Path, label_mode: str = "full") -> Path:
    return _write_text(path, render_dot(graph, label_mode))


GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def render_graphml(graph: SimilarityGraph, label_mode: str = "full") -> str:
    ET.register_namespace("", GRAPHML_NS)

    def q(tag):
        return f"{{{GRAPHML_NS}}}{tag}"

    root = ET.Element(q("graphml"))
    keys = [
        ("label", "node", "label", "string"),
        ("kind", "node", "kind", "string"),
        ("shared_variance", "edge", "shared_variance", "double"),
        ("edge_label", "edge", "label", "string"),
    ]
    for key_id, domain, name, typ in keys:
        ET.SubElement(
            root, q("key"), {"id": key_id, "for": domain, "attr.name": name, "attr.type": typ}
        )
    g = ET.SubElement(root, q("graph"), {"id": graph.rule.value, "edgedefault": "directed"})

    factors, attributes, edges = _graph_nodes(graph)
    for node, name in factors:
        n = ET.SubElement(g, q("node"), {"id": node})
        ET.SubElement(n, q("data"), {"key": "label"}).text = name
        ET.SubElement(n, q("data"), {"key": "kind"}).text = "factor"
    for node, label in attributes:
        n = ET.SubElement(g, q("node"), {"id": node})
        ET.SubElement(n, q("data"), {"key": "label"}).text = label.get(label_mode)
        ET.SubElement(n, q("data"), {"key": "kind"}).text = "attribute"
    for i, (src, dst, m) in enumerate(edges):
        e = ET.SubElement(g, q("edge"), {"id": f"e{i + 1}", "source": src, "target": dst})
        ET.SubElement(e, q("data"), {"key": "shared_variance"}).text = repr(
            round_sig(m.shared_variance)
        )
        ET.SubElement(e, q("data"), {"key": "edge_label"}).text = percent(m.shared_variance)

    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def emit_graphml(graph: SimilarityGraph, path: str | Path, label_mode: str = "full") -> Path:
    return _write_text(path, render_graphml(graph, label_mode))


def render_csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(
            [repr(round_sig(v)) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    return buf.getvalue()


def matrix_rows(values, row_labels, col_labels, label_mode: str = "full") -> list[list]:
    rows = [["", *col_labels]]
    for lab, row in zip(row_labels, np.asarray(values)):
        rows.append([lab.get(label_mode), *(float(v) for v in row)])
    return rows


def emit_csv(rows: Sequence[Sequence], path: str | Path) -> Path:
    return _write_text(path, render_csv(rows))
