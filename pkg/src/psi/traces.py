"""JSON and DOT renderings of reduction traces."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, cast

import networkx as nx
from jsonschema import Draft202012Validator

from . import TRACE_SCHEMA_VERSION
from .errors import InvariantViolation
from .printer import format_term
from .rewrite import ReductionGraph, ReductionStep, ReductionTrace, Strategy
from .syntax import Term, alpha_key

TRACE_SCHEMA_PATH = "schema/trace_v1.json"


@lru_cache(maxsize=1)
def _load_schema(path: str = TRACE_SCHEMA_PATH) -> dict[str, Any]:
    schema_path = Path(path)
    if not schema_path.is_absolute():
        schema_path = Path(__file__).resolve().parents[2] / schema_path
    with schema_path.open("r", encoding="utf-8") as handle:
        return cast(dict[str, Any], json.load(handle))


def schema_findings(document: dict[str, Any]) -> list[str]:
    validator = Draft202012Validator(_load_schema())
    findings = []
    for error in sorted(validator.iter_errors(document), key=lambda e: [str(p) for p in e.path]):
        location = "$" + "".join(f".{part}" for part in error.path)
        findings.append(f"{location}: {error.message}")
    return findings


def _step_dict(step: ReductionStep) -> dict[str, Any]:
    return {
        "from": format_term(step.source),
        "witness": [format_term(w) for w in step.witness],
        "rule": step.rule.value,
        "to": format_term(step.target),
    }


def trace_document(
    source: Term,
    traces: list[ReductionTrace],
    strategy: Strategy,
    *,
    class_budget: int,
    max_steps: int,
) -> dict[str, Any]:
    """Versioned, schema-checked encoding of the traces from one normalization run."""

    document: dict[str, Any] = {
        "schema": TRACE_SCHEMA_VERSION,
        "input": format_term(source, annotate_free=True),
        "strategy": strategy.value,
        "budget": {"class": class_budget, "steps": max_steps},
        "exhaustive": all(trace.exhaustive for trace in traces),
        "traces": [
            {
                "steps": [_step_dict(step) for step in trace.steps],
                "result": format_term(trace.result),
                "normal": trace.normal,
            }
            for trace in traces
        ],
        "normal_forms": [format_term(trace.result) for trace in traces if trace.normal],
    }
    findings = schema_findings(document)
    if findings:
        raise InvariantViolation("invalid trace document: " + "; ".join(findings))
    return document


def trace_graph(traces: list[ReductionTrace]) -> nx.DiGraph:
    """Steps of the traces as a graph; each step links the term it starts from to its reduct."""

    graph = nx.DiGraph()
    for trace in traces:
        current = alpha_key(trace.source)
        graph.add_node(current, term=trace.source)
        for step in trace.steps:
            target = alpha_key(step.target)
            graph.add_node(target, term=step.target)
            graph.add_edge(current, target, rule=step.rule.value)
            current = target
    return graph


def reduction_graph_view(graph: ReductionGraph) -> nx.DiGraph:
    view = nx.DiGraph()
    for node, data in graph.graph.nodes(data=True):
        view.add_node(node, term=data["term"])
    for a, b, data in graph.graph.edges(data=True):
        view.add_edge(a, b, rule=data["rule"].value)
    return view


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(graph: nx.DiGraph, name: str = "reduction") -> str:
    ids = {node: f"n{i}" for i, node in enumerate(graph.nodes)}
    lines = [f"digraph {name} {{", '  node [shape="box", fontsize="12"];']
    for node, data in graph.nodes(data=True):
        lines.append(f'  {ids[node]} [label="{_escape(format_term(data["term"]))}"];')
    for a, b, data in graph.edges(data=True):
        lines.append(f'  {ids[a]} -> {ids[b]} [label="{_escape(data["rule"])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
