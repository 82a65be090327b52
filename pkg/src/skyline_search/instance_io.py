"""Instance documents (JSON) and trace serialization.

Every number in an instance document is exact: either a JSON string holding
a decimal or ``p/q`` rational, or a JSON number literal, which is read as a
decimal and never through binary floating point.
"""

from __future__ import annotations

import csv
import json
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, TextIO

from .engine import SearchResult
from .instance import (
    INITIAL_CONTEXT,
    LAST_ATTRIBUTE,
    Additive,
    AttributeSwitch,
    CostGrid,
    CostRule,
    Edge,
    ExplicitTable,
    Instance,
    InstanceError,
    format_rational,
    validate_instance,
)

FORMAT = "skyline-instance/1"
BUNDLED = ("running_example",)


class InstanceFormatError(InstanceError):
    pass


def _number(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int, Decimal)):
        raise InstanceFormatError(f"{where}: expected a number, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise InstanceFormatError(f"{where}: {value!r} is not an exact number") from None


def _keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    missing = sorted(required - obj.keys())
    if missing:
        raise InstanceFormatError(f"{where}: missing key {missing[0]!r}")
    unknown = sorted(obj.keys() - required - optional)
    if unknown:
        raise InstanceFormatError(f"{where}: unknown key {unknown[0]!r}")
    return obj


def _list(obj: Any, where: str) -> list:
    if not isinstance(obj, list):
        raise InstanceFormatError(f"{where}: expected a list")
    return obj


def _name(obj: Any, where: str) -> str:
    if not isinstance(obj, str) or not obj or any(c in obj for c in ",\n\r\"'"):
        raise InstanceFormatError(f"{where}: expected a plain identifier, got {obj!r}")
    return obj


def _lookup(names: dict[str, int], value: Any, where: str) -> int:
    if value not in names:
        raise InstanceFormatError(f"{where}: unknown name {value!r}")
    return names[value]


def parse_instance(text: str, validate: bool = True) -> Instance:
    """Parse an instance document; optionally reject instances that fail validation."""
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _keys(
        doc, "document",
        {"nodes", "attributes", "edges", "dimensions", "budget", "source", "targets", "progressive"},
        {"format", "contexts", "context_transition"},
    )
    if doc.get("format", FORMAT) != FORMAT:
        raise InstanceFormatError(f"document: unsupported format {doc['format']!r}")

    nodes = tuple(_name(n, "nodes") for n in _list(doc["nodes"], "nodes"))
    node_ids = {n: i for i, n in enumerate(nodes)}
    attributes = tuple(_name(a, "attributes") for a in _list(doc["attributes"], "attributes"))
    attr_ids = {a: i for i, a in enumerate(attributes)}
    if len(node_ids) != len(nodes) or len(attr_ids) != len(attributes):
        raise InstanceFormatError("document: duplicate node or attribute name")
    if INITIAL_CONTEXT in attr_ids:
        raise InstanceFormatError(f"attributes: {INITIAL_CONTEXT!r} is reserved")

    rule_kind = doc.get("context_transition", LAST_ATTRIBUTE)
    if rule_kind == LAST_ATTRIBUTE:
        if "contexts" in doc:
            raise InstanceFormatError("contexts: only allowed with an explicit context_transition table")
        contexts = (INITIAL_CONTEXT,) + attributes
        transition = tuple(tuple(a + 1 for a in range(len(attributes))) for _ in contexts)
    else:
        contexts = (INITIAL_CONTEXT,) + tuple(
            _name(c, "contexts") for c in _list(doc.get("contexts", []), "contexts")
        )
        ctx_ids = {c: i for i, c in enumerate(contexts)}
        if len(ctx_ids) != len(contexts):
            raise InstanceFormatError("contexts: duplicate context name")
        table: dict[tuple[int, int], int] = {}
        for k, row in enumerate(_list(rule_kind, "context_transition")):
            where = f"context_transition[{k}]"
            if not isinstance(row, list) or len(row) != 3:
                raise InstanceFormatError(f"{where}: expected [context, attribute, next context]")
            key = (_lookup(ctx_ids, row[0], where), _lookup(attr_ids, row[1], where))
            if key in table:
                raise InstanceFormatError(f"{where}: duplicate entry")
            table[key] = _lookup(ctx_ids, row[2], where)
        missing = [(c, a) for c in range(len(contexts)) for a in range(len(attributes)) if (c, a) not in table]
        if missing:
            c, a = missing[0]
            raise InstanceFormatError(
                f"context_transition: no entry for context {contexts[c]!r} and attribute {attributes[a]!r}"
            )
        transition = tuple(
            tuple(table[(c, a)] for a in range(len(attributes))) for c in range(len(contexts))
        )
        rule_kind = "table"

    dims = _list(doc["dimensions"], "dimensions")
    budget = _list(doc["budget"], "budget")
    if len(budget) != len(dims):
        raise InstanceFormatError("budget: needs one value per dimension")
    dim_names: list[str] = []
    grids: list[CostGrid] = []
    raw_rules: list[dict] = []
    for i, d in enumerate(dims):
        where = f"dimensions[{i}]"
        _keys(d, where, {"name", "rule", "grid"})
        dim_names.append(_name(d["name"], f"{where}.name"))
        levels = tuple(_number(x, f"{where}.grid") for x in _list(d["grid"], f"{where}.grid"))
        grids.append(CostGrid(levels, _number(budget[i], f"budget[{i}]")))
        raw_rules.append(d["rule"])
    dim_ids = {n: i for i, n in enumerate(dim_names)}
    if len(dim_ids) != len(dim_names):
        raise InstanceFormatError("dimensions: duplicate name")

    edges: list[Edge] = []
    for k, e in enumerate(_list(doc["edges"], "edges")):
        where = f"edges[{k}]"
        _keys(e, where, {"src", "dst", "attribute"}, {"weights"})
        weights = [Fraction(0)] * len(dim_names)
        raw_weights = e.get("weights", {})
        if not isinstance(raw_weights, dict):
            raise InstanceFormatError(f"{where}.weights: expected an object keyed by dimension name")
        for dim_name, w in raw_weights.items():
            weights[_lookup(dim_ids, dim_name, f"{where}.weights")] = _number(w, f"{where}.weights")
        edges.append(Edge(
            k,
            _lookup(node_ids, e["src"], where),
            _lookup(node_ids, e["dst"], where),
            _lookup(attr_ids, e["attribute"], where),
            tuple(weights),
        ))

    ctx_ids = {c: i for i, c in enumerate(contexts)}
    rules: list[CostRule] = []
    for i, r in enumerate(raw_rules):
        where = f"dimensions[{i}].rule"
        if not isinstance(r, dict) or "kind" not in r:
            raise InstanceFormatError(f"{where}: missing key 'kind'")
        if r["kind"] == "additive":
            _keys(r, where, {"kind"})
            rules.append(Additive())
        elif r["kind"] == "attribute-switch":
            _keys(r, where, {"kind", "penalty"})
            rules.append(AttributeSwitch(_number(r["penalty"], f"{where}.penalty")))
        elif r["kind"] == "table":
            _keys(r, where, {"kind", "entries"})
            index = grids[i].index_of
            entries = []
            for k, row in enumerate(_list(r["entries"], f"{where}.entries")):
                w = f"{where}.entries[{k}]"
                if not isinstance(row, list) or len(row) != 4:
                    raise InstanceFormatError(f"{w}: expected [context, edge, from level, to level]")
                ctx = _lookup(ctx_ids, row[0], w)
                if not isinstance(row[1], int) or not 0 <= row[1] < len(edges):
                    raise InstanceFormatError(f"{w}: edge index {row[1]!r} out of range")
                levels = []
                for value in row[2:]:
                    level = _number(value, w)
                    if level not in index:
                        raise InstanceFormatError(f"{w}: level {value!r} is not on the grid")
                    levels.append(index[level])
                entries.append((ctx, row[1], levels[0], levels[1]))
            rules.append(ExplicitTable(tuple(sorted(entries))))
        else:
            raise InstanceFormatError(f"{where}: unknown rule kind {r['kind']!r}")

    prog = doc["progressive"]
    if not isinstance(prog, dict):
        raise InstanceFormatError("progressive: expected an object mapping dimension name to δ_min")
    progressive = tuple(sorted(
        (_lookup(dim_ids, name, "progressive"), _number(v, f"progressive.{name}"))
        for name, v in prog.items()
    ))

    instance = Instance(
        node_names=nodes,
        attribute_names=attributes,
        context_names=contexts,
        context_transition=transition,
        edges=tuple(edges),
        dimension_names=tuple(dim_names),
        rules=tuple(rules),
        grids=tuple(grids),
        source=_lookup(node_ids, doc["source"], "source"),
        targets=frozenset(_lookup(node_ids, t, "targets") for t in _list(doc["targets"], "targets")),
        progressive=progressive,
        context_rule=rule_kind,
    )
    if validate:
        report = validate_instance(instance)
        if not report.ok:
            raise InstanceError("invalid instance: " + "; ".join(report.errors))
    return instance


def instance_document(instance: Instance) -> dict[str, Any]:
    fmt = format_rational
    dims = []
    for i, (name, rule, grid) in enumerate(zip(instance.dimension_names, instance.rules, instance.grids)):
        if isinstance(rule, Additive):
            payload: dict[str, Any] = {"kind": "additive"}
        elif isinstance(rule, AttributeSwitch):
            payload = {"kind": "attribute-switch", "penalty": fmt(rule.penalty)}
        else:
            payload = {
                "kind": "table",
                "entries": [
                    [instance.context_names[c], e, fmt(grid.levels[g]), fmt(grid.levels[n])]
                    for c, e, g, n in rule.entries
                ],
            }
        dims.append({"name": name, "rule": payload, "grid": [fmt(x) for x in grid.levels]})
    edges = []
    for e in instance.edges:
        item: dict[str, Any] = {
            "src": instance.node_names[e.src],
            "dst": instance.node_names[e.dst],
            "attribute": instance.attribute_names[e.attribute],
        }
        weights = {instance.dimension_names[i]: fmt(w) for i, w in enumerate(e.weights) if w}
        if weights:
            item["weights"] = weights
        edges.append(item)
    doc: dict[str, Any] = {
        "format": FORMAT,
        "nodes": list(instance.node_names),
        "attributes": list(instance.attribute_names),
    }
    if instance.context_rule != LAST_ATTRIBUTE:
        doc["contexts"] = list(instance.context_names[1:])
        doc["context_transition"] = [
            [instance.context_names[c], instance.attribute_names[a], instance.context_names[n]]
            for c, row in enumerate(instance.context_transition)
            for a, n in enumerate(row)
        ]
    doc.update({
        "edges": edges,
        "dimensions": dims,
        "budget": [fmt(g.budget) for g in instance.grids],
        "source": instance.node_names[instance.source],
        "targets": [instance.node_names[t] for t in sorted(instance.targets)],
        "progressive": {instance.dimension_names[i]: fmt(v) for i, v in instance.progressive},
    })
    return doc


def emit_instance(instance: Instance) -> str:
    return json.dumps(instance_document(instance), indent=2, ensure_ascii=False) + "\n"


def load_instance(ref: str | Path, validate: bool = True) -> Instance:
    """Load from a file path, or by name from the bundled fixtures."""
    path = Path(ref)
    if not path.exists() and str(ref) in BUNDLED:
        text = resources.files("skyline_search.data").joinpath(f"{ref}.json").read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    return parse_instance(text, validate=validate)


# -- traces -----------------------------------------------------------------


def trace_columns(dims: int, with_h_star: bool = False) -> list[str]:
    cols = ["step", "sig_node", "sig_context"]
    cols += [f"cost_{i + 1}" for i in range(dims)]
    cols += [f"bin_{i + 1}" for i in range(dims)]
    cols += ["skyline_size", "frontier_size", "covered_bins", "solutions", "certificate",
             "cost_updates", "dominance_comparisons"]
    if with_h_star:
        cols.append("h_star")
    return cols


def _trace_rows(result: SearchResult) -> list[dict[str, Any]]:
    inst = result.instance
    rows = []
    for i, e in enumerate(result.trace):
        sig, cost, b = e.extracted
        row: dict[str, Any] = {
            "step": e.step,
            "sig_node": inst.node_names[sig.node],
            "sig_context": inst.context_names[sig.context],
        }
        for k, v in enumerate(inst.values(cost)):
            row[f"cost_{k + 1}"] = format_rational(v)
        for k, v in enumerate(b):
            row[f"bin_{k + 1}"] = v
        row.update({
            "skyline_size": e.skyline_size_before,
            "frontier_size": e.frontier_size_after,
            "covered_bins": e.covered_bins,
            "solutions": e.solutions_count,
            "certificate": "true" if e.certificate_held else "false",
            "cost_updates": e.op_counters.cost_updates,
            "dominance_comparisons": e.op_counters.dominance_comparisons,
        })
        if result.h_star is not None:
            h = result.h_star[i]
            row["h_star"] = "inf" if h == float("inf") else int(h)
        rows.append(row)
    return rows


def emit_trace(result: SearchResult, sink: TextIO, format: str = "csv") -> None:
    """Write one record per extraction step.

    ``h_star`` is included only when the result was annotated by the oracle.
    """
    rows = _trace_rows(result)
    if format == "csv":
        writer = csv.DictWriter(
            sink,
            fieldnames=trace_columns(result.instance.dims, result.h_star is not None),
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
    elif format == "structured":
        payload = {
            "termination": result.termination.value,
            "columns": trace_columns(result.instance.dims, result.h_star is not None),
            "events": rows,
        }
        sink.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        raise ValueError(f"unknown trace format {format!r}")
