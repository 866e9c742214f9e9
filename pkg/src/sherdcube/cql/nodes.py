"""AST node types and the canonical printer.

Spans are carried for error reporting but excluded from equality, so a
pretty-printed and re-parsed query compares structurally identical to the
original AST.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import SourceSpan

_NO_SPAN = SourceSpan(0, 0)


@dataclass(frozen=True)
class OverClause:
    technique: str
    component: str
    unit: "str | None" = None
    span: SourceSpan = field(compare=False, default=_NO_SPAN)


@dataclass(frozen=True)
class MeasureClause:
    name: str
    args: tuple[str, ...] = ()
    over: "OverClause | None" = None
    span: SourceSpan = field(compare=False, default=_NO_SPAN)


@dataclass(frozen=True)
class FilterClause:
    dim: str
    level: "str | None"
    op: str  # "eq" | "in" | "contains"
    values: tuple[str, ...]
    span: SourceSpan = field(compare=False, default=_NO_SPAN)


@dataclass(frozen=True)
class GroupClause:
    dim: str
    level: "str | None" = None
    span: SourceSpan = field(compare=False, default=_NO_SPAN)


@dataclass(frozen=True)
class QueryAst:
    measure: MeasureClause
    filters: tuple[FilterClause, ...] = ()
    group_by: tuple[GroupClause, ...] = ()
    source: "str | None" = field(compare=False, default=None)


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def pretty_print(ast: QueryAst) -> str:
    """Render a query in canonical form; re-parsing yields an equal AST."""
    parts = ["MEASURE " + ast.measure.name]
    if ast.measure.args:
        parts[0] += "(" + ", ".join(ast.measure.args) + ")"
    if ast.measure.over is not None:
        over = ast.measure.over
        parts[0] += f" OF {over.technique}.{over.component}"
        if over.unit is not None:
            parts[0] += f" IN {over.unit}"
    for f in ast.filters:
        target = f.dim if f.level is None else f"{f.dim}.{f.level}"
        if f.op == "eq":
            parts.append(f"WHERE {target} = {_quote(f.values[0])}")
        elif f.op == "in":
            inner = ", ".join(_quote(v) for v in f.values)
            parts.append(f"WHERE {target} IN {{{inner}}}")
        else:
            parts.append(f"WHERE {target} CONTAINS {_quote(f.values[0])}")
    for g in ast.group_by:
        clause = f"GROUP BY {g.dim}"
        if g.level is not None:
            clause += f" AT {g.level}"
        parts.append(clause)
    return " ".join(parts) + ";"
