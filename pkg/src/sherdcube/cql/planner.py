"""Compile a parsed query to a cube operator pipeline and run it."""

from __future__ import annotations

from dataclasses import dataclass

from ..cube import (
    LEVEL_ALL,
    Cube,
    CubeError,
    CubeView,
    Member,
    MemberFilter,
    TextFilter,
    UnknownMember,
)
from ..model import TECHNIQUES, UNITS
from .errors import SemanticError
from .nodes import MeasureClause, QueryAst

_COUNT_ARGS = {
    "samples": "count_samples",
    "facts": "count_facts",
    "analyses": "count_analyses",
}


@dataclass(frozen=True)
class ResultTable:
    """Rows of (member tuple, value) plus the grand total under the same filters."""

    group_levels: tuple[tuple[str, str], ...]
    measure_label: str
    rows: tuple[tuple[tuple[Member, ...], "int | float"], ...]
    total: "int | float | None"


def measure_label(measure: MeasureClause) -> str:
    label = measure.name
    if measure.args:
        label += "(" + ", ".join(measure.args) + ")"
    if measure.over is not None:
        label += f" OF {measure.over.technique}.{measure.over.component}"
        if measure.over.unit is not None:
            label += f" IN {measure.over.unit}"
    return label


def _resolve_measure(measure: MeasureClause) -> tuple[str, "tuple | None", "str | None"]:
    """Map the measure clause to (engine measure, over triple, child dim)."""
    name = measure.name
    if name == "count":
        if len(measure.args) != 1 or measure.args[0] not in _COUNT_ARGS:
            raise SemanticError(
                "count takes exactly one of (samples, facts, analyses)", measure.span
            )
        if measure.over is not None:
            raise SemanticError("count does not take an OF clause", measure.span)
        return _COUNT_ARGS[measure.args[0]], None, None
    if name in ("sum", "avg", "min", "max"):
        if measure.args:
            raise SemanticError(f"{name} takes no arguments", measure.span)
        if measure.over is None:
            raise SemanticError(f"{name} needs OF technique.component", measure.span)
        over = measure.over
        if over.technique not in TECHNIQUES:
            raise SemanticError(f"unknown technique {over.technique!r}", over.span)
        if over.unit is not None and over.unit not in UNITS:
            raise SemanticError(f"unknown unit {over.unit!r}", over.span)
        return name, (over.technique, over.component, over.unit), None
    if name == "avg_samples_per_child":
        if len(measure.args) > 1:
            raise SemanticError("avg_samples_per_child takes at most one dimension", measure.span)
        if measure.over is not None:
            raise SemanticError("avg_samples_per_child does not take an OF clause", measure.span)
        return name, None, (measure.args[0] if measure.args else None)
    raise SemanticError(f"unknown measure {name!r}", measure.span)


def _check_dim_level(cube: Cube, dim: str, level: "str | None", span) -> str:
    """Validate a dimension/level pair; a missing level defaults to the finest."""
    try:
        spec = cube.spec(dim)
    except CubeError as exc:
        raise SemanticError(str(exc), span) from None
    if level is None:
        return spec.levels[0]
    if level not in spec.levels:
        raise SemanticError(f"{dim} has no level {level!r}", span) from None
    return level


def plan_and_execute(ast: QueryAst, cube: Cube) -> ResultTable:
    """Execute a query as the dice/slice -> rollup -> aggregate pipeline.

    Dimensions absent from GROUP BY are rolled to the virtual top level, so
    the result granularity is exactly the grouped dimensions. The totals value
    re-aggregates under the same filters with every dimension rolled up.
    """
    engine_measure, over, child_dim = _resolve_measure(ast.measure)

    view = cube.view()
    for clause in ast.filters:
        if clause.op == "contains":
            if clause.dim != "description":
                raise SemanticError("CONTAINS applies only to description", clause.span)
            if clause.level is not None:
                raise SemanticError("CONTAINS does not take a level", clause.span)
            try:
                cube.spec("description")
            except CubeError as exc:
                raise SemanticError(str(exc), clause.span) from None
            view = view.dice([TextFilter("description", clause.values[0])])
            continue
        level = _check_dim_level(cube, clause.dim, clause.level, clause.span)
        if clause.op == "eq":
            try:
                view = view.slice(clause.dim, clause.values[0], level=level)
            except UnknownMember as exc:
                raise SemanticError(str(exc), clause.span) from None
        else:
            view = view.dice([MemberFilter(clause.dim, level, clause.values)])

    targets: dict[str, str] = {}
    for clause in ast.group_by:
        targets[clause.dim] = _check_dim_level(cube, clause.dim, clause.level, clause.span)
    if child_dim is not None and child_dim not in targets:
        raise SemanticError(
            f"avg_samples_per_child dimension {child_dim!r} must be grouped", ast.measure.span
        )

    for spec in cube.dims:
        target = targets.get(spec.name, LEVEL_ALL)
        if target != spec.levels[0]:
            view = view.rollup(spec.name, target)

    try:
        table = view.aggregate(engine_measure, over=over, child_dim=child_dim)
        total = _grand_total(view, engine_measure, over, child_dim)
    except CubeError as exc:
        raise SemanticError(str(exc), ast.measure.span) from None

    return ResultTable(
        group_levels=table.group_levels,
        measure_label=measure_label(ast.measure),
        rows=table.rows,
        total=total,
    )


def _grand_total(view: CubeView, measure: str, over, child_dim):
    if measure == "avg_samples_per_child":
        # mean distinct-sample count across all child cells
        per_child = view.aggregate("count_samples")
        if not per_child.rows:
            return None
        values = [v for _, v in per_child.rows]
        return sum(values) / len(values)
    total_table = view.rollup_all().aggregate(measure, over=over)
    if total_table.rows:
        return total_table.rows[0][1]
    return 0 if measure.startswith("count_") else None
