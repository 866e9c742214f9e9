"""JSON payload builders shared by the HTTP service and the CLI.

All numbers are serialized as decimal strings so golden files never drift
with float formatting; clients parse them back as needed.
"""

from __future__ import annotations

from .cql import parse, plan_and_execute
from .cql.planner import ResultTable
from .cube import Cube, Member


class AxisMismatch(Exception):
    pass


def fmt_number(value) -> "str | None":
    if value is None:
        return None
    if isinstance(value, bool):
        raise TypeError("booleans are not measure values")
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def member_json(member: Member) -> dict:
    return {
        "label": member.label,
        "path": list(member.path_labels()),
        "sentinel": member.sentinel,
    }


def result_json(result: ResultTable) -> dict:
    columns = [
        {"kind": "dimension", "dim": dim, "level": level}
        for dim, level in result.group_levels
    ]
    columns.append({"kind": "measure", "name": result.measure_label})
    rows = [
        [member_json(m) for m in members] + [fmt_number(value)]
        for members, value in result.rows
    ]
    return {"columns": columns, "rows": rows, "totals": [fmt_number(result.total)]}


def metadata_json(cube_id: str, cube: Cube) -> dict:
    dimensions = []
    for spec in cube.dims:
        levels = []
        for level in spec.levels:
            members = cube.members(spec.name, level)
            levels.append({
                "name": level,
                "member_count": str(len(members)),
                "members": [
                    {"label": m.label, "sentinel": m.sentinel} for m in members
                ],
            })
        dimensions.append({"name": spec.name, "levels": levels})
    return {
        "cube_id": cube_id,
        "fact_count": str(cube.n_facts),
        "dimensions": dimensions,
    }


def violations_json(report) -> list[dict]:
    return [
        {
            "record_type": v.record_type,
            "record_id": v.record_id,
            "rule": v.rule,
            "message": v.message,
        }
        for v in report
    ]


def _axis_of(result: ResultTable) -> tuple[str, str]:
    if len(result.group_levels) != 1:
        raise AxisMismatch("compare queries must group by exactly one dimension")
    return result.group_levels[0]


def chart_compare_json(cube: Cube, left_cql: str, right_cql: str, axis: str) -> dict:
    """Run two queries grouped by the same axis and align their series.

    Member labels absent from one side are filled with zero so both series
    share one categorical axis. Label collisions across parents (possible
    below the top level) are merged for presentation.
    """
    if "." in axis:
        axis_dim, axis_level = axis.split(".", 1)
    else:
        axis_dim = axis
        axis_level = cube.spec(axis_dim).levels[0]

    left = plan_and_execute(parse(left_cql), cube)
    right = plan_and_execute(parse(right_cql), cube)
    for side, result in (("left", left), ("right", right)):
        dim, level = _axis_of(result)
        if (dim, level) != (axis_dim, axis_level):
            raise AxisMismatch(
                f"{side} query groups by {dim}.{level}, expected {axis_dim}.{axis_level}"
            )

    def series_map(result: ResultTable) -> dict[str, tuple[float, bool]]:
        out: dict[str, tuple[float, bool]] = {}
        for (member,), value in result.rows:
            prior = out.get(member.label, (0, False))
            out[member.label] = (prior[0] + value, prior[1] or member.sentinel)
        return out

    left_map = series_map(left)
    right_map = series_map(right)
    labels = {**{k: v[1] for k, v in left_map.items()},
              **{k: v[1] for k, v in right_map.items()}}
    ordered = sorted(labels.items(), key=lambda item: (item[1], item[0]))

    def series(result: ResultTable, values: dict) -> dict:
        return {
            "cql": None,
            "label": result.measure_label,
            "values": [fmt_number(values.get(label, (0,))[0]) for label, _ in ordered],
            "total": fmt_number(result.total),
        }

    left_series = series(left, left_map)
    left_series["cql"] = left_cql
    right_series = series(right, right_map)
    right_series["cql"] = right_cql
    return {
        "axis": {"dim": axis_dim, "level": axis_level},
        "members": [{"label": label, "sentinel": sentinel} for label, sentinel in ordered],
        "left": left_series,
        "right": right_series,
    }
