"""Naive filter-group-aggregate reference implementation.

Works straight off the star schema with dicts, sets and per-fact loops, with
no shared code with the cube engine beyond the filter vocabulary and the
rendered sentinel label convention. Used as the ground truth for operator
and query results.
"""

from __future__ import annotations

import math

from sherdcube.cube import MemberFilter, TextFilter
from sherdcube.etl import StarSchema

CANONICAL = {
    "provenance": ("site", "town", "region", "country"),
    "dating": ("sub_period", "period"),
    "description": ("typology", "category"),
    "groups": ("group",),
    "technique": ("technique",),
}


def unknown_label(level: str) -> str:
    return f"⟨unknown {level}⟩"


UNGROUPED_LABEL = "⟨ungrouped⟩"


def fact_labels(star: StarSchema) -> list[dict]:
    """Per fact: {(dim, level): display label} with sentinels rendered."""
    rows = []
    for f in star.facts:
        row = {}
        path = star.dim_provenance[f.provenance_key]
        for level, label in zip(CANONICAL["provenance"], path.labels()):
            row[("provenance", level)] = label if isinstance(label, str) else unknown_label(level)
        dating = star.dim_dating.get(f.dating_key)
        row[("dating", "sub_period")] = (
            dating.sub_period if dating is not None and dating.sub_period else unknown_label("sub_period")
        )
        row[("dating", "period")] = (
            dating.period if dating is not None and dating.period else unknown_label("period")
        )
        desc = star.dim_description.get(f.description_key)
        row[("description", "typology")] = (
            desc.typology if desc is not None and desc.typology else unknown_label("typology")
        )
        row[("description", "category")] = (
            desc.category if desc is not None and desc.category else unknown_label("category")
        )
        group = star.dim_group.get(f.group_key)
        row[("groups", "group")] = group.name if group is not None else UNGROUPED_LABEL
        row[("technique", "technique")] = f.technique
        rows.append(row)
    return rows


def _matches(star: StarSchema, fact, row: dict, flt) -> bool:
    if isinstance(flt, TextFilter):
        rec = star.dim_description.get(fact.description_key)
        if rec is None:
            return False
        return flt.needle in rec.free_text or flt.needle in rec.typology
    if isinstance(flt, MemberFilter):
        return row.get((flt.dim, flt.level)) in flt.labels
    raise TypeError(f"unsupported filter {flt!r}")


def _path(row: dict, dim: str, levels: tuple[str, ...], level: str) -> tuple[str, ...]:
    i = levels.index(level)
    return tuple(row[(dim, lv)] for lv in reversed(levels[i:]))


def select_facts(star: StarSchema, filters) -> list[int]:
    rows = fact_labels(star)
    return [
        i
        for i, f in enumerate(star.facts)
        if all(_matches(star, f, rows[i], flt) for flt in filters)
    ]


def compute_cells(
    star: StarSchema,
    dim_specs: list[tuple[str, tuple[str, ...]]],
    levels_map: dict[str, str],
    filters,
) -> dict[tuple, list[int]]:
    """Group selected facts by qualified member paths of the non-'all' dims."""
    rows = fact_labels(star)
    grouped = [(dim, levels) for dim, levels in dim_specs if levels_map[dim] != "all"]
    cells: dict[tuple, list[int]] = {}
    for i, f in enumerate(star.facts):
        if not all(_matches(star, f, rows[i], flt) for flt in filters):
            continue
        key = tuple(_path(rows[i], dim, levels, levels_map[dim]) for dim, levels in grouped)
        cells.setdefault(key, []).append(i)
    return cells


def cell_stats(star: StarSchema, indices: list[int]) -> dict:
    facts = [star.facts[i] for i in indices]
    by_triple: dict[tuple, list[float]] = {}
    for f in facts:
        by_triple.setdefault((f.technique, f.component, f.unit), []).append(f.value)
    return {
        "fact_count": len(facts),
        "distinct_samples": len({f.sample_id for f in facts}),
        "distinct_analyses": len({f.analysis_id for f in facts}),
        "value_stats": {
            triple: (len(vals), math.fsum(vals), min(vals), max(vals))
            for triple, vals in by_triple.items()
        },
    }


def compute_all_stats(star, dim_specs, levels_map, filters) -> dict[tuple, dict]:
    return {
        key: cell_stats(star, idxs)
        for key, idxs in compute_cells(star, dim_specs, levels_map, filters).items()
    }


def aggregate(star, dim_specs, levels_map, filters, measure, over=None) -> dict[tuple, float]:
    cells = compute_cells(star, dim_specs, levels_map, filters)
    out: dict[tuple, float] = {}
    for key, idxs in cells.items():
        facts = [star.facts[i] for i in idxs]
        if measure == "count_facts":
            out[key] = len(facts)
        elif measure == "count_samples":
            out[key] = len({f.sample_id for f in facts})
        elif measure == "count_analyses":
            out[key] = len({f.analysis_id for f in facts})
        else:
            tech, comp, unit = (over if len(over) == 3 else (*over, None))
            vals = [
                f.value
                for f in facts
                if f.technique == tech and f.component == comp and (unit is None or f.unit == unit)
            ]
            if not vals:
                continue
            if measure == "sum":
                out[key] = math.fsum(vals)
            elif measure == "avg":
                out[key] = math.fsum(vals) / len(vals)
            elif measure == "min":
                out[key] = min(vals)
            elif measure == "max":
                out[key] = max(vals)
            else:
                raise ValueError(measure)
    return out


def avg_samples_per_child(star, dim_specs, levels_map, filters, child_dim) -> dict[tuple, float]:
    """Mean distinct-sample count over child cells, keyed one level coarser."""
    cells = compute_cells(star, dim_specs, levels_map, filters)
    grouped = [dim for dim, levels in dim_specs if levels_map[dim] != "all"]
    child_pos = grouped.index(child_dim)
    child_levels = dict(dim_specs)[child_dim]
    at_coarsest = levels_map[child_dim] == child_levels[-1]

    buckets: dict[tuple, list[int]] = {}
    for key, idxs in cells.items():
        count = len({star.facts[i].sample_id for i in idxs})
        if at_coarsest:
            parent_key = key[:child_pos] + key[child_pos + 1:]
        else:
            parent_key = key[:child_pos] + (key[child_pos][:-1],) + key[child_pos + 1:]
        buckets.setdefault(parent_key, []).append(count)
    return {key: sum(counts) / len(counts) for key, counts in buckets.items()}


# ---------------------------------------------------------- engine adapters


def engine_cells(view) -> dict[tuple, dict]:
    """Convert engine view cells to the oracle's comparable shape."""
    out = {}
    for key, stats in view.cells.items():
        okey = tuple(m.path_labels() for m in key if m.level != "all")
        out[okey] = {
            "fact_count": stats.fact_count,
            "distinct_samples": stats.distinct_samples,
            "distinct_analyses": stats.distinct_analyses,
            "value_stats": {
                triple: (vs.count, vs.sum, vs.min, vs.max)
                for triple, vs in stats.value_stats.items()
            },
        }
    return out


def engine_rows(table) -> dict[tuple, float]:
    return {tuple(m.path_labels() for m in members): value for members, value in table.rows}
