"""In-memory cube over the star schema and the navigation operators.

A cube binds fact measurements to dimension members at every hierarchy level
up front (each fact links directly to site, town, region and country, so a
gap at one level never breaks the chain to the others). Views are immutable:
rollup, drill_down, slice, dice and pivot all return new views.

Members are qualified by their full path from the coarsest level down, so a
member with the same label under two different parents stays two members and
re-keying cells to a coarser level is always well defined. Filters match on
the display label at one level; sentinel members match their rendered form,
e.g. "⟨unknown site⟩".

Distinct counts are non-additive, so they are recomputed from fact-level id
sets at every granularity instead of being summed from child cells. Value
sums use math.fsum, which is exact regardless of grouping order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .etl import StarSchema, UNGROUPED_KEY, UNKNOWN_KEY
from .model import UNGROUPED, Unknown, display, is_sentinel

LEVEL_ALL = "all"

CANONICAL_LEVELS: dict[str, tuple[str, ...]] = {
    "provenance": ("site", "town", "region", "country"),
    "dating": ("sub_period", "period"),
    "description": ("typology", "category"),
    "groups": ("group",),
    "technique": ("technique",),
}

MEASURES = (
    "count_facts",
    "count_samples",
    "count_analyses",
    "sum",
    "avg",
    "min",
    "max",
    "avg_samples_per_child",
)

VALUE_MEASURES = ("sum", "avg", "min", "max")


class CubeError(Exception):
    pass


class UnknownDimension(CubeError):
    pass


class UnknownLevel(CubeError):
    pass


class UnknownMember(CubeError):
    pass


class LevelOrderViolation(CubeError):
    pass


class UnitMismatch(CubeError):
    pass


class MissingComponent(CubeError):
    pass


class InvalidPermutation(CubeError):
    pass


class InvalidPredicate(CubeError):
    pass


class MeasureArgError(CubeError):
    pass


@dataclass(frozen=True)
class DimensionSpec:
    """An analysis axis with its levels ordered finest to coarsest."""

    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        if not self.levels:
            raise ValueError("levels must be non-empty")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError("levels must not repeat")


STANDARD_DIMENSIONS = tuple(
    DimensionSpec(name, levels) for name, levels in CANONICAL_LEVELS.items()
)


@dataclass(frozen=True)
class Member:
    """A dimension member, qualified by its path from the coarsest level.

    path runs coarsest -> this member's level and is empty for the single
    member of the virtual "all" level.
    """

    dim: str
    level: str
    path: tuple = ()

    @property
    def label(self) -> str:
        if not self.path:
            return "⟨all⟩"
        return display(self.path[-1])

    @property
    def sentinel(self) -> bool:
        return bool(self.path) and is_sentinel(self.path[-1])

    @property
    def sort_key(self) -> tuple:
        # sentinels order after real labels at every path component
        return tuple((is_sentinel(p), display(p)) for p in self.path)

    def path_labels(self) -> tuple[str, ...]:
        return tuple(display(p) for p in self.path)


@dataclass(frozen=True)
class ValueStats:
    count: int
    sum: float
    min: float
    max: float


@dataclass(frozen=True, eq=True)
class CellStats:
    """Aggregates of one cell; value stats are per (technique, component, unit)."""

    fact_count: int
    distinct_samples: int
    distinct_analyses: int
    value_stats: "dict[tuple[str, str, str], ValueStats]" = field(default_factory=dict)


@dataclass(frozen=True)
class MemberFilter:
    """Keep facts whose member label at one level is in the given set."""

    dim: str
    level: str
    labels: tuple[str, ...]


@dataclass(frozen=True)
class TextFilter:
    """Keep facts whose description free text or typology contains the needle."""

    dim: str
    needle: str


Filter = "MemberFilter | TextFilter"


def _factorize(values: Sequence) -> tuple[list, np.ndarray]:
    table: dict = {}
    codes = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        code = table.get(v)
        if code is None:
            code = len(table)
            table[v] = code
        codes[i] = code
    return list(table), codes


def _is_subsequence(levels: Sequence[str], canonical: Sequence[str]) -> bool:
    it = iter(canonical)
    return all(level in it for level in levels)


class _DimIndex:
    """Per-dimension member tables and per-fact member codes at every level."""

    def __init__(self, spec: DimensionSpec, rows: "dict[str, tuple]", fact_keys: list):
        self.spec = spec
        levels = spec.levels
        # per level: registry of qualified paths -> code
        registries: list[dict[tuple, int]] = [dict() for _ in levels]
        row_codes: dict[str, tuple[int, ...]] = {}
        for key in sorted(rows):
            fine_labels = rows[key]
            codes = []
            for i in range(len(levels)):
                path = tuple(reversed(fine_labels[i:]))
                reg = registries[i]
                code = reg.get(path)
                if code is None:
                    code = len(reg)
                    reg[path] = code
                codes.append(code)
            row_codes[key] = tuple(codes)

        self.level_members: dict[str, list[Member]] = {}
        self.label_to_codes: dict[str, dict[str, tuple[int, ...]]] = {}
        for i, level in enumerate(levels):
            members = [Member(spec.name, level, path) for path in registries[i]]
            self.level_members[level] = members
            by_label: dict[str, list[int]] = {}
            for code, m in enumerate(members):
                by_label.setdefault(m.label, []).append(code)
            self.label_to_codes[level] = {k: tuple(v) for k, v in by_label.items()}
        self.level_members[LEVEL_ALL] = [Member(spec.name, LEVEL_ALL, ())]
        self.label_to_codes[LEVEL_ALL] = {self.level_members[LEVEL_ALL][0].label: (0,)}

        n = len(fact_keys)
        key_labels, key_codes = _factorize(fact_keys)
        self.level_codes: dict[str, np.ndarray] = {}
        for i, level in enumerate(levels):
            lut = np.fromiter(
                (row_codes[k][i] for k in key_labels), dtype=np.int64, count=len(key_labels)
            ) if key_labels else np.empty(0, dtype=np.int64)
            self.level_codes[level] = lut[key_codes] if n else np.empty(0, dtype=np.int64)
        self.level_codes[LEVEL_ALL] = np.zeros(n, dtype=np.int64)

        # full member universe per level, including members with no facts
        self.universe: dict[str, tuple[Member, ...]] = {}
        for i, level in enumerate(levels):
            members = sorted(
                (Member(spec.name, level, path) for path in registries[i]),
                key=lambda m: m.sort_key,
            )
            self.universe[level] = tuple(members)
        self.universe[LEVEL_ALL] = tuple(self.level_members[LEVEL_ALL])

    def has_label(self, level: str, label: str) -> bool:
        return any(m.label == label for m in self.universe.get(level, ()))


def _dim_rows(star: StarSchema, name: str, levels: tuple[str, ...]) -> dict[str, tuple]:
    """Resolved fine->coarse label tuple per dimension key, sentinels included."""
    canonical = CANONICAL_LEVELS[name]

    def project(labels_by_level: dict) -> tuple:
        return tuple(labels_by_level[lv] for lv in levels)

    rows: dict[str, tuple] = {}
    if name == "provenance":
        for key, path in star.dim_provenance.items():
            labels = dict(zip(canonical, path.labels()))
            rows[key] = project(labels)
    elif name == "dating":
        for key, rec in star.dim_dating.items():
            if rec is None:
                labels = {"sub_period": Unknown("sub_period"), "period": Unknown("period")}
            else:
                labels = {
                    "sub_period": rec.sub_period if rec.sub_period else Unknown("sub_period"),
                    "period": rec.period if rec.period else Unknown("period"),
                }
            rows[key] = project(labels)
    elif name == "description":
        for key, rec in star.dim_description.items():
            if rec is None:
                labels = {"typology": Unknown("typology"), "category": Unknown("category")}
            else:
                labels = {
                    "typology": rec.typology if rec.typology else Unknown("typology"),
                    "category": rec.category if rec.category else Unknown("category"),
                }
            rows[key] = project(labels)
    elif name == "groups":
        for key, rec in star.dim_group.items():
            rows[key] = project({"group": UNGROUPED if rec is None else rec.name})
    else:
        raise UnknownDimension(name)
    return rows


_FACT_KEY_FIELDS = {
    "provenance": "provenance_key",
    "dating": "dating_key",
    "description": "description_key",
    "groups": "group_key",
}


class Cube:
    """Immutable multidimensional index over one star schema."""

    def __init__(self, star: StarSchema, dims: "Sequence[DimensionSpec] | None" = None):
        specs = tuple(dims) if dims is not None else STANDARD_DIMENSIONS
        seen = set()
        for spec in specs:
            if spec.name not in CANONICAL_LEVELS:
                raise UnknownDimension(f"unknown dimension {spec.name!r}")
            if spec.name in seen:
                raise UnknownDimension(f"dimension {spec.name!r} given twice")
            seen.add(spec.name)
            canonical = CANONICAL_LEVELS[spec.name]
            if not _is_subsequence(spec.levels, canonical):
                raise UnknownLevel(
                    f"levels {spec.levels!r} are not an ordered subset of {canonical!r}"
                )
        self.source = star
        self.dims = specs
        facts = star.facts
        self.n_facts = len(facts)

        self._values = np.fromiter((f.value for f in facts), dtype=np.float64, count=self.n_facts)
        self._sample_labels, self._sample_codes = _factorize([f.sample_id for f in facts])
        self._analysis_labels, self._analysis_codes = _factorize([f.analysis_id for f in facts])
        self._triples, self._triple_codes = _factorize(
            [(f.technique, f.component, f.unit) for f in facts]
        )
        self._desc_keys, self._desc_codes = _factorize([f.description_key for f in facts])

        self._index: dict[str, _DimIndex] = {}
        for spec in specs:
            if spec.name == "technique":
                rows = {f.technique: (f.technique,) for f in facts}
                fact_keys = [f.technique for f in facts]
            else:
                rows = _dim_rows(star, spec.name, spec.levels)
                key_field = _FACT_KEY_FIELDS[spec.name]
                fact_keys = [getattr(f, key_field) for f in facts]
            self._index[spec.name] = _DimIndex(spec, rows, fact_keys)

    def spec(self, dim: str) -> DimensionSpec:
        for spec in self.dims:
            if spec.name == dim:
                return spec
        raise UnknownDimension(f"cube has no dimension {dim!r}")

    def levels_of(self, dim: str) -> tuple[str, ...]:
        return self.spec(dim).levels

    def members(self, dim: str, level: str) -> tuple[Member, ...]:
        """All members at one level, including members carrying no facts."""
        index = self._index[self.spec(dim).name]
        if level not in index.universe:
            raise UnknownLevel(f"{dim} has no level {level!r}")
        return index.universe[level]

    def has_member(self, dim: str, level: str, label: str) -> bool:
        return self._index[self.spec(dim).name].has_label(level, label)

    def view(self) -> "CubeView":
        return CubeView(
            cube=self,
            levels=tuple((spec.name, spec.levels[0]) for spec in self.dims),
            filters=(),
        )

    @cached_property
    def base_cells(self) -> "dict[tuple[Member, ...], CellStats]":
        """Cells at the finest level of every dimension; conserves all facts."""
        return self.view().cells

    def _text_match_code_array(self, needle: str) -> np.ndarray:
        star = self.source
        hits = []
        for code, key in enumerate(self._desc_keys):
            rec = star.dim_description.get(key)
            if rec is not None and (needle in rec.free_text or needle in rec.typology):
                hits.append(code)
        return np.asarray(hits, dtype=np.int64)


def build_cube(star: StarSchema, dims: "Sequence[DimensionSpec] | None" = None) -> Cube:
    return Cube(star, dims)


@dataclass(frozen=True)
class _Grouping:
    group_levels: tuple[tuple[str, str], ...]
    keys: tuple[tuple[Member, ...], ...]
    g: np.ndarray
    sel: np.ndarray


@dataclass(frozen=True)
class AggregateTable:
    """Aggregate values keyed by member tuples for the grouped dimensions."""

    group_levels: tuple[tuple[str, str], ...]
    measure: str
    rows: tuple[tuple[tuple[Member, ...], "int | float"], ...]


@dataclass(frozen=True)
class PivotTable:
    """The current cells re-ordered along a permutation of the axes."""

    axes: tuple[tuple[str, str], ...]
    cells: tuple[tuple[tuple[Member, ...], CellStats], ...]


def _combine_codes(cols: list[np.ndarray]) -> np.ndarray:
    combined = cols[0].astype(np.int64, copy=False)
    for c in cols[1:]:
        card = int(c.max()) + 1 if c.size else 1
        combined = combined * card + c
        _, combined = np.unique(combined, return_inverse=True)
    return combined


@dataclass(frozen=True)
class CubeView:
    """An immutable navigation state: one level per dimension plus filters."""

    cube: Cube
    levels: tuple[tuple[str, str], ...]
    filters: tuple = ()

    def level_of(self, dim: str) -> str:
        for name, level in self.levels:
            if name == dim:
                return level
        raise UnknownDimension(f"view has no dimension {dim!r}")

    def _level_rank(self, dim: str, level: str) -> int:
        spec = self.cube.spec(dim)
        if level == LEVEL_ALL:
            return len(spec.levels)
        try:
            return spec.levels.index(level)
        except ValueError:
            raise UnknownLevel(f"{dim} has no level {level!r}") from None

    # ------------------------------------------------------------------ ops

    def rollup(self, dim: str, to_level: str) -> "CubeView":
        """Re-aggregate one dimension at a coarser level."""
        current = self.level_of(dim)
        if self._level_rank(dim, to_level) <= self._level_rank(dim, current):
            raise LevelOrderViolation(
                f"rollup target {to_level!r} is not coarser than {current!r} on {dim}"
            )
        return self._with_level(dim, to_level)

    def drill_down(self, dim: str, to_level: str) -> "CubeView":
        """Restore a finer level; exact inverse of rollup over the same span."""
        current = self.level_of(dim)
        if self._level_rank(dim, to_level) >= self._level_rank(dim, current):
            raise LevelOrderViolation(
                f"drill-down target {to_level!r} is not finer than {current!r} on {dim}"
            )
        return self._with_level(dim, to_level)

    def slice(self, dim: str, member: str, level: "str | None" = None) -> "CubeView":
        """Fix one dimension to one member label; sentinels are sliceable."""
        spec = self.cube.spec(dim)
        at = level if level is not None else self.level_of(dim)
        if at != LEVEL_ALL and at not in spec.levels:
            raise UnknownLevel(f"{dim} has no level {at!r}")
        if not self.cube.has_member(dim, at, member):
            raise UnknownMember(f"{member!r} is not a member of {dim}.{at}")
        return replace(self, filters=self.filters + (MemberFilter(dim, at, (member,)),))

    def dice(self, predicates: Iterable) -> "CubeView":
        """Conjunctive sub-cube selection by member sets or text containment."""
        new = []
        for p in predicates:
            if isinstance(p, MemberFilter):
                spec = self.cube.spec(p.dim)
                if p.level != LEVEL_ALL and p.level not in spec.levels:
                    raise UnknownLevel(f"{p.dim} has no level {p.level!r}")
                new.append(p)
            elif isinstance(p, TextFilter):
                if p.dim != "description":
                    raise InvalidPredicate("text predicates apply only to description")
                self.cube.spec(p.dim)
                new.append(p)
            else:
                raise InvalidPredicate(f"unsupported predicate {p!r}")
        return replace(self, filters=self.filters + tuple(new))

    def rollup_all(self) -> "CubeView":
        """Every dimension at the virtual top level: the grand-total view."""
        return replace(self, levels=tuple((d, LEVEL_ALL) for d, _ in self.levels))

    def _with_level(self, dim: str, level: str) -> "CubeView":
        return replace(
            self,
            levels=tuple((d, level if d == dim else l) for d, l in self.levels),
        )

    # ------------------------------------------------------------- grouping

    @cached_property
    def _base_mask(self) -> "np.ndarray | None":
        cube = self.cube
        mask = None
        for f in self.filters:
            if isinstance(f, MemberFilter):
                index = cube._index[f.dim]
                codes: list[int] = []
                table = index.label_to_codes.get(f.level, {})
                for label in f.labels:
                    codes.extend(table.get(label, ()))
                wanted = np.asarray(sorted(set(codes)), dtype=np.int64)
                m = np.isin(index.level_codes[f.level], wanted)
            else:
                wanted = cube._text_match_code_array(f.needle)
                m = np.isin(cube._desc_codes, wanted)
            mask = m if mask is None else mask & m
        return mask

    def _grouping(self, extra_mask: "np.ndarray | None" = None) -> _Grouping:
        cube = self.cube
        mask = self._base_mask
        if extra_mask is not None:
            mask = extra_mask if mask is None else (mask & extra_mask)
        sel = np.flatnonzero(mask) if mask is not None else np.arange(cube.n_facts)

        cols: list[np.ndarray] = []
        group_levels: list[tuple[str, str]] = []
        tables: list[list[Member]] = []
        for spec in cube.dims:
            level = self.level_of(spec.name)
            if level == LEVEL_ALL:
                continue
            index = cube._index[spec.name]
            cols.append(index.level_codes[level][sel])
            group_levels.append((spec.name, level))
            tables.append(index.level_members[level])

        if sel.size == 0:
            return _Grouping(tuple(group_levels), (), np.empty(0, dtype=np.int64), sel)
        if not cols:
            return _Grouping((), ((),), np.zeros(sel.size, dtype=np.int64), sel)

        combined = _combine_codes(cols)
        _, first, g = np.unique(combined, return_index=True, return_inverse=True)
        raw_keys = [
            tuple(tables[j][int(cols[j][fi])] for j in range(len(cols))) for fi in first
        ]
        order = sorted(range(len(raw_keys)), key=lambda i: tuple(m.sort_key for m in raw_keys[i]))
        remap = np.empty(len(order), dtype=np.int64)
        for new_id, old_id in enumerate(order):
            remap[old_id] = new_id
        return _Grouping(tuple(group_levels), tuple(raw_keys[i] for i in order), remap[g], sel)

    def _distinct_counts(self, grouping: _Grouping, codes: np.ndarray, n_labels: int) -> np.ndarray:
        n_groups = len(grouping.keys)
        if grouping.sel.size == 0 or n_groups == 0 or n_labels == 0:
            return np.zeros(n_groups, dtype=np.int64)
        pairs = grouping.g * np.int64(n_labels) + codes[grouping.sel]
        u = np.unique(pairs)
        return np.bincount(u // np.int64(n_labels), minlength=n_groups)

    # ---------------------------------------------------------------- cells

    @cached_property
    def cells(self) -> "dict[tuple[Member, ...], CellStats]":
        """Full statistics per cell at the current granularity."""
        cube = self.cube
        grouping = self._grouping()
        n_groups = len(grouping.keys)
        fact_counts = np.bincount(grouping.g, minlength=n_groups) if n_groups else np.empty(0)
        ds = self._distinct_counts(grouping, cube._sample_codes, len(cube._sample_labels))
        da = self._distinct_counts(grouping, cube._analysis_codes, len(cube._analysis_labels))

        per_group_values: list[dict] = [dict() for _ in range(n_groups)]
        if grouping.sel.size:
            tc = cube._triple_codes[grouping.sel]
            vals = cube._values[grouping.sel]
            n_triples = len(cube._triples)
            seg = grouping.g * np.int64(n_triples) + tc
            order = np.argsort(seg, kind="stable")
            seg_sorted = seg[order]
            vals_sorted = vals[order]
            boundaries = np.flatnonzero(np.diff(seg_sorted)) + 1
            starts = np.concatenate(([0], boundaries))
            ends = np.concatenate((boundaries, [seg_sorted.size]))
            for a, b in zip(starts, ends):
                gid, t = divmod(int(seg_sorted[a]), n_triples)
                chunk = vals_sorted[a:b]
                per_group_values[gid][cube._triples[t]] = ValueStats(
                    count=int(b - a),
                    sum=math.fsum(chunk),
                    min=float(chunk.min()),
                    max=float(chunk.max()),
                )

        all_members = {
            spec.name: cube._index[spec.name].level_members[LEVEL_ALL][0] for spec in cube.dims
        }
        out: dict[tuple[Member, ...], CellStats] = {}
        for gid, key in enumerate(grouping.keys):
            it = iter(key)
            full_key = tuple(
                all_members[spec.name] if self.level_of(spec.name) == LEVEL_ALL else next(it)
                for spec in cube.dims
            )
            out[full_key] = CellStats(
                fact_count=int(fact_counts[gid]),
                distinct_samples=int(ds[gid]),
                distinct_analyses=int(da[gid]),
                value_stats=per_group_values[gid],
            )
        return out

    # ------------------------------------------------------------ aggregate

    def aggregate(
        self,
        measure: str,
        over: "tuple | None" = None,
        child_dim: "str | None" = None,
    ) -> AggregateTable:
        """Evaluate one measure per cell; cells with no matching facts are omitted.

        over = (technique, component) or (technique, component, unit) and is
        required for sum/avg/min/max. Aggregating across mixed units raises
        UnitMismatch.
        """
        if measure not in MEASURES:
            raise MeasureArgError(f"unknown measure {measure!r}")

        cube = self.cube
        if measure in VALUE_MEASURES:
            if over is None:
                raise MissingComponent(f"measure {measure!r} needs (technique, component)")
            tech, comp, unit = (over if len(over) == 3 else (*over, None))
            matching = [
                i for i, (t, c, u) in enumerate(cube._triples)
                if t == tech and c == comp and (unit is None or u == unit)
            ]
            extra = np.isin(cube._triple_codes, np.asarray(matching, dtype=np.int64))
            grouping = self._grouping(extra_mask=extra)
            if unit is None and grouping.sel.size:
                units = {cube._triples[t][2] for t in np.unique(cube._triple_codes[grouping.sel])}
                if len(units) > 1:
                    raise UnitMismatch(
                        f"{tech}.{comp} measured in multiple units {sorted(units)}; specify one"
                    )
            rows = self._value_rows(grouping, measure)
        elif measure == "count_facts":
            grouping = self._grouping()
            counts = np.bincount(grouping.g, minlength=len(grouping.keys))
            rows = [(k, int(c)) for k, c in zip(grouping.keys, counts)]
        elif measure == "count_samples":
            grouping = self._grouping()
            counts = self._distinct_counts(grouping, cube._sample_codes, len(cube._sample_labels))
            rows = [(k, int(c)) for k, c in zip(grouping.keys, counts)]
        elif measure == "count_analyses":
            grouping = self._grouping()
            counts = self._distinct_counts(grouping, cube._analysis_codes, len(cube._analysis_labels))
            rows = [(k, int(c)) for k, c in zip(grouping.keys, counts)]
        else:
            return self._avg_samples_per_child(child_dim)

        return AggregateTable(grouping.group_levels, measure, tuple(rows))

    def _value_rows(self, grouping: _Grouping, measure: str):
        cube = self.cube
        if grouping.sel.size == 0:
            return []
        vals = cube._values[grouping.sel]
        order = np.argsort(grouping.g, kind="stable")
        g_sorted = grouping.g[order]
        vals_sorted = vals[order]
        boundaries = np.flatnonzero(np.diff(g_sorted)) + 1
        starts = np.concatenate(([0], boundaries))
        ends = np.concatenate((boundaries, [g_sorted.size]))
        rows = []
        for a, b in zip(starts, ends):
            gid = int(g_sorted[a])
            chunk = vals_sorted[a:b]
            if measure == "sum":
                value = math.fsum(chunk)
            elif measure == "avg":
                value = math.fsum(chunk) / (b - a)
            elif measure == "min":
                value = float(chunk.min())
            else:
                value = float(chunk.max())
            rows.append((grouping.keys[gid], value))
        return rows

    def _avg_samples_per_child(self, child_dim: "str | None") -> AggregateTable:
        """Mean of per-child distinct sample counts, grouped one level coarser.

        The source aggregate list names an "average number of samples" without
        a formula; this is the sibling-average reading. The fact-weighted
        average of measurement values is the separate avg measure.
        """
        non_all = [d for d, l in self.levels if l != LEVEL_ALL]
        if child_dim is None:
            if len(non_all) != 1:
                raise MeasureArgError(
                    "avg_samples_per_child needs an explicit dimension when several are grouped"
                )
            child_dim = non_all[0]
        if child_dim not in non_all:
            raise MeasureArgError(f"{child_dim!r} is not grouped in this view")

        cube = self.cube
        spec = cube.spec(child_dim)
        current = self.level_of(child_dim)
        rank = spec.levels.index(current)
        parent_level = spec.levels[rank + 1] if rank + 1 < len(spec.levels) else LEVEL_ALL

        grouping = self._grouping()
        ds = self._distinct_counts(grouping, cube._sample_codes, len(cube._sample_labels))
        child_pos = [d for d, _ in grouping.group_levels].index(child_dim)

        buckets: dict[tuple, list[int]] = {}
        for key, count in zip(grouping.keys, ds):
            child_member = key[child_pos]
            if parent_level == LEVEL_ALL:
                parent_key = key[:child_pos] + key[child_pos + 1:]
            else:
                parent = Member(child_dim, parent_level, child_member.path[:-1])
                parent_key = key[:child_pos] + (parent,) + key[child_pos + 1:]
            buckets.setdefault(parent_key, []).append(int(count))

        if parent_level == LEVEL_ALL:
            out_levels = tuple(gl for gl in grouping.group_levels if gl[0] != child_dim)
        else:
            out_levels = tuple(
                (d, parent_level if d == child_dim else l) for d, l in grouping.group_levels
            )
        rows = sorted(
            ((key, sum(counts) / len(counts)) for key, counts in buckets.items()),
            key=lambda r: tuple(m.sort_key for m in r[0]),
        )
        return AggregateTable(out_levels, "avg_samples_per_child", tuple(rows))

    # ---------------------------------------------------------------- pivot

    def pivot(self, axis_order: Sequence[str]) -> PivotTable:
        """Reorder presentation axes; the cell multiset is unchanged."""
        names = [spec.name for spec in self.cube.dims]
        if sorted(axis_order) != sorted(names):
            raise InvalidPermutation(f"{tuple(axis_order)!r} is not a permutation of {tuple(names)!r}")
        perm = [names.index(a) for a in axis_order]
        rows = [
            (tuple(key[p] for p in perm), stats) for key, stats in self.cells.items()
        ]
        rows.sort(key=lambda r: tuple(m.sort_key for m in r[0]))
        axes = tuple((names[p], self.level_of(names[p])) for p in perm)
        return PivotTable(axes=axes, cells=tuple(rows))
