// Explorer state and its URL-hash serialization (shareable views).

import type { DimensionMeta } from "./types.js";

export type FilterOp = "eq" | "in" | "contains";

export interface FilterState {
  dim: string;
  level: string | null;
  op: FilterOp;
  values: string[];
}

export interface CompareState {
  left: string;
  right: string;
  axis: string;
}

export interface ExplorerState {
  cube: string;
  // dim -> current level; "all" means the dimension is rolled all the way up
  levels: Record<string, string>;
  filters: FilterState[];
  axisOrder: string[];
  measure: string;
  compare: CompareState | null;
}

export const ALL_LEVEL = "all";

export function defaultState(cube: string, dims: DimensionMeta[]): ExplorerState {
  const levels: Record<string, string> = {};
  for (const dim of dims) levels[dim.name] = ALL_LEVEL;
  if (dims.length > 0) {
    const first = dims[0];
    levels[first.name] = first.levels[first.levels.length - 1].name;
  }
  return {
    cube,
    levels,
    filters: [],
    axisOrder: dims.map((d) => d.name),
    measure: "count(samples)",
    compare: null,
  };
}

export function encodeHash(state: ExplorerState): string {
  return "#s=" + encodeURIComponent(JSON.stringify(state));
}

function isFilter(raw: unknown): raw is FilterState {
  if (typeof raw !== "object" || raw === null) return false;
  const f = raw as FilterState;
  return (
    typeof f.dim === "string" &&
    (f.level === null || typeof f.level === "string") &&
    (f.op === "eq" || f.op === "in" || f.op === "contains") &&
    Array.isArray(f.values) &&
    f.values.every((v) => typeof v === "string")
  );
}

export function decodeHash(hash: string): ExplorerState | null {
  if (!hash.startsWith("#s=")) return null;
  let raw: unknown;
  try {
    raw = JSON.parse(decodeURIComponent(hash.slice(3)));
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const s = raw as ExplorerState;
  if (typeof s.cube !== "string" || typeof s.measure !== "string") return null;
  if (typeof s.levels !== "object" || s.levels === null) return null;
  if (!Array.isArray(s.axisOrder) || !s.axisOrder.every((d) => typeof d === "string")) return null;
  if (!Array.isArray(s.filters) || !s.filters.every(isFilter)) return null;
  if (s.compare !== null) {
    const c = s.compare;
    if (
      typeof c !== "object" ||
      typeof c.left !== "string" ||
      typeof c.right !== "string" ||
      typeof c.axis !== "string"
    ) {
      return null;
    }
  }
  return {
    cube: s.cube,
    levels: { ...s.levels },
    filters: s.filters.map((f) => ({ ...f, values: [...f.values] })),
    axisOrder: [...s.axisOrder],
    measure: s.measure,
    compare: s.compare === null ? null : { ...s.compare },
  };
}
