// ExplorerState -> CQL. The inspector pane shows exactly this text, and the
// grid shows exactly what it returns, so state and visible table stay in sync.

import { ALL_LEVEL, ExplorerState, FilterState } from "./state.js";

export function quote(value: string): string {
  const escaped = value
    .replace(/\\/g, "\\\\")
    .replace(/"/g, '\\"')
    .replace(/\n/g, "\\n")
    .replace(/\t/g, "\\t");
  return `"${escaped}"`;
}

function filterClause(f: FilterState): string {
  const target = f.level === null ? f.dim : `${f.dim}.${f.level}`;
  if (f.op === "eq") return `WHERE ${target} = ${quote(f.values[0] ?? "")}`;
  if (f.op === "contains") return `WHERE ${target} CONTAINS ${quote(f.values[0] ?? "")}`;
  return `WHERE ${target} IN {${f.values.map(quote).join(", ")}}`;
}

export function buildCql(state: ExplorerState): string {
  const parts = [`MEASURE ${state.measure}`];
  for (const f of state.filters) parts.push(filterClause(f));
  for (const dim of state.axisOrder) {
    const level = state.levels[dim];
    if (level && level !== ALL_LEVEL) parts.push(`GROUP BY ${dim} AT ${level}`);
  }
  return parts.join(" ") + ";";
}

function utf8Length(ch: string): number {
  const cp = ch.codePointAt(0)!;
  if (cp < 0x80) return 1;
  if (cp < 0x800) return 2;
  if (cp < 0x10000) return 3;
  return 4;
}

// API error spans are byte offsets into the UTF-8 query text.
export function byteSpanToChars(
  text: string,
  startByte: number,
  endByte: number,
): { start: number; end: number } {
  let bytes = 0;
  let start = text.length;
  let end = text.length;
  let i = 0;
  for (const ch of text) {
    if (bytes >= startByte && start === text.length) start = i;
    if (bytes >= endByte) {
      end = i;
      break;
    }
    bytes += utf8Length(ch);
    i += ch.length;
  }
  if (bytes >= startByte && start === text.length) start = i;
  if (bytes >= endByte && end === text.length) end = i;
  return { start, end: Math.max(end, start) };
}

export interface SpanParts {
  before: string;
  marked: string;
  after: string;
}

export function splitAtSpan(text: string, startByte: number, endByte: number): SpanParts {
  const { start, end } = byteSpanToChars(text, startByte, endByte);
  return {
    before: text.slice(0, start),
    marked: text.slice(start, end) || " ",
    after: text.slice(end),
  };
}
