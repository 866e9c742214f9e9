// Payload shapes of the analytics API. All numbers arrive as decimal strings;
// the UI renders them verbatim so every visible figure traces to a response.

export interface MemberCell {
  label: string;
  path: string[];
  sentinel: boolean;
}

export interface DimensionColumn {
  kind: "dimension";
  dim: string;
  level: string;
}

export interface MeasureColumn {
  kind: "measure";
  name: string;
}

export type Column = DimensionColumn | MeasureColumn;

export interface QueryPayload {
  columns: Column[];
  rows: (MemberCell | string | null)[][];
  totals: (string | null)[];
  elapsed_ms?: string;
}

export interface MemberMeta {
  label: string;
  sentinel: boolean;
}

export interface LevelMeta {
  name: string;
  member_count: string;
  members: MemberMeta[];
}

export interface DimensionMeta {
  name: string;
  levels: LevelMeta[];
}

export interface MetadataPayload {
  cube_id: string;
  fact_count: string;
  dimensions: DimensionMeta[];
}

export interface SeriesPayload {
  cql: string;
  label: string;
  values: string[];
  total: string | null;
}

export interface ComparePayload {
  axis: { dim: string; level: string };
  members: MemberMeta[];
  left: SeriesPayload;
  right: SeriesPayload;
}

export interface CubeListPayload {
  cubes: { cube_id: string; fact_count: string }[];
}

export interface ApiErrorPayload {
  error: string;
  message: string;
  span?: { start: string; end: string } | null;
  [key: string]: unknown;
}
