// DOM wiring for the explorer: dimension browser, level steppers, filter
// builder, pivot grid, CQL inspector, and the two-series compare chart.

import { ApiClient, ApiRequestError, LatestOnly } from "./api.js";
import { renderChartSvg, toChartModel } from "./chart.js";
import { buildCql, splitAtSpan } from "./cql.js";
import { escapeHtml, renderGrid, toGridModel } from "./pivot.js";
import {
  ALL_LEVEL,
  ExplorerState,
  FilterOp,
  decodeHash,
  defaultState,
  encodeHash,
} from "./state.js";
import type { DimensionMeta, MetadataPayload } from "./types.js";

const TYPOLOGY_QUERY =
  'MEASURE count(samples) WHERE dating.period = "Medieval" ' +
  'WHERE description CONTAINS "Zeuxippus" GROUP BY provenance AT country;';
const STRICTO_QUERY =
  'MEASURE count(samples) WHERE groups = "Zeuxippus Ware stricto sensu" ' +
  "GROUP BY provenance AT country;";

const $ = <T extends HTMLElement>(selector: string): T => {
  const node = document.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
};

const api = new ApiClient(localStorage.getItem("sherdcube.api") ?? "http://127.0.0.1:8000");
const gridGuard = new LatestOnly<void>();
const compareGuard = new LatestOnly<void>();

let metadata: MetadataPayload | null = null;
let state: ExplorerState | null = null;
let applyingHash = false;

function dimensions(): DimensionMeta[] {
  return metadata ? metadata.dimensions : [];
}

function syncHash(): void {
  if (!state || applyingHash) return;
  history.replaceState(null, "", encodeHash(state));
}

function showError(target: HTMLElement, cql: string, error: unknown): void {
  if (error instanceof ApiRequestError) {
    const payload = error.payload;
    let spanHtml = "";
    if (payload.span) {
      const parts = splitAtSpan(cql, Number(payload.span.start), Number(payload.span.end));
      spanHtml =
        `<pre class="cql-error">${escapeHtml(parts.before)}` +
        `<mark>${escapeHtml(parts.marked)}</mark>${escapeHtml(parts.after)}</pre>`;
    }
    target.innerHTML =
      `<div class="error"><strong>${escapeHtml(payload.error)}</strong> ` +
      `${escapeHtml(payload.message)}${spanHtml}</div>`;
  } else {
    target.innerHTML = `<div class="error">${escapeHtml(String(error))}</div>`;
  }
}

async function refreshGrid(): Promise<void> {
  if (!state) return;
  const cql = buildCql(state);
  $("#inspector").textContent = cql;
  const target = $("#grid");
  const outcome = await gridGuard.run(async () => {
    try {
      const payload = await api.query(state!.cube, cql);
      target.innerHTML = renderGrid(toGridModel(payload));
      $("#elapsed").textContent = payload.elapsed_ms ? `${payload.elapsed_ms} ms` : "";
    } catch (error) {
      showError(target, cql, error);
    }
  });
  if (outcome === null) return; // superseded by a newer query
  syncHash();
}

async function refreshCompare(): Promise<void> {
  if (!state || !state.compare) return;
  const { left, right, axis } = state.compare;
  const target = $("#chart");
  await compareGuard.run(async () => {
    try {
      const payload = await api.chartCompare(state!.cube, left, right, axis);
      target.innerHTML = renderChartSvg(toChartModel(payload));
    } catch (error) {
      showError(target, `${left}\n${right}`, error);
    }
  });
  syncHash();
}

function renderDimensionBrowser(): void {
  if (!state) return;
  const host = $("#dimensions");
  host.innerHTML = "";
  for (const dim of dimensions()) {
    const block = document.createElement("div");
    block.className = "dim";
    const title = document.createElement("h3");
    title.textContent = dim.name;
    block.appendChild(title);

    const select = document.createElement("select");
    const allOption = document.createElement("option");
    allOption.value = ALL_LEVEL;
    allOption.textContent = "(not grouped)";
    select.appendChild(allOption);
    for (const level of [...dim.levels].reverse()) {
      const option = document.createElement("option");
      option.value = level.name;
      option.textContent = `${level.name} (${level.member_count})`;
      select.appendChild(option);
    }
    select.value = state.levels[dim.name] ?? ALL_LEVEL;
    select.addEventListener("change", () => {
      state!.levels[dim.name] = select.value;
      void refreshGrid();
    });
    block.appendChild(select);

    const current = dim.levels.find((l) => l.name === state!.levels[dim.name]);
    if (current) {
      const list = document.createElement("div");
      list.className = "members";
      for (const member of current.members.slice(0, 12)) {
        const chip = document.createElement("span");
        chip.className = member.sentinel ? "member sentinel" : "member";
        chip.textContent = member.label;
        list.appendChild(chip);
      }
      if (current.members.length > 12) {
        const more = document.createElement("span");
        more.className = "member more";
        more.textContent = `+${current.members.length - 12} more`;
        list.appendChild(more);
      }
      block.appendChild(list);
    }
    host.appendChild(block);
  }
}

function renderFilters(): void {
  if (!state) return;
  const host = $("#filter-chips");
  host.innerHTML = "";
  state.filters.forEach((filter, index) => {
    const chip = document.createElement("span");
    chip.className = "chip";
    const target = filter.level ? `${filter.dim}.${filter.level}` : filter.dim;
    const op = filter.op === "eq" ? "=" : filter.op.toUpperCase();
    chip.textContent = `${target} ${op} ${filter.values.join(", ")}`;
    const close = document.createElement("button");
    close.textContent = "×";
    close.addEventListener("click", () => {
      state!.filters.splice(index, 1);
      renderFilters();
      void refreshGrid();
    });
    chip.appendChild(close);
    host.appendChild(chip);
  });
}

function populateFilterInputs(): void {
  const dimSelect = $("#filter-dim") as unknown as HTMLSelectElement;
  dimSelect.innerHTML = "";
  for (const dim of dimensions()) {
    const option = document.createElement("option");
    option.value = dim.name;
    option.textContent = dim.name;
    dimSelect.appendChild(option);
  }
  const updateLevels = () => {
    const levelSelect = $("#filter-level") as unknown as HTMLSelectElement;
    levelSelect.innerHTML = "";
    const dim = dimensions().find((d) => d.name === dimSelect.value);
    for (const level of dim ? dim.levels : []) {
      const option = document.createElement("option");
      option.value = level.name;
      option.textContent = level.name;
      levelSelect.appendChild(option);
    }
  };
  dimSelect.addEventListener("change", updateLevels);
  updateLevels();
}

function wireControls(): void {
  const measure = $("#measure") as unknown as HTMLSelectElement;
  measure.addEventListener("change", () => {
    const custom = $("#measure-custom") as unknown as HTMLInputElement;
    custom.style.display = measure.value === "custom" ? "inline-block" : "none";
    if (measure.value !== "custom") {
      state!.measure = measure.value;
      void refreshGrid();
    }
  });
  ($("#measure-custom") as unknown as HTMLInputElement).addEventListener("change", (event) => {
    state!.measure = (event.target as HTMLInputElement).value;
    void refreshGrid();
  });

  $("#filter-add").addEventListener("click", () => {
    const dim = ($("#filter-dim") as unknown as HTMLSelectElement).value;
    const level = ($("#filter-level") as unknown as HTMLSelectElement).value || null;
    const op = ($("#filter-op") as unknown as HTMLSelectElement).value as FilterOp;
    const raw = ($("#filter-value") as unknown as HTMLInputElement).value;
    if (!dim || !raw) return;
    const values = op === "in" ? raw.split("|").map((v) => v.trim()).filter(Boolean) : [raw];
    state!.filters.push({ dim, level: op === "contains" ? null : level, op, values });
    renderFilters();
    void refreshGrid();
  });

  $("#compare-toggle").addEventListener("click", () => {
    const panel = $("#compare-panel");
    if (state!.compare === null) {
      state!.compare = {
        left: ($("#compare-left") as unknown as HTMLTextAreaElement).value,
        right: ($("#compare-right") as unknown as HTMLTextAreaElement).value,
        axis: ($("#compare-axis") as unknown as HTMLInputElement).value,
      };
      panel.classList.remove("hidden");
      void refreshCompare();
    } else {
      state!.compare = null;
      panel.classList.add("hidden");
      syncHash();
    }
  });
  $("#compare-run").addEventListener("click", () => {
    state!.compare = {
      left: ($("#compare-left") as unknown as HTMLTextAreaElement).value,
      right: ($("#compare-right") as unknown as HTMLTextAreaElement).value,
      axis: ($("#compare-axis") as unknown as HTMLInputElement).value,
    };
    void refreshCompare();
  });

  const apiInput = $("#api-base") as unknown as HTMLInputElement;
  apiInput.value = localStorage.getItem("sherdcube.api") ?? "http://127.0.0.1:8000";
  apiInput.addEventListener("change", () => {
    localStorage.setItem("sherdcube.api", apiInput.value);
    api.setBaseUrl(apiInput.value);
    void boot();
  });

  ($("#cube-select") as unknown as HTMLSelectElement).addEventListener("change", (event) => {
    void selectCube((event.target as HTMLSelectElement).value);
  });

  window.addEventListener("hashchange", () => {
    const incoming = decodeHash(location.hash);
    if (!incoming || !state || incoming.cube !== state.cube) return;
    applyingHash = true;
    state = incoming;
    renderDimensionBrowser();
    renderFilters();
    applyCompareInputs();
    applyingHash = false;
    void refreshGrid();
    if (state.compare) void refreshCompare();
  });
}

function applyCompareInputs(): void {
  if (!state) return;
  const panel = $("#compare-panel");
  if (state.compare) {
    ($("#compare-left") as unknown as HTMLTextAreaElement).value = state.compare.left;
    ($("#compare-right") as unknown as HTMLTextAreaElement).value = state.compare.right;
    ($("#compare-axis") as unknown as HTMLInputElement).value = state.compare.axis;
    panel.classList.remove("hidden");
  } else {
    panel.classList.add("hidden");
  }
}

async function selectCube(cube: string): Promise<void> {
  metadata = await api.metadata(cube);
  $("#cube-facts").textContent = `${metadata.fact_count} facts`;
  const fromHash = decodeHash(location.hash);
  state = fromHash && fromHash.cube === cube ? fromHash : defaultState(cube, metadata.dimensions);
  renderDimensionBrowser();
  renderFilters();
  populateFilterInputs();
  applyCompareInputs();
  await refreshGrid();
  if (state.compare) await refreshCompare();
}

async function boot(): Promise<void> {
  const status = $("#status");
  try {
    const cubes = await api.listCubes();
    const select = $("#cube-select") as unknown as HTMLSelectElement;
    select.innerHTML = "";
    for (const cube of cubes.cubes) {
      const option = document.createElement("option");
      option.value = cube.cube_id;
      option.textContent = `${cube.cube_id} (${cube.fact_count})`;
      select.appendChild(option);
    }
    status.textContent = "";
    const fromHash = decodeHash(location.hash);
    const preferred =
      fromHash && cubes.cubes.some((c) => c.cube_id === fromHash.cube)
        ? fromHash.cube
        : cubes.cubes[0]?.cube_id;
    if (!preferred) {
      status.textContent = "No cubes registered yet; POST a bundle to /datasets first.";
      return;
    }
    select.value = preferred;
    await selectCube(preferred);
  } catch (error) {
    status.textContent = `Cannot reach the API: ${String(error)}`;
  }
}

($("#compare-left") as unknown as HTMLTextAreaElement).value = TYPOLOGY_QUERY;
($("#compare-right") as unknown as HTMLTextAreaElement).value = STRICTO_QUERY;
($("#compare-axis") as unknown as HTMLInputElement).value = "provenance.country";
wireControls();
void boot();
