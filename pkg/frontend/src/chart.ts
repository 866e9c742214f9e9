// Compare payload -> grouped-bar chart model -> SVG string. Bar values come
// straight off the payload (decimal strings); the server already aligned both
// series on one member axis and zero-filled the gaps.

import type { ComparePayload } from "./types.js";
import { escapeHtml } from "./pivot.js";

export interface Bar {
  label: string;
  sentinel: boolean;
  leftText: string;
  rightText: string;
  left: number;
  right: number;
}

export interface ChartModel {
  bars: Bar[];
  leftName: string;
  rightName: string;
  leftTotal: string;
  rightTotal: string;
  max: number;
}

export function toChartModel(
  payload: ComparePayload,
  leftName = "typological classification",
  rightName = "chemical classification",
): ChartModel {
  const bars = payload.members.map((member, i) => {
    const leftText = payload.left.values[i] ?? "0";
    const rightText = payload.right.values[i] ?? "0";
    return {
      label: member.label,
      sentinel: member.sentinel,
      leftText,
      rightText,
      left: Number(leftText),
      right: Number(rightText),
    };
  });
  const max = Math.max(1, ...bars.map((b) => Math.max(b.left, b.right)));
  return {
    bars,
    leftName,
    rightName,
    leftTotal: payload.left.total ?? "0",
    rightTotal: payload.right.total ?? "0",
    max,
  };
}

export const LEFT_COLOR = "#c0392b";
export const RIGHT_COLOR = "#2e6da4";

export function renderChartSvg(model: ChartModel, width = 640, height = 320): string {
  const margin = { top: 34, right: 12, bottom: 58, left: 36 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const slot = model.bars.length > 0 ? plotW / model.bars.length : plotW;
  const barW = Math.max(4, Math.min(26, slot * 0.34));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `class="compare-chart" role="img">`,
  );
  parts.push(
    `<text x="${margin.left}" y="16" class="legend">` +
      `<tspan fill="${LEFT_COLOR}">■ ${escapeHtml(model.leftName)} (${escapeHtml(model.leftTotal)})</tspan>` +
      `<tspan dx="14" fill="${RIGHT_COLOR}">■ ${escapeHtml(model.rightName)} (${escapeHtml(model.rightTotal)})</tspan>` +
      `</text>`,
  );
  const base = margin.top + plotH;
  parts.push(
    `<line x1="${margin.left}" y1="${base}" x2="${width - margin.right}" y2="${base}" class="axis"/>`,
  );

  model.bars.forEach((bar, i) => {
    const center = margin.left + slot * i + slot / 2;
    const leftH = (bar.left / model.max) * plotH;
    const rightH = (bar.right / model.max) * plotH;
    parts.push(
      `<rect x="${(center - barW - 1).toFixed(1)}" y="${(base - leftH).toFixed(1)}" ` +
        `width="${barW.toFixed(1)}" height="${leftH.toFixed(1)}" fill="${LEFT_COLOR}">` +
        `<title>${escapeHtml(bar.label)}: ${escapeHtml(bar.leftText)}</title></rect>`,
    );
    parts.push(
      `<rect x="${(center + 1).toFixed(1)}" y="${(base - rightH).toFixed(1)}" ` +
        `width="${barW.toFixed(1)}" height="${rightH.toFixed(1)}" fill="${RIGHT_COLOR}">` +
        `<title>${escapeHtml(bar.label)}: ${escapeHtml(bar.rightText)}</title></rect>`,
    );
    const cls = bar.sentinel ? "tick sentinel" : "tick";
    parts.push(
      `<text x="${center.toFixed(1)}" y="${base + 14}" text-anchor="end" ` +
        `transform="rotate(-35 ${center.toFixed(1)} ${base + 14})" class="${cls}">` +
        `${escapeHtml(bar.label)}</text>`,
    );
    parts.push(
      `<text x="${(center - barW / 2).toFixed(1)}" y="${(base - leftH - 3).toFixed(1)}" ` +
        `text-anchor="middle" class="value">${escapeHtml(bar.leftText)}</text>`,
    );
    parts.push(
      `<text x="${(center + barW / 2 + 2).toFixed(1)}" y="${(base - rightH - 3).toFixed(1)}" ` +
        `text-anchor="middle" class="value">${escapeHtml(bar.rightText)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
