import { describe, expect, it } from "vitest";

import { LEFT_COLOR, RIGHT_COLOR, renderChartSvg, toChartModel } from "../src/chart.js";
import type { ComparePayload } from "../src/types.js";
import compare from "../fixtures/compare.json";

describe("compare chart from the recorded payload", () => {
  const payload = compare as ComparePayload;

  it("carries the two series totals 163 and 87", () => {
    const model = toChartModel(payload);
    expect(model.leftTotal).toBe("163");
    expect(model.rightTotal).toBe("87");
  });

  it("aligns one bar pair per member, values verbatim", () => {
    const model = toChartModel(payload);
    expect(model.bars.map((b) => b.label)).toEqual(payload.members.map((m) => m.label));
    expect(model.bars.map((b) => b.leftText)).toEqual(payload.left.values);
    expect(model.bars.map((b) => b.rightText)).toEqual(payload.right.values);
  });

  it("renders both series in their legend colors with totals", () => {
    const svg = renderChartSvg(toChartModel(payload));
    expect(svg).toContain(`fill="${LEFT_COLOR}"`);
    expect(svg).toContain(`fill="${RIGHT_COLOR}"`);
    expect(svg).toContain("typological classification (163)");
    expect(svg).toContain("chemical classification (87)");
    const rects = svg.match(/<rect /g) ?? [];
    expect(rects.length).toBe(payload.members.length * 2);
  });

  it("gives zero-filled members zero-height bars on a shared axis", () => {
    const narrowed: ComparePayload = {
      ...payload,
      right: { ...payload.right, values: payload.right.values.map((v, i) => (i === 0 ? v : "0")) },
    };
    const model = toChartModel(narrowed);
    expect(model.bars.slice(1).every((b) => b.right === 0)).toBe(true);
    const svg = renderChartSvg(model);
    expect(svg).toContain('height="0.0"');
    // the categorical axis still lists every member
    for (const member of payload.members) {
      expect(svg).toContain(member.label);
    }
  });

  it("scales bars against the shared maximum", () => {
    const model = toChartModel(payload);
    const tallest = Math.max(...model.bars.map((b) => Math.max(b.left, b.right)));
    expect(model.max).toBe(tallest);
  });
});
