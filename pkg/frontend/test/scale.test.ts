import { describe, expect, it } from "vitest";

import { formatTick, linearScale, symlogScale } from "../src/scale.js";

describe("linearScale", () => {
  it("maps the data range onto [0, 1]", () => {
    const s = linearScale(0, 100);
    expect(s.pos(0)).toBe(0);
    expect(s.pos(100)).toBe(1);
    expect(s.pos(50)).toBeCloseTo(0.5, 12);
  });

  it("produces ticks inside the range", () => {
    const ticks = linearScale(0, 100).ticks();
    expect(ticks[0]).toBe(0);
    expect(ticks[ticks.length - 1]).toBe(100);
    for (const t of ticks) {
      expect(t).toBeGreaterThanOrEqual(0);
      expect(t).toBeLessThanOrEqual(100);
    }
  });

  it("degenerate range does not divide by zero", () => {
    const s = linearScale(3, 3);
    expect(Number.isFinite(s.pos(3))).toBe(true);
  });
});

describe("symlogScale", () => {
  it("is monotone across zero", () => {
    const s = symlogScale(-1e-2, 1e-2);
    const values = [-1e-2, -1e-4, 0, 1e-4, 1e-2];
    const pos = values.map((v) => s.pos(v));
    for (let i = 1; i < pos.length; i++) {
      expect(pos[i]!).toBeGreaterThan(pos[i - 1]!);
    }
  });

  it("keeps zero between signed ticks", () => {
    const ticks = symlogScale(-1e-3, 1e-3).ticks();
    expect(ticks).toContain(0);
    const zero = ticks.indexOf(0);
    for (let i = 0; i < ticks.length; i++) {
      if (i < zero) expect(ticks[i]!).toBeLessThan(0);
      if (i > zero) expect(ticks[i]!).toBeGreaterThan(0);
    }
  });

  it("resolves small magnitudes a linear scale would flatten", () => {
    const s = symlogScale(-1e-2, 1e-2);
    const gap = s.pos(1e-6) - s.pos(0);
    expect(gap).toBeGreaterThan(0.05);
  });
});

describe("formatTick", () => {
  it("formats decades compactly and zero as 0", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(0.001)).toBe("1e-3");
    expect(formatTick(-0.001)).toBe("-1e-3");
    expect(formatTick(100)).toBe("100");
  });
});
