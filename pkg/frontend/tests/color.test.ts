import { describe, expect, it } from "vitest";

import { annotationColor, divergingColor, edgeBalance, nodeFill } from "../src/color.js";

describe("edge colour scale", () => {
  it("maps one-sided annotations to the pure endpoint colours", () => {
    expect(annotationColor(5, 0)).toBe("#ff0000");
    expect(annotationColor(0, 5)).toBe("#00ff00");
  });

  it("maps equal annotations to black", () => {
    expect(annotationColor(5, 5)).toBe("#000000");
    expect(annotationColor(0, 0)).toBe("#000000");
  });

  it("is antisymmetric in the two weights", () => {
    expect(edgeBalance(2, 6)).toBeCloseTo(-edgeBalance(6, 2));
  });

  it("clamps out-of-range balance", () => {
    expect(divergingColor(-4)).toBe("#ff0000");
    expect(divergingColor(4)).toBe("#00ff00");
  });
});

describe("node saturation", () => {
  it("gives the largest value the strongest fill", () => {
    const strong = nodeFill(10, 10);
    const weak = nodeFill(1, 10);
    const zero = nodeFill(0, 10);
    expect(strong).toBe("#0000ff");
    // lighter fills have larger red/green channels
    const channel = (hex: string) => parseInt(hex.slice(1, 3), 16);
    expect(channel(weak)).toBeGreaterThan(channel(strong));
    expect(channel(zero)).toBeGreaterThan(channel(weak));
  });

  it("zero everywhere gets the minimum saturation", () => {
    expect(nodeFill(0, 0)).toBe(nodeFill(0, 100));
  });
});
