import { describe, expect, it } from "vitest";

import {
  boxToScreen,
  fitTransform,
  imageToScreen,
  pan,
  screenToBox,
  screenToImage,
  zoomAt,
  ViewTransform,
} from "../src/transform.js";
import { Box4 } from "../src/types.js";

function mulberry32(seed: number) {
  let a = seed;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("fitTransform", () => {
  it("contains the image and centers the short axis", () => {
    const t = fitTransform(64, 48, 640, 640);
    expect(t.scale).toBe(10);
    expect(t.offsetX).toBe(0);
    expect(t.offsetY).toBe((640 - 480) / 2);
  });
});

describe("zoomAt", () => {
  it("keeps the anchor point fixed", () => {
    const t: ViewTransform = { scale: 2, offsetX: 10, offsetY: -5 };
    const zoomed = zoomAt(t, 1.5, 100, 80);
    const [ax, ay] = screenToImage(t, 100, 80);
    expect(imageToScreen(zoomed, ax, ay)[0]).toBeCloseTo(100, 9);
    expect(imageToScreen(zoomed, ax, ay)[1]).toBeCloseTo(80, 9);
  });
});

describe("round-trips", () => {
  it("image -> screen -> image stays within one device pixel", () => {
    const rand = mulberry32(7);
    for (let i = 0; i < 500; i += 1) {
      let t: ViewTransform = fitTransform(64, 48, 640, 480);
      t = zoomAt(t, 0.25 + rand() * 8, rand() * 640, rand() * 480);
      t = pan(t, (rand() - 0.5) * 200, (rand() - 0.5) * 200);
      const x = rand() * 64;
      const y = rand() * 48;
      const [sx, sy] = imageToScreen(t, x, y);
      const [bx, by] = screenToImage(t, sx, sy);
      const [rx, ry] = imageToScreen(t, bx, by);
      expect(Math.abs(rx - sx)).toBeLessThan(1);
      expect(Math.abs(ry - sy)).toBeLessThan(1);
    }
  });

  it("box -> screen rect -> box stays within one device pixel", () => {
    const rand = mulberry32(11);
    for (let i = 0; i < 500; i += 1) {
      const t: ViewTransform = {
        scale: 0.25 + rand() * 8,
        offsetX: (rand() - 0.5) * 400,
        offsetY: (rand() - 0.5) * 400,
      };
      const x0 = rand() * 60;
      const y0 = rand() * 40;
      const box: Box4 = [x0, y0, x0 + 1 + rand() * 4, y0 + 1 + rand() * 4];
      const back = screenToBox(t, boxToScreen(t, box));
      const rect = boxToScreen(t, back);
      const original = boxToScreen(t, box);
      expect(Math.abs(rect.left - original.left)).toBeLessThan(1);
      expect(Math.abs(rect.top - original.top)).toBeLessThan(1);
      expect(Math.abs(rect.width - original.width)).toBeLessThan(1);
      expect(Math.abs(rect.height - original.height)).toBeLessThan(1);
    }
  });
});
