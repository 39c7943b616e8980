/** Image-space <-> screen-space transforms for the overlay layer. */
import { Box4 } from "./types.js";

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface ScreenRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function imageToScreen(t: ViewTransform, x: number, y: number): [number, number] {
  return [x * t.scale + t.offsetX, y * t.scale + t.offsetY];
}

export function screenToImage(t: ViewTransform, x: number, y: number): [number, number] {
  return [(x - t.offsetX) / t.scale, (y - t.offsetY) / t.scale];
}

/** Contain-fit the image in a viewport, centered. */
export function fitTransform(
  imageWidth: number,
  imageHeight: number,
  viewWidth: number,
  viewHeight: number,
): ViewTransform {
  const scale = Math.min(viewWidth / imageWidth, viewHeight / imageHeight);
  return {
    scale,
    offsetX: (viewWidth - imageWidth * scale) / 2,
    offsetY: (viewHeight - imageHeight * scale) / 2,
  };
}

/** Zoom by `factor` keeping the screen point (cx, cy) fixed. */
export function zoomAt(t: ViewTransform, factor: number, cx: number, cy: number): ViewTransform {
  const scale = t.scale * factor;
  return {
    scale,
    offsetX: cx - (cx - t.offsetX) * factor,
    offsetY: cy - (cy - t.offsetY) * factor,
  };
}

export function pan(t: ViewTransform, dx: number, dy: number): ViewTransform {
  return { ...t, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}

export function boxToScreen(t: ViewTransform, box: Box4): ScreenRect {
  const [x0, y0] = imageToScreen(t, box[0], box[1]);
  const [x1, y1] = imageToScreen(t, box[2], box[3]);
  return { left: x0, top: y0, width: x1 - x0, height: y1 - y0 };
}

export function screenToBox(t: ViewTransform, rect: ScreenRect): Box4 {
  const [x0, y0] = screenToImage(t, rect.left, rect.top);
  const [x1, y1] = screenToImage(t, rect.left + rect.width, rect.top + rect.height);
  return [x0, y0, x1, y1];
}
