/**
 * Frame review view: the image with detection-box overlays plus quality
 * and severity badges. Badge values are rendered verbatim from the API
 * payload; nothing is rescored in the browser.
 */
import { CLASS_COLORS } from "./palette.js";
import { boxToScreen, ViewTransform } from "./transform.js";
import { Frame, LandmarkClass } from "./types.js";

export interface FrameViewOptions {
  imageUrl: string;
  transform: ViewTransform;
  overlayToggles?: Partial<Record<LandmarkClass, boolean>>;
}

export function renderFrameView(
  container: HTMLElement,
  frame: Frame,
  options: FrameViewOptions,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const badges = doc.createElement("div");
  badges.className = "frame-badges";
  const quality = doc.createElement("span");
  quality.className = "badge quality";
  quality.dataset.score = String(frame.quality.score);
  quality.textContent = `Quality ${frame.quality.score} (${frame.quality.label})`;
  const severity = doc.createElement("span");
  severity.className = "badge severity";
  severity.dataset.severityClass = String(frame.severity.severity_class);
  severity.textContent =
    frame.severity.driving_class === null
      ? `Class ${frame.severity.severity_class}`
      : `Class ${frame.severity.severity_class} (${frame.severity.driving_class})`;
  badges.append(quality, severity);
  if (frame.overridden) {
    const flag = doc.createElement("span");
    flag.className = "badge overridden";
    flag.textContent = `overridden (${frame.annotation_source})`;
    badges.appendChild(flag);
  }

  const stage = doc.createElement("div");
  stage.className = "frame-stage";
  const image = doc.createElement("img");
  image.src = options.imageUrl;
  image.alt = frame.frame_id;
  const rect = boxToScreen(options.transform, [
    0,
    0,
    frame.image_size[0],
    frame.image_size[1],
  ]);
  image.style.left = `${rect.left}px`;
  image.style.top = `${rect.top}px`;
  image.style.width = `${rect.width}px`;
  image.style.height = `${rect.height}px`;
  stage.appendChild(image);

  for (const detection of frame.detections) {
    if (options.overlayToggles?.[detection.class] === false) continue;
    const overlay = doc.createElement("div");
    overlay.className = "overlay-box";
    overlay.dataset.class = detection.class;
    overlay.dataset.confidence = detection.confidence.toFixed(2);
    const box = boxToScreen(options.transform, detection.bbox);
    overlay.style.left = `${box.left}px`;
    overlay.style.top = `${box.top}px`;
    overlay.style.width = `${box.width}px`;
    overlay.style.height = `${box.height}px`;
    overlay.style.borderColor = CLASS_COLORS[detection.class];
    stage.appendChild(overlay);
  }

  container.append(badges, stage);
}
