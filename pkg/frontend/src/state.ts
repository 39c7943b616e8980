/**
 * View state and the override edit buffer.
 *
 * All updates are pure (state in, state out) so views re-render from a
 * single object. Edit-buffer invariants: boxes stay inside the frame's
 * image bounds, and navigation away from unsaved edits must be explicit.
 */
import { Annotation, Box4, Frame, LandmarkClass, LANDMARK_CLASSES } from "./types.js";

export type QueueFilter = "all" | "Pending" | "Reviewed" | "Exported";

export interface ViewState {
  studyId: string | null;
  videoId: string | null;
  frameId: string | null;
  overlayToggles: Record<LandmarkClass, boolean>;
  /** Frame being edited, or null when the editor is closed. */
  editFrameId: string | null;
  editImageSize: [number, number] | null;
  editBuffer: Annotation[];
  editDirty: boolean;
  queueFilter: QueueFilter;
}

export class UnsavedEditsError extends Error {
  constructor() {
    super("unsaved override edits; save or discard before navigating");
    this.name = "UnsavedEditsError";
  }
}

export function initialState(): ViewState {
  const overlayToggles = Object.fromEntries(
    LANDMARK_CLASSES.map((cls) => [cls, true]),
  ) as Record<LandmarkClass, boolean>;
  return {
    studyId: null,
    videoId: null,
    frameId: null,
    overlayToggles,
    editFrameId: null,
    editImageSize: null,
    editBuffer: [],
    editDirty: false,
    queueFilter: "all",
  };
}

export function selectFrame(
  state: ViewState,
  ids: { studyId: string; videoId: string | null; frameId: string | null },
  opts: { discardEdits?: boolean } = {},
): ViewState {
  if (state.editDirty && !opts.discardEdits) throw new UnsavedEditsError();
  return {
    ...state,
    ...ids,
    editFrameId: null,
    editImageSize: null,
    editBuffer: [],
    editDirty: false,
  };
}

export function toggleOverlay(state: ViewState, cls: LandmarkClass): ViewState {
  return {
    ...state,
    overlayToggles: { ...state.overlayToggles, [cls]: !state.overlayToggles[cls] },
  };
}

export function setQueueFilter(state: ViewState, filter: QueueFilter): ViewState {
  return { ...state, queueFilter: filter };
}

export function clampBox(box: Box4, width: number, height: number): Box4 {
  const clamp = (v: number, hi: number) => Math.min(Math.max(v, 0), hi);
  let [x0, y0, x1, y1] = [
    clamp(box[0], width),
    clamp(box[1], height),
    clamp(box[2], width),
    clamp(box[3], height),
  ];
  if (x1 < x0) [x0, x1] = [x1, x0];
  if (y1 < y0) [y0, y1] = [y1, y0];
  return [x0, y0, x1, y1];
}

/**
 * Open the editor on a frame. The buffer starts from the frame's effective
 * annotations when any exist (a prior override or ground truth), otherwise
 * from the detection boxes.
 */
export function startEditing(state: ViewState, frame: Frame): ViewState {
  if (state.editDirty) throw new UnsavedEditsError();
  const source: Annotation[] =
    frame.effective_annotations.length > 0
      ? frame.effective_annotations
      : frame.detections.map((d) => ({ class: d.class, bbox: d.bbox }));
  const [width, height] = frame.image_size;
  return {
    ...state,
    editFrameId: frame.frame_id,
    editImageSize: frame.image_size,
    editBuffer: source.map((a) => ({ class: a.class, bbox: clampBox(a.bbox, width, height) })),
    editDirty: false,
  };
}

function withBuffer(state: ViewState, buffer: Annotation[]): ViewState {
  return { ...state, editBuffer: buffer, editDirty: true };
}

function requireEditor(state: ViewState): [number, number] {
  if (state.editFrameId === null || state.editImageSize === null) {
    throw new Error("no frame is being edited");
  }
  return state.editImageSize;
}

export function addBox(state: ViewState, cls: LandmarkClass, box: Box4): ViewState {
  const [width, height] = requireEditor(state);
  return withBuffer(state, [
    ...state.editBuffer,
    { class: cls, bbox: clampBox(box, width, height) },
  ]);
}

export function moveBox(state: ViewState, index: number, box: Box4): ViewState {
  const [width, height] = requireEditor(state);
  const buffer = state.editBuffer.map((a, i) =>
    i === index ? { ...a, bbox: clampBox(box, width, height) } : a,
  );
  return withBuffer(state, buffer);
}

export function setBoxClass(state: ViewState, index: number, cls: LandmarkClass): ViewState {
  requireEditor(state);
  const buffer = state.editBuffer.map((a, i) => (i === index ? { ...a, class: cls } : a));
  return withBuffer(state, buffer);
}

export function removeBox(state: ViewState, index: number): ViewState {
  requireEditor(state);
  return withBuffer(state, state.editBuffer.filter((_, i) => i !== index));
}

/** Close the editor, discarding the buffer (Cancel). */
export function cancelEditing(state: ViewState): ViewState {
  return { ...state, editFrameId: null, editImageSize: null, editBuffer: [], editDirty: false };
}

/** Close the editor after a successful save. */
export function markSaved(state: ViewState): ViewState {
  return cancelEditing(state);
}
