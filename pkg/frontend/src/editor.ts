/**
 * Override editor glue: posting the edit buffer and mapping a 422 back to
 * the offending box so the view can highlight it inline.
 */
import { ApiClient, ApiError } from "./api.js";
import { markSaved, ViewState } from "./state.js";
import { OverrideResponse } from "./types.js";

export interface SaveResult {
  state: ViewState;
  response: OverrideResponse;
}

export class OverrideRejected extends Error {
  constructor(
    readonly cause_: ApiError,
    /** Index into the edit buffer the server complained about, if stated. */
    readonly boxIndex: number | null,
  ) {
    super(cause_.message);
    this.name = "OverrideRejected";
  }
}

/** Parse "annotation N: ..." out of a validation message. */
export function offendingBoxIndex(message: string): number | null {
  const match = /annotation (\d+)/.exec(message);
  return match && match[1] !== undefined ? Number(match[1]) : null;
}

export async function saveOverride(
  api: ApiClient,
  state: ViewState,
  author: string,
  note?: string,
): Promise<SaveResult> {
  if (state.studyId === null || state.editFrameId === null) {
    throw new Error("no frame is being edited");
  }
  try {
    const response = await api.postOverride(state.studyId, state.editFrameId, {
      author,
      annotations: state.editBuffer,
      note: note ?? null,
    });
    return { state: markSaved(state), response };
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      throw new OverrideRejected(error, offendingBoxIndex(error.message));
    }
    throw error;
  }
}
