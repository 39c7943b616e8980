/** Typed fetch client for the triage service. */
import { z } from "zod";

import {
  Annotation,
  ErrorEnvelopeSchema,
  ExportManifest,
  ExportManifestSchema,
  Frame,
  FrameSchema,
  OverrideResponse,
  OverrideResponseSchema,
  Queue,
  QueueSchema,
  Report,
  ReportSchema,
  StudyList,
  StudyListSchema,
  Video,
  VideoSchema,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface OverrideBody {
  author: string;
  annotations: Annotation[];
  note?: string | null;
}

export interface ApiClient {
  listStudies(): Promise<StudyList>;
  getReport(studyId: string): Promise<Report>;
  getVideo(studyId: string, videoId: string): Promise<Video>;
  getFrame(studyId: string, frameId: string): Promise<Frame>;
  frameImageUrl(studyId: string, frameId: string): string;
  getQueue(studyId: string): Promise<Queue>;
  postOverride(studyId: string, frameId: string, body: OverrideBody): Promise<OverrideResponse>;
  postExport(studyId: string, format?: "label-text" | "xml"): Promise<ExportManifest>;
}

export interface ClientOptions {
  token?: string;
  fetchFn?: typeof fetch;
}

export function createClient(baseUrl: string, options: ClientOptions = {}): ApiClient {
  const base = baseUrl.replace(/\/+$/, "");
  const fetchFn = options.fetchFn ?? fetch;

  async function request<T>(
    schema: z.ZodType<T>,
    path: string,
    init: RequestInit = {},
  ): Promise<T> {
    const headers: Record<string, string> = { ...(init.headers as Record<string, string>) };
    if (init.body !== undefined) headers["content-type"] = "application/json";
    if (options.token) headers["authorization"] = `Bearer ${options.token}`;
    const response = await fetchFn(`${base}${path}`, { ...init, headers });
    const payload: unknown = await response.json();
    if (!response.ok) {
      const envelope = ErrorEnvelopeSchema.safeParse(payload);
      const code = envelope.success ? envelope.data.error.code : "unknown";
      const message = envelope.success ? envelope.data.error.message : response.statusText;
      throw new ApiError(response.status, code, message);
    }
    return schema.parse(payload);
  }

  const study = (id: string) => `/api/studies/${encodeURIComponent(id)}`;

  return {
    listStudies: () => request(StudyListSchema, "/api/studies"),
    getReport: (sid) => request(ReportSchema, `${study(sid)}/report`),
    getVideo: (sid, vid) =>
      request(VideoSchema, `${study(sid)}/videos/${encodeURIComponent(vid)}`),
    getFrame: (sid, fid) =>
      request(FrameSchema, `${study(sid)}/frames/${encodeURIComponent(fid)}`),
    frameImageUrl: (sid, fid) =>
      `${base}${study(sid)}/frames/${encodeURIComponent(fid)}/image`,
    getQueue: (sid) => request(QueueSchema, `${study(sid)}/queue`),
    postOverride: (sid, fid, body) =>
      request(OverrideResponseSchema, `${study(sid)}/frames/${encodeURIComponent(fid)}/override`, {
        method: "POST",
        body: JSON.stringify(body),
      }),
    postExport: (sid, format = "label-text") =>
      request(ExportManifestSchema, `${study(sid)}/export`, {
        method: "POST",
        body: JSON.stringify({ format }),
      }),
  };
}
