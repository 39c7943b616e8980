/** Recorded API payloads plus a stub fetch for unit tests. */
import { Frame, Queue, Report } from "../src/types.js";

export function reportFixture(): Report {
  const locations: Report["locations"] = {};
  for (let location = 1; location <= 14; location += 1) {
    locations[String(location)] = {
      location,
      video_severity: null,
      color: "Black",
      boxplot: null,
    };
  }
  locations["3"] = {
    location: 3,
    video_severity: 4,
    color: "Red",
    boxplot: { min: 0, q1: 1, median: 2, q3: 3, max: 4 },
  };
  locations["7"] = {
    location: 7,
    video_severity: 0,
    color: "Green",
    boxplot: { min: 0, q1: 0, median: 0, q3: 0, max: 0 },
  };
  return {
    schema_version: 1,
    study_id: "study-001",
    generated_at: "2026-01-02T03:04:05Z",
    locations,
  };
}

export function frameFixture(): Frame {
  return {
    schema_version: 1,
    study_id: "study-001",
    video_id: "v1",
    frame_id: "f1",
    image: "images/f1.png",
    image_size: [64, 48],
    detections: [
      { class: "Pleura", bbox: [2, 2, 8, 8], confidence: 0.9 },
      { class: "BLines", bbox: [12, 14, 20, 26], confidence: 0.85 },
    ],
    quality: { score: 75, label: "Good", components: ["artifact", "pleura"] },
    severity: { score: 1, severity_class: 2, driving_class: "BLines" },
    effective_annotations: [],
    annotation_source: "none",
    overridden: false,
  };
}

export function queueFixture(): Queue {
  return {
    schema_version: 1,
    study_id: "study-001",
    entries: [
      {
        frame_id: "f1",
        video_id: "v1",
        reason: "LowQuality",
        enqueued_at: "2026-01-02T03:04:05Z",
        status: "Pending",
      },
      {
        frame_id: "f2",
        video_id: "v1",
        reason: "PleuraOnly",
        enqueued_at: "2026-01-02T03:04:06Z",
        status: "Reviewed",
      },
    ],
  };
}

export interface StubRoute {
  status?: number;
  payload: unknown;
}

export interface RecordedCall {
  method: string;
  path: string;
  headers: Record<string, string>;
  body: unknown;
}

/** fetch stub keyed by "METHOD /path"; records every call it serves. */
export function stubFetch(routes: Record<string, StubRoute>) {
  const calls: RecordedCall[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input), "http://stub");
    const method = init?.method ?? "GET";
    const key = `${method} ${url.pathname}`;
    calls.push({
      method,
      path: url.pathname,
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const route = routes[key];
    if (!route) {
      return new Response(
        JSON.stringify({ error: { code: "not_found", message: `no route ${key}` } }),
        { status: 404 },
      );
    }
    return new Response(JSON.stringify(route.payload), { status: route.status ?? 200 });
  }) as typeof fetch;
  return { fetchFn, calls };
}
