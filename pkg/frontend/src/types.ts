/**
 * API payload types, as zod schemas so responses are validated at the
 * boundary. The UI treats every score in these payloads as authoritative
 * and never recomputes quality or severity client-side.
 */
import { z } from "zod";

export const LANDMARK_CLASSES = [
  "ALines",
  "AirBronchogram",
  "BLines",
  "BPatch",
  "Consolidation",
  "Pleura",
  "Rib",
  "Shadow",
] as const;

export const LandmarkClassSchema = z.enum(LANDMARK_CLASSES);
export type LandmarkClass = z.infer<typeof LandmarkClassSchema>;

export const REPORT_COLORS = [
  "Green",
  "YellowGreen",
  "Yellow",
  "Orange",
  "Red",
  "Black",
] as const;

export const ReportColorSchema = z.enum(REPORT_COLORS);
export type ReportColor = z.infer<typeof ReportColorSchema>;

/** Presentation hex per report color; identical to the service's SVG output. */
export const COLOR_HEX: Record<ReportColor, string> = {
  Green: "#2ca02c",
  YellowGreen: "#9acd32",
  Yellow: "#ffd700",
  Orange: "#ff8c00",
  Red: "#d62728",
  Black: "#000000",
};

export const Box4Schema = z.tuple([z.number(), z.number(), z.number(), z.number()]);
export type Box4 = z.infer<typeof Box4Schema>;

export const StudySummarySchema = z.object({
  study_id: z.string(),
  probe_type: z.string(),
  video_count: z.number().int(),
  frame_count: z.number().int(),
  pending_reviews: z.number().int(),
});

export const StudyListSchema = z.object({
  schema_version: z.literal(1),
  studies: z.array(StudySummarySchema),
});
export type StudyList = z.infer<typeof StudyListSchema>;

export const BoxplotSchema = z.object({
  min: z.number(),
  q1: z.number(),
  median: z.number(),
  q3: z.number(),
  max: z.number(),
});

export const LocationResultSchema = z.object({
  location: z.number().int().min(1).max(14),
  video_severity: z.number().int().nullable(),
  color: ReportColorSchema,
  boxplot: BoxplotSchema.nullable(),
});
export type LocationResult = z.infer<typeof LocationResultSchema>;

export const ReportSchema = z.object({
  schema_version: z.literal(1),
  study_id: z.string(),
  generated_at: z.string().nullable(),
  locations: z.record(z.string(), LocationResultSchema),
});
export type Report = z.infer<typeof ReportSchema>;

export const FrameScoreSchema = z.object({
  frame_id: z.string(),
  severity_score: z.number().int(),
  severity_class: z.number().int(),
  quality_score: z.number().int(),
  quality_label: z.string(),
  overridden: z.boolean(),
});
export type FrameScore = z.infer<typeof FrameScoreSchema>;

export const VideoSchema = z.object({
  schema_version: z.literal(1),
  study_id: z.string(),
  video_id: z.string(),
  scan_location: z.number().int().nullable(),
  fps: z.number(),
  video_severity: z.number().int(),
  diagnosis: z.enum(["Abnormal", "Normal", "Undetected"]),
  worst_frame_id: z.string().nullable(),
  summary_frame_ids: z.array(z.string()),
  frames: z.array(FrameScoreSchema),
});
export type Video = z.infer<typeof VideoSchema>;

export const DetectionSchema = z.object({
  class: LandmarkClassSchema,
  bbox: Box4Schema,
  confidence: z.number(),
});
export type Detection = z.infer<typeof DetectionSchema>;

export const AnnotationSchema = z.object({
  class: LandmarkClassSchema,
  bbox: Box4Schema,
});
export type Annotation = z.infer<typeof AnnotationSchema>;

export const QualitySchema = z.object({
  score: z.number().int(),
  label: z.string(),
  components: z.array(z.string()).optional(),
});

export const SeveritySchema = z.object({
  score: z.number().int(),
  severity_class: z.number().int(),
  driving_class: LandmarkClassSchema.nullable(),
});

export const FrameSchema = z.object({
  schema_version: z.literal(1),
  study_id: z.string(),
  video_id: z.string(),
  frame_id: z.string(),
  image: z.string(),
  image_size: z.tuple([z.number().int(), z.number().int()]),
  detections: z.array(DetectionSchema),
  quality: QualitySchema,
  severity: SeveritySchema,
  effective_annotations: z.array(AnnotationSchema),
  annotation_source: z.enum(["override", "ground-truth", "none"]),
  overridden: z.boolean(),
});
export type Frame = z.infer<typeof FrameSchema>;

export const QueueEntrySchema = z.object({
  frame_id: z.string(),
  video_id: z.string(),
  reason: z.enum(["PleuraOnly", "LowQuality"]),
  enqueued_at: z.string(),
  status: z.enum(["Pending", "Reviewed", "Exported"]),
});
export type QueueEntry = z.infer<typeof QueueEntrySchema>;

export const QueueSchema = z.object({
  schema_version: z.literal(1),
  study_id: z.string(),
  entries: z.array(QueueEntrySchema),
});
export type Queue = z.infer<typeof QueueSchema>;

export const OverrideResponseSchema = z.object({
  schema_version: z.literal(1),
  record: z.object({
    frame_id: z.string(),
    author: z.string(),
    created_at: z.string(),
    annotations: z.array(AnnotationSchema),
    note: z.string().nullable(),
  }),
  quality: QualitySchema,
  severity: SeveritySchema,
  queue_status: z.enum(["Pending", "Reviewed", "Exported"]).nullable(),
});
export type OverrideResponse = z.infer<typeof OverrideResponseSchema>;

export const ExportManifestSchema = z.object({
  schema_version: z.literal(1),
  export_id: z.string(),
  study_id: z.string(),
  exported_at: z.string(),
  format: z.string(),
  frames: z.array(
    z.object({
      frame_id: z.string(),
      image: z.string().nullable(),
      label_file: z.string(),
    }),
  ),
  class_counts: z.record(z.string(), z.number().int()),
});
export type ExportManifest = z.infer<typeof ExportManifestSchema>;

export const ErrorEnvelopeSchema = z.object({
  error: z.object({ code: z.string(), message: z.string() }),
});
