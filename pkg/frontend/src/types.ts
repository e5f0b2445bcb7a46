// Wire types mirrored from the review service's JSON payloads.

export type VerdictStatus = "pass" | "fail" | "not_run";

export interface EntityRef {
  subject_id: string;
  session_id: string;
  scan_id: string;
}

export interface DiagnosticRecord {
  unit: string | null;
  check_name: string;
  metrics: Record<string, number>;
  flag: "ok" | "warn" | "fail";
  details: string;
  thresholds_version: string;
}

export interface QueueItem {
  item_id: string;
  entity: EntityRef;
  node: string;
  unit: string | null;
  criteria: string[];
  assets: string[];
  diagnostics: DiagnosticRecord[];
  dependency_statuses: Record<string, VerdictStatus | null>;
  own_status: VerdictStatus | null;
  lease: { rater_id: string; expires: string } | null;
}

export interface Verdict {
  entity: EntityRef;
  node: string;
  unit: string | null;
  status: VerdictStatus;
  rater_id: string;
  timestamp: string;
  checklist: Record<string, boolean>;
  comment: string | null;
  verdict_uid: string;
}

export const CATEGORIES = [
  "both_passed",
  "dep_passed_outcome_failed",
  "dep_failed_outcome_passed",
  "both_failed",
  "pending",
] as const;
export type Category = (typeof CATEGORIES)[number];

export interface ReportGroup {
  node: string;
  unit: string | null;
  counts: Record<Category, number>;
  rated: number;
  proportions?: Record<string, number>;
}

export interface Report {
  totals: { scans: number; sessions: number; subjects: number };
  groups: ReportGroup[];
}

export interface GraphNode {
  name: string;
  deps: string[];
  units: string[];
  criteria: string[];
  checks: string[];
  artifacts: string[];
  ancestors: string[];
}

export interface GraphView {
  order: string[];
  nodes: GraphNode[];
}
