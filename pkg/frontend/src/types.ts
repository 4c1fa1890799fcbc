// Wire types for the /api/v1 endpoints. The client renders these
// verbatim; it never derives a number the server did not send.

export interface ApiEnvelope<P> {
  status: "ok" | "error";
  registry_digest: string;
  payload: P;
}

export interface TierDoc {
  tier: string;
  direction: string;
  glyph: string;
}

export interface LeaderboardEntry {
  rank: number;
  model: string;
  value: number;
  per_dataset: Record<string, number>;
  tier: TierDoc | null;
}

export interface LeaderboardPayload {
  metric: string;
  scope: string;
  registry_digest: string;
  value_source?: string;
  entries: LeaderboardEntry[];
}

export interface Breakdown {
  a: number;
  p: number;
  g: number;
  s: number;
  eff: number;
  u: number;
}

export interface Recommendation {
  rank: number;
  model: string;
  score: number;
  bins: { storage: string; compute: string; speed: string };
  breakdown: Breakdown | null;
}

export interface AdvisePayload {
  excluded: number;
  binding_constraint: string | null;
  entries: Recommendation[];
}

export interface DatasetCard {
  name: string;
  modality: string;
  role: string;
  class_count: number;
  scale_label: string | null;
  shape_label: string | null;
  boundary_label: string | null;
}

export interface DatasetsPayload {
  datasets: DatasetCard[];
}

export const MODALITIES = [
  "Ultrasound",
  "Dermoscopy",
  "Endoscopy",
  "Fundus",
  "Histopathology",
  "Nuclear",
  "X-Ray",
  "MRI",
  "CT",
  "OCT",
] as const;

export const STORAGE_CAPS = ["Tiny", "Small", "Medium", "Large"] as const;
export const COMPUTE_CAPS = ["Low", "Medium", "High"] as const;
export const SPEED_FLOORS = ["Slow", "Medium", "Fast"] as const;
