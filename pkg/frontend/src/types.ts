export interface ParetoPoint {
  index: number;
  F_s: number;
  F_a: number;
}

export type JobStatus = "pending" | "running" | "done" | "failed";

export interface JobStatusPayload {
  schema: string;
  id: string;
  status: JobStatus;
  error?: string;
  pareto?: ParetoPoint[];
  midpoint_index?: number;
  manifest_digest?: string;
}

export interface ConventionEntry {
  zone: number;
  L: number;
  a: number;
  b: number;
}

export interface LabEntry {
  L: number;
  a: number;
  b: number;
}

export interface SchemeDoc {
  schema: string;
  index: number;
  coords: [number, number][];
  colors: LabEntry[];
  F_s: number;
  F_a: number;
  mode: "graded" | "continuous";
}

export interface DominantEntry extends LabEntry {
  proportion: number;
}

export interface AnalyzePayload {
  schema: string;
  grid: {
    w: number;
    cells: Array<LabEntry & { row: number; col: number; region: number }>;
    dominants: DominantEntry[];
  };
}

// Mirrors the params JSON accepted by POST /api/jobs, key for key.
export interface JobForm {
  mode: "graded" | "continuous";
  zones: number;
  k: number;
  t: number;
  gamma: number;
  alpha: number;
  aerial: boolean;
  conventions: ConventionEntry[];
  seed: number;
  grid_size: number;
  delta_min: number;
  palette_size: number;
  population: number;
  iterations: number;
}
