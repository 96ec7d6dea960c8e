// Payload shapes of the annotation service API.

export interface PatchRect {
  row: number;
  col: number;
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface SolveInfo {
  revision: number;
  stale: boolean;
  lambda: number;
  beta: number;
  unary_energy: number;
  binary_energy: number;
  residual: number;
  iterations: number;
}

export interface SessionInfo {
  session_id: string;
  revision: number;
  annotation_count: number;
  solve: SolveInfo | null;
  grid: { rows: number; cols: number };
  working: { width: number; height: number };
  image: { width: number; height: number };
  patches: PatchRect[];
}

export interface SolveResponse extends SolveInfo {
  pfm_url: string;
  png_url: string;
}

export interface AnnotationEntry {
  row: number;
  col: number;
  real_size_m: number;
  pixel_extent: number | null;
}

export interface AnnotationDoc {
  grid: { rows: number; cols: number };
  focal_length: number | null;
  annotations: AnnotationEntry[];
}
