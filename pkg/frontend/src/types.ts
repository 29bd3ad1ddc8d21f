/** Payload shapes of the CMS service HTTP API. The UI treats these as
 * the single source of truth and never recomputes aggregates. */

export type Phase = "P1" | "P2";

/** GET /tasks/{id}/next — phase 1: no reference field, by design. */
export interface P1View {
  task: string;
  item: string;
  phase: "P1";
  source: string;
  prediction: string;
}

/** GET /tasks/{id}/next — phase 2: reference plus the frozen phase-1 score. */
export interface P2View {
  task: string;
  item: string;
  phase: "P2";
  source: string;
  prediction: string;
  reference: string;
  t: number;
}

/** GET /tasks/{id}/next — both phases finished. */
export interface DoneView {
  task: string;
  phase: "DONE";
  done: true;
}

export type ItemView = P1View | P2View | DoneView;

export interface PhaseProgress {
  P1: number;
  P2: number;
  total: number;
}

/** GET /tasks/{id} */
export interface TaskInfo {
  task: string;
  alpha: number;
  status: "OPEN" | "CLOSED";
  annotators: string[];
  item_count: number;
  progress: Record<string, PhaseProgress>;
}

/** POST /tasks/{id}/scores request body and its echo response. */
export interface ScoreSubmission {
  annotator: string;
  item: string;
  phase: Phase;
  score: number;
}

export interface ScoreAck {
  task: string;
  item: string;
  phase: Phase;
  score: number;
}

/** GET /tasks/{id}/report */
export interface ItemReport {
  item: string;
  t_total: Record<string, number>;
  cms: number | null;
  complete: boolean;
  coverage: Record<string, { P1: boolean; P2: boolean }>;
}

export interface TaskReport {
  task: string;
  alpha: number;
  status: "OPEN" | "CLOSED";
  annotators: string[];
  items: ItemReport[];
  task_cms: number | null;
  complete: boolean;
}
