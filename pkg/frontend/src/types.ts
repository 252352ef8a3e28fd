/** Payload shapes of the review-service HTTP API (mirrored, never mutated). */

export interface TaskView {
  task_id: string;
  pair_id: string;
  question: string;
  cypher: string;
  schema_snippet: string;
  result_preview: string[];
  show_diagnostics: boolean;
  diagnostics?: {
    verdicts?: Record<string, string>;
    diagnostics?: Record<string, string>;
  };
}

export interface NextTaskResponse {
  task: TaskView | null;
}

export interface DecisionResponse {
  pair_id: string;
  outcome: string;
  decisions: number;
}

export interface PairDecision {
  reviewer: string;
  decision: string;
}

export interface PairDetail {
  pair: Record<string, unknown>;
  outcome: string;
  decisions: PairDecision[];
}

export interface ReviewerStats {
  decided: number;
  pending: number;
}

export interface Stats {
  outcomes: Record<string, number>;
  reviewers: Record<string, ReviewerStats>;
  pairs: number;
}

export type Decision = "accept" | "reject";
