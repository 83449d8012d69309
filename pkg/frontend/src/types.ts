// JSON document shapes of the labeling service, mirrored field for field.

export type SessionStatus = "awaiting_label" | "retraining" | "done";

export type Label = "normal" | "attack";

export interface HealthDoc {
  schema: string;
  status: string;
  datasets: string[];
  sessions: number;
}

export interface Importance {
  feature: string;
  weight: number;
}

/** Dev-split metrics snapshot; present only in replay-assist mode. */
export interface MetricsSummary {
  f1: number;
  precision: number;
  recall: number;
  tp: number;
  fp: number;
  fn: number;
  tn: number;
}

export interface QueryDoc {
  query_number: number;
  record_index: number;
  /** Decoded feature table: all 41 original columns, name -> value. */
  features: Record<string, string | number>;
  model_probability: number | null;
  strategy: string;
  strategy_score: number | null;
  queries_remaining: number;
  top_importances: Importance[] | null;
  /** Ground truth; only exposed when the session runs with replay assist. */
  true_label?: Label;
}

export interface CreateSessionRequest {
  dataset: string;
  learner?: string;
  strategy?: string;
  seed?: number;
  budget?: number;
  n_seed?: number;
  checkpoints?: number[];
  tie_tolerance?: number;
  replay_assist?: boolean;
}

export interface SessionDoc {
  schema: string;
  session_id: string;
  dataset: string;
  status: SessionStatus;
  queries_remaining: number;
  initial: MetricsSummary | null;
  query: QueryDoc | null;
}

export interface QueryStateDoc {
  schema: string;
  session_id: string;
  status: SessionStatus;
  query: QueryDoc | null;
}

export interface LabelResultDoc {
  schema: string;
  session_id: string;
  status: SessionStatus;
  recorded: {
    query_number: number;
    record_index: number;
    label: Label;
  };
  metrics: MetricsSummary | null;
  queries_remaining: number;
  query: QueryDoc | null;
}

/** One committed label in the session history (timings excluded). */
export interface EventDoc {
  query: number;
  index: number;
  score: number | null;
  label: number;
  f1: number;
  precision: number;
  recall: number;
  tp: number;
  fp: number;
  fn: number;
  tn: number;
}

export interface ZscoreDoc {
  defined: boolean;
  n_true_positives: number;
  n_mispredictions: number;
  features: string[];
  z: (number | "inf" | null)[] | null;
  mu_true_positive: (number | "inf" | null)[] | null;
  mu_mispredicted: (number | "inf" | null)[] | null;
  mu_false_positive: (number | "inf" | null)[] | null;
  mu_false_negative: (number | "inf" | null)[] | null;
}

export interface SessionMetricsDoc {
  schema: string;
  session_id: string;
  dataset: string;
  status: SessionStatus;
  learner: string;
  strategy: string;
  labels_given: number;
  queries_remaining: number;
  feature_importances: Importance[] | null;
  initial: MetricsSummary | null;
  f1_curve: [number, number][] | null;
  events: EventDoc[] | null;
  zscore: ZscoreDoc | null;
}
