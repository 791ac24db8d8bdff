/** Payload shapes of the assessment service JSON API. */

export interface TopicSummary {
  topic_id: string;
  query_latex: string;
  complexity: string;
  items: number;
}

export interface Task {
  done: false;
  topic_id: string;
  query_latex: string;
  item_id: string;
  item_latex: string;
  context_doc_id: string | null;
  context: string | null;
  instances_in_cluster: number;
  judged: number;
  total: number;
}

export interface DoneMarker {
  done: true;
  judged: number;
  total: number;
}

export type NextResponse = Task | DoneMarker;

export interface JudgmentEvent {
  topic_id: string;
  item_id: string;
  assessor: string;
  grade: number;
}

export interface Ack {
  status: "ok";
  seq: number;
}

export interface Progress {
  total: number;
  by_assessor: Record<string, number>;
  by_topic: Record<string, { total: number; by_assessor: Record<string, number> }>;
}
