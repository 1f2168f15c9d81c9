/** Payload shapes of the annotation service API. */

export type Importance = "vital" | "okay";

export type AssignmentLabelValue = "support" | "partial_support" | "not_support";

export const ASSIGNMENT_LABELS: readonly AssignmentLabelValue[] = [
  "support",
  "partial_support",
  "not_support",
];

export type TaskKind = "edit_nuggets" | "create_nuggets" | "assign";

export interface TaskSummary {
  task_id: string;
  kind: TaskKind;
  topic_id: string;
  query: string;
  status: "open" | "done";
  assessor_id: string | null;
  version: number;
  run_id?: string;
}

export interface SegmentView {
  segment_id: string;
  title: string | null;
  text: string;
}

export interface NuggetView {
  text: string;
  importance: string;
}

export interface TaskPayload extends TaskSummary {
  segments: SegmentView[];
  /** Edit tasks: the over-generated draft texts awaiting review. */
  drafts?: string[];
  /** Edit/create tasks that were already finalized once. */
  saved_nuggets?: NuggetView[];
  /** Assignment tasks: the finalized nugget list to label. */
  nuggets?: NuggetView[];
  answer?: { run_id: string; text: string };
  /** Present only on completed assignment tasks. */
  saved_labels?: AssignmentLabelValue[];
}

export interface NuggetSubmission {
  text: string;
  importance: Importance;
}
