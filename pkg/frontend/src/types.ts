// Payload shapes of the review API, mirrored one-to-one. The console derives
// nothing itself: verdict status, counts and series all come from the server.

export type VerdictValue = "correct" | "incorrect";

export interface EpisodeSummary {
  episode_id: string;
  task_id: string;
  instance_id: string;
  task: string;
  steps: number;
  outcome: string;
  verdict: VerdictValue | null;
  status: "pending" | "judged";
  created_at: string;
}

export interface EpisodeList {
  episodes: EpisodeSummary[];
}

export interface WebStateView {
  kind: "simplified_markup" | "summary";
  body: string;
  source_size: number;
  screenshot_ref: string | null;
  screenshot_data?: string;
}

export interface ActionTarget {
  tag_name: string;
  attributes: Record<string, string>;
  xpath: string;
  text: string;
}

export interface ActionView {
  operation: string;
  target: ActionTarget;
  context: string;
  input_content: string | null;
}

export interface TracePair {
  step_index: number;
  state: WebStateView;
  action: ActionView;
  reason: string;
}

export interface EpisodeDetail {
  episode_id: string;
  task_id: string;
  instance_id: string;
  task: string;
  site_title: string;
  pairs: TracePair[];
  outcome: string;
  verdict: VerdictValue | null;
  status: "pending" | "judged";
  error_cause: string;
  created_at: string;
  judged_at: string;
  prompt_log: string[];
}

export interface ExperienceSummary {
  task_id: string;
  captured_at_episode: number;
  rules: string[];
  exemplars: { task: string; steps: number; episode_id: string }[];
  correct: number;
  incorrect: number;
  outcome_history: number[];
}

export interface MovingAveragePoint {
  episode: number;
  value: number;
}

export interface MovingAverageSeries {
  task_id: string;
  window: number;
  points: MovingAveragePoint[];
}

export interface VerdictResponse {
  episode_id: string;
  verdict: VerdictValue;
  experience: {
    task_id: string;
    captured_at_episode: number;
    correct: number;
    incorrect: number;
    rules: number;
  };
}
