import type { EpisodeDetail, EpisodeSummary, ExperienceSummary, MovingAverageSeries } from "../src/types.js";

export function summary(overrides: Partial<EpisodeSummary> = {}): EpisodeSummary {
  return {
    episode_id: "demo-task-train-e001",
    task_id: "demo-task",
    instance_id: "i01",
    task: "Login with the username 'test' and the password '123'.",
    steps: 3,
    outcome: "done",
    verdict: null,
    status: "pending",
    created_at: "2000-01-01T00:00:00+00:00",
    ...overrides,
  };
}

export function detail(overrides: Partial<EpisodeDetail> = {}): EpisodeDetail {
  return {
    episode_id: "demo-task-train-e001",
    task_id: "demo-task",
    instance_id: "i01",
    task: "Login with the username 'test' and the password '123'.",
    site_title: "login form",
    pairs: [
      {
        step_index: 1,
        state: {
          kind: "simplified_markup",
          body: '<input xpath="html/body/div[1]/input[1]" id="username"></input>',
          source_size: 420,
          screenshot_ref: null,
        },
        action: {
          operation: "input",
          target: {
            tag_name: "input",
            attributes: { id: "username" },
            xpath: "html/body/div[1]/input[1]",
            text: "",
          },
          context: "Username",
          input_content: "test",
        },
        reason: "the task names this username",
      },
      {
        step_index: 2,
        state: {
          kind: "summary",
          body: "A login form with two fields and a Login button.",
          source_size: 64000,
          screenshot_ref: "screenshots/demo-task-train-e001-01.png",
          screenshot_data: "data:image/png;base64,aGk=",
        },
        action: {
          operation: "click",
          target: {
            tag_name: "button",
            attributes: { id: "login" },
            xpath: "html/body/div[1]/button[1]",
            text: "Login",
          },
          context: "Login",
          input_content: null,
        },
        reason: "submit the credentials",
      },
    ],
    outcome: "done",
    verdict: null,
    status: "pending",
    error_cause: "",
    created_at: "2000-01-01T00:00:00+00:00",
    judged_at: "",
    prompt_log: [],
    ...overrides,
  };
}

export function experience(overrides: Partial<ExperienceSummary> = {}): ExperienceSummary {
  return {
    task_id: "demo-task",
    captured_at_episode: 3,
    rules: ["Verify the element text before clicking."],
    exemplars: [{ task: "Login with the username 'test'.", steps: 3, episode_id: "e1" }],
    correct: 2,
    incorrect: 1,
    outcome_history: [1, 0, 1],
    ...overrides,
  };
}

export function series(points: { episode: number; value: number }[]): MovingAverageSeries {
  return { task_id: "demo-task", window: 10, points };
}
