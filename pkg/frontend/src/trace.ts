import { actionLine, escapeHtml, outcomeBadge } from "./render.js";
import type { EpisodeDetail, TracePair, VerdictValue } from "./types.js";

export interface TraceCallbacks {
  onVerdict: (verdict: VerdictValue) => Promise<void>;
}

function stateBlock(pair: TracePair): string {
  const state = pair.state;
  const body =
    state.kind === "summary"
      ? `<p class="state-summary">${escapeHtml(state.body)}</p>`
      : `<pre class="state-markup">${escapeHtml(state.body)}</pre>`;
  const screenshot = state.screenshot_data
    ? `<img class="screenshot" alt="step ${pair.step_index} screenshot" src="${state.screenshot_data}"/>`
    : "";
  return body + screenshot;
}

/** Step cards in server order: state, screenshot when present, the action
 * line, and the model's reason verbatim. */
export function renderTrace(root: HTMLElement, detail: EpisodeDetail, callbacks: TraceCallbacks): void {
  const cards = detail.pairs
    .map(
      (pair) => `
      <section class="step-card">
        <h3>Step ${pair.step_index}</h3>
        ${stateBlock(pair)}
        <p class="action mono">${escapeHtml(actionLine(pair.action))}</p>
        ${pair.reason ? `<p class="reason"><span class="label">reason</span> ${escapeHtml(pair.reason)}</p>` : ""}
      </section>`,
    )
    .join("");

  const judged = detail.verdict !== null;
  root.innerHTML = `
    <header class="episode-header">
      <h2 class="mono">${escapeHtml(detail.episode_id)}</h2>
      <p class="task">${escapeHtml(detail.task)}</p>
      <p>${outcomeBadge(detail.outcome, detail.verdict)}${
        detail.error_cause ? ` <span class="badge bad">${escapeHtml(detail.error_cause)}</span>` : ""
      }</p>
    </header>
    <div class="verdict-bar">
      <button id="verdict-correct" ${judged ? "disabled" : ""}>mark correct</button>
      <button id="verdict-incorrect" ${judged ? "disabled" : ""}>mark incorrect</button>
      <span id="verdict-notice" class="notice" role="status"></span>
    </div>
    <div class="steps">${cards.length ? cards : '<p class="empty-state">No steps were taken.</p>'}</div>`;

  const correct = root.querySelector<HTMLButtonElement>("#verdict-correct")!;
  const incorrect = root.querySelector<HTMLButtonElement>("#verdict-incorrect")!;
  const notice = root.querySelector<HTMLElement>("#verdict-notice")!;

  let inFlight = false;
  const submit = async (verdict: VerdictValue) => {
    if (inFlight) return; // double-click guard: one state change per episode
    inFlight = true;
    correct.disabled = true;
    incorrect.disabled = true;
    try {
      await callbacks.onVerdict(verdict);
      notice.textContent = `recorded: ${verdict}`;
    } catch (error) {
      notice.textContent = error instanceof Error ? error.message : String(error);
      const conflicted = (error as { isConflict?: boolean }).isConflict === true;
      if (!conflicted) {
        // transient failure: allow another attempt
        correct.disabled = false;
        incorrect.disabled = false;
      }
    } finally {
      inFlight = false;
    }
  };

  correct.addEventListener("click", () => void submit("correct"));
  incorrect.addEventListener("click", () => void submit("incorrect"));
}
