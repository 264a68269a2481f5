import { movingAverageSvg } from "./chart.js";
import { escapeHtml } from "./render.js";
import type { ExperienceSummary, MovingAverageSeries } from "./types.js";

export function renderExperience(
  root: HTMLElement,
  experience: ExperienceSummary,
  series: MovingAverageSeries | null,
): void {
  const exemplars = experience.exemplars
    .map(
      (exemplar) => `
      <li><span class="mono">${escapeHtml(exemplar.episode_id)}</span>
          ${escapeHtml(exemplar.task)} <span class="num">(${exemplar.steps} steps)</span></li>`,
    )
    .join("");
  const rules = experience.rules
    .map((rule, index) => `<li><span class="label">RULE #${index + 1}</span> ${escapeHtml(rule)}</li>`)
    .join("");
  const chart =
    series && series.points.length
      ? `<h3>Moving average (window ${series.window})</h3>${movingAverageSvg(series.points)}`
      : `<p class="empty-state">No judged episodes yet.</p>`;

  root.innerHTML = `
    <header class="episode-header">
      <h2>Experience: <span class="mono">${escapeHtml(experience.task_id)}</span></h2>
      <p>${experience.correct} correct / ${experience.incorrect} incorrect over ${experience.outcome_history.length} judged episodes</p>
    </header>
    <section>
      <h3>Success exemplars (${experience.exemplars.length} shown)</h3>
      <ul class="exemplars">${exemplars || "<li class='empty-state'>none yet</li>"}</ul>
    </section>
    <section>
      <h3>Rules from past attempts (${experience.rules.length})</h3>
      <ol class="rules">${rules || "<li class='empty-state'>none yet</li>"}</ol>
    </section>
    <section id="chart">${chart}</section>`;
}
