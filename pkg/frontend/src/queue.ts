import { escapeHtml, outcomeBadge } from "./render.js";
import type { EpisodeSummary } from "./types.js";

/** Render the episode queue, newest first as delivered by the server. */
export function renderQueue(
  root: HTMLElement,
  episodes: EpisodeSummary[],
  onOpen: (episodeId: string) => void,
): void {
  if (episodes.length === 0) {
    root.innerHTML = `<p class="empty-state">No episodes waiting for review.</p>`;
    return;
  }
  const rows = episodes
    .map(
      (episode) => `
      <tr data-episode="${escapeHtml(episode.episode_id)}">
        <td class="mono">${escapeHtml(episode.episode_id)}</td>
        <td>${escapeHtml(episode.task)}</td>
        <td class="num">${episode.steps}</td>
        <td>${outcomeBadge(episode.outcome, episode.verdict)}</td>
        <td class="mono">${escapeHtml(episode.created_at)}</td>
      </tr>`,
    )
    .join("");
  root.innerHTML = `
    <table class="queue">
      <thead><tr><th>episode</th><th>task</th><th>steps</th><th>status</th><th>created</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
  root.querySelectorAll<HTMLTableRowElement>("tbody tr").forEach((row) => {
    row.addEventListener("click", () => onOpen(row.dataset.episode ?? ""));
  });
}
