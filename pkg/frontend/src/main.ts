import { ApiError, ReviewApi } from "./api.js";
import { renderExperience } from "./experience.js";
import { renderQueue } from "./queue.js";
import { renderTrace } from "./trace.js";
import { escapeHtml } from "./render.js";

const api = new ReviewApi("");

function root(): HTMLElement {
  return document.getElementById("app")!;
}

function banner(): HTMLElement {
  return document.getElementById("banner")!;
}

function showError(error: unknown, retry: () => void): void {
  const message = error instanceof Error ? error.message : String(error);
  banner().innerHTML = `
    <div class="error-banner">
      service unreachable or request failed: ${escapeHtml(message)}
      <button id="retry">retry</button>
    </div>`;
  document.getElementById("retry")!.addEventListener("click", () => {
    banner().innerHTML = "";
    retry();
  });
}

async function showQueue(status: "pending" | "judged"): Promise<void> {
  try {
    const list = await api.listEpisodes(status);
    document.querySelectorAll(".tab").forEach((tab) => tab.classList.remove("active"));
    document.getElementById(`tab-${status}`)?.classList.add("active");
    renderQueue(root(), list.episodes, (episodeId) => {
      window.location.hash = `#/episode/${episodeId}`;
    });
  } catch (error) {
    showError(error, () => void showQueue(status));
  }
}

async function showEpisode(episodeId: string): Promise<void> {
  try {
    const detail = await api.getEpisode(episodeId);
    renderTrace(root(), detail, {
      onVerdict: async (verdict) => {
        try {
          await api.submitVerdict(episodeId, verdict);
        } catch (error) {
          if (error instanceof ApiError && error.isConflict) throw error;
          throw error;
        } finally {
          // refresh the experience panel target so the new rule/exemplar shows
          void prefetchExperience(detail.task_id);
        }
      },
    });
    const link = document.createElement("p");
    link.innerHTML = `<a href="#/experience/${encodeURIComponent(detail.task_id)}">experience bank for ${escapeHtml(detail.task_id)}</a>`;
    root().prepend(link);
  } catch (error) {
    showError(error, () => void showEpisode(episodeId));
  }
}

async function prefetchExperience(taskId: string): Promise<void> {
  try {
    await api.getExperience(taskId);
  } catch {
    // refresh is best effort; the panel refetches on navigation anyway
  }
}

async function showExperience(taskId: string): Promise<void> {
  try {
    const experience = await api.getExperience(taskId);
    let series = null;
    try {
      series = await api.getMovingAverage(taskId);
    } catch {
      series = null;
    }
    renderExperience(root(), experience, series);
  } catch (error) {
    showError(error, () => void showExperience(taskId));
  }
}

export function route(): void {
  const hash = window.location.hash || "#/pending";
  const [, view, argument] = hash.split("/");
  if (view === "episode" && argument) {
    void showEpisode(decodeURIComponent(argument));
  } else if (view === "experience" && argument) {
    void showExperience(decodeURIComponent(argument));
  } else if (view === "judged") {
    void showQueue("judged");
  } else {
    void showQueue("pending");
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
