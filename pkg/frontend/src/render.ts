import type { ActionView } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** One-line human rendering of an action, matching the server's step lines. */
export function actionLine(action: ActionView): string {
  const target = action.target;
  let line = `${action.operation} on ${target.tag_name} '${target.text}' (${target.xpath})`;
  if (action.input_content !== null && action.input_content !== undefined) {
    line += ` with content '${action.input_content}'`;
  }
  return line;
}

export function outcomeBadge(outcome: string, verdict: string | null): string {
  const verdictClass = verdict === "correct" ? "ok" : verdict === "incorrect" ? "bad" : "open";
  const verdictText = verdict ?? "unjudged";
  return `<span class="badge outcome">${escapeHtml(outcome)}</span> <span class="badge ${verdictClass}">${escapeHtml(verdictText)}</span>`;
}
