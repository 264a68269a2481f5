// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { renderExperience } from "../src/experience.js";
import { experience, series } from "./fixtures.js";

function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

describe("experience panel", () => {
  it("lists rules and exemplars from the payload", () => {
    const root = mount();
    renderExperience(root, experience(), series([{ episode: 1, value: 1 }]));
    expect(root.textContent).toContain("RULE #1");
    expect(root.textContent).toContain("Verify the element text before clicking.");
    expect(root.textContent).toContain("2 correct / 1 incorrect over 3 judged episodes");
    expect(root.querySelectorAll(".exemplars li")).toHaveLength(1);
  });

  it("charts the series point-for-point", () => {
    const points = [
      { episode: 1, value: 1 },
      { episode: 2, value: 0.5 },
      { episode: 10, value: 0.5 },
    ];
    const root = mount();
    renderExperience(root, experience(), series(points));
    const chart = root.querySelector("#chart")!;
    expect(chart.querySelectorAll("circle")).toHaveLength(points.length);
    expect(chart.textContent).toContain("episode 10: 0.5");
    expect(chart.innerHTML).toContain("window 10");
  });

  it("shows the empty state without any judged episodes", () => {
    const root = mount();
    renderExperience(root, experience({ outcome_history: [], rules: [], exemplars: [] }), null);
    expect(root.textContent).toContain("No judged episodes yet.");
  });
});
