// @vitest-environment happy-dom
import { describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import { renderTrace } from "../src/trace.js";
import { detail } from "./fixtures.js";

function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("trace view", () => {
  it("renders step cards in server order with action lines and verbatim reasons", () => {
    const root = mount();
    renderTrace(root, detail(), { onVerdict: async () => {} });
    const cards = root.querySelectorAll(".step-card");
    expect(cards).toHaveLength(2);
    expect(cards[0].querySelector("h3")!.textContent).toBe("Step 1");
    expect(cards[0].querySelector(".action")!.textContent).toBe(
      "input on input '' (html/body/div[1]/input[1]) with content 'test'",
    );
    expect(cards[0].querySelector(".reason")!.textContent).toContain("the task names this username");
    expect(cards[1].querySelector(".action")!.textContent).toBe(
      "click on button 'Login' (html/body/div[1]/button[1])",
    );
  });

  it("renders markup states as pre blocks and summary states as prose with screenshots", () => {
    const root = mount();
    renderTrace(root, detail(), { onVerdict: async () => {} });
    const cards = root.querySelectorAll(".step-card");
    expect(cards[0].querySelector("pre.state-markup")).not.toBeNull();
    expect(cards[0].querySelector("img.screenshot")).toBeNull();
    expect(cards[1].querySelector("p.state-summary")).not.toBeNull();
    const image = cards[1].querySelector("img.screenshot") as HTMLImageElement;
    expect(image).not.toBeNull();
    expect(image.getAttribute("src")).toBe("data:image/png;base64,aGk=");
  });

  it("escapes markup bodies rather than injecting them", () => {
    const root = mount();
    renderTrace(root, detail(), { onVerdict: async () => {} });
    expect(root.querySelector('input[id="username"]')).toBeNull();
    expect(root.querySelector("pre.state-markup")!.textContent).toContain('<input xpath=');
  });

  it("submits a verdict once even when double-clicked", async () => {
    const root = mount();
    let resolveFirst: () => void = () => {};
    const onVerdict = vi.fn().mockImplementation(
      () => new Promise<void>((resolve) => { resolveFirst = resolve; }),
    );
    renderTrace(root, detail(), { onVerdict });
    const button = root.querySelector("#verdict-correct") as HTMLButtonElement;
    button.click();
    button.click(); // second click while the first is in flight
    resolveFirst();
    await flush();
    expect(onVerdict).toHaveBeenCalledTimes(1);
    expect(root.querySelector("#verdict-notice")!.textContent).toBe("recorded: correct");
  });

  it("keeps buttons disabled after a conflict and shows a non-destructive notice", async () => {
    const root = mount();
    const onVerdict = vi.fn().mockRejectedValue(new ApiError(409, "episode already judged"));
    renderTrace(root, detail(), { onVerdict });
    const correct = root.querySelector("#verdict-correct") as HTMLButtonElement;
    correct.click();
    await flush();
    expect(root.querySelector("#verdict-notice")!.textContent).toContain("already judged");
    expect(correct.disabled).toBe(true);
    expect(root.querySelectorAll(".step-card")).toHaveLength(2); // trace untouched
  });

  it("re-enables buttons after a transient failure", async () => {
    const root = mount();
    const onVerdict = vi.fn().mockRejectedValue(new ApiError(503, "service unavailable"));
    renderTrace(root, detail(), { onVerdict });
    const incorrect = root.querySelector("#verdict-incorrect") as HTMLButtonElement;
    incorrect.click();
    await flush();
    expect(incorrect.disabled).toBe(false);
  });

  it("disables verdict buttons for already judged episodes", () => {
    const root = mount();
    renderTrace(root, detail({ verdict: "correct", status: "judged" }), { onVerdict: async () => {} });
    expect((root.querySelector("#verdict-correct") as HTMLButtonElement).disabled).toBe(true);
    expect((root.querySelector("#verdict-incorrect") as HTMLButtonElement).disabled).toBe(true);
  });
});
