"""Short-term episode memory: the task plus the ordered history of
(state, action) pairs, rendered as a prompt section."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyTaskError, TraceClosedError
from .extractor import ElementDescriptor, FeasibleAction, WebState

OUTCOME_RUNNING = "running"
OUTCOME_DONE = "done"
OUTCOME_STEP_LIMIT = "step_limit"
OUTCOME_ERROR = "error"

VERDICT_CORRECT = "correct"
VERDICT_INCORRECT = "incorrect"

WINDOW_ALL = "all"

MODE_FULL = "full"
MODE_ACTIONS_ONLY = "actions_only"


@dataclass
class StateActionPair:
    state: WebState
    action: FeasibleAction
    step_index: int
    reason: str = ""  # the model's stated reason for choosing this action


@dataclass
class EpisodeTrace:
    task: str
    site_title: str
    pairs: list[StateActionPair] = field(default_factory=list)
    outcome: str = OUTCOME_RUNNING
    verdict: str | None = None
    episode_id: str = ""
    error_cause: str = ""
    created_at: str = ""
    judged_at: str = ""

    def close(self, outcome: str, error_cause: str = "") -> None:
        self.outcome = outcome
        self.error_cause = error_cause


def new_trace(task: str, site_title: str, episode_id: str = "", created_at: str = "") -> EpisodeTrace:
    if not task:
        raise EmptyTaskError("a trace needs a non-empty task description")
    return EpisodeTrace(task=task, site_title=site_title, episode_id=episode_id, created_at=created_at)


def append(trace: EpisodeTrace, state: WebState, action: FeasibleAction, reason: str = "") -> EpisodeTrace:
    if trace.outcome != OUTCOME_RUNNING:
        raise TraceClosedError(f"cannot append to a trace with outcome {trace.outcome!r}")
    trace.pairs.append(
        StateActionPair(state=state, action=action, step_index=len(trace.pairs) + 1, reason=reason)
    )
    return trace


def action_line(action: FeasibleAction) -> str:
    """One-line action rendering used in memory blocks, experience exemplars
    and any human-facing step listing."""
    target = action.target
    line = f"{action.operation} on {target.tag_name} '{target.text}' ({target.xpath})"
    if action.input_content is not None:
        line += f" with content '{action.input_content}'"
    return line


def render_memory_section(
    trace: EpisodeTrace, window: int | str = WINDOW_ALL, mode: str = MODE_FULL
) -> str:
    """Prompt section: title and task lines, then one STATE/STEP block per
    remembered pair. With a finite window only the most recent pairs appear,
    renumbered locally from 1."""
    pairs = trace.pairs
    if window != WINDOW_ALL:
        if not isinstance(window, int) or window < 1:
            raise ValueError(f"window must be 'all' or a positive integer, got {window!r}")
        pairs = pairs[-window:]

    lines = [
        f"You are visiting the website title: {trace.site_title}",
        f"You are asked to complete the following task: {trace.task}",
        "",
        "You have completed the following steps:",
    ]
    for local_index, pair in enumerate(pairs, start=1):
        if mode == MODE_FULL:
            lines.append(f"> STATE #{local_index}: {pair.state.body}")
        lines.append(f"> STEP #{local_index}: {action_line(pair.action)}")
        lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


# --- persistence -------------------------------------------------------------
# One JSON document per episode; consumed by the review service and evaluator.

def state_to_dict(state: WebState) -> dict:
    return {
        "kind": state.kind,
        "body": state.body,
        "source_size": state.source_size,
        "screenshot_ref": state.screenshot_ref,
    }


def state_from_dict(raw: dict) -> WebState:
    return WebState(
        kind=raw["kind"],
        body=raw["body"],
        source_size=raw["source_size"],
        screenshot_ref=raw.get("screenshot_ref"),
    )


def action_to_dict(action: FeasibleAction) -> dict:
    return {
        "operation": action.operation,
        "target": {
            "tag_name": action.target.tag_name,
            "attributes": dict(action.target.attributes),
            "xpath": action.target.xpath,
            "text": action.target.text,
        },
        "context": action.context,
        "input_content": action.input_content,
    }


def action_from_dict(raw: dict) -> FeasibleAction:
    target = raw["target"]
    return FeasibleAction(
        operation=raw["operation"],
        target=ElementDescriptor(
            tag_name=target["tag_name"],
            attributes=dict(target["attributes"]),
            xpath=target["xpath"],
            text=target["text"],
        ),
        context=raw.get("context", ""),
        input_content=raw.get("input_content"),
    )


def trace_to_dict(trace: EpisodeTrace) -> dict:
    return {
        "episode_id": trace.episode_id,
        "task": trace.task,
        "site_title": trace.site_title,
        "pairs": [
            {
                "step_index": pair.step_index,
                "state": state_to_dict(pair.state),
                "action": action_to_dict(pair.action),
                "reason": pair.reason,
            }
            for pair in trace.pairs
        ],
        "outcome": trace.outcome,
        "verdict": trace.verdict,
        "error_cause": trace.error_cause,
        "created_at": trace.created_at,
        "judged_at": trace.judged_at,
    }


def trace_from_dict(raw: dict) -> EpisodeTrace:
    trace = EpisodeTrace(
        task=raw["task"],
        site_title=raw["site_title"],
        outcome=raw["outcome"],
        verdict=raw.get("verdict"),
        episode_id=raw.get("episode_id", ""),
        error_cause=raw.get("error_cause", ""),
        created_at=raw.get("created_at", ""),
        judged_at=raw.get("judged_at", ""),
    )
    for pair in raw["pairs"]:
        trace.pairs.append(
            StateActionPair(
                state=state_from_dict(pair["state"]),
                action=action_from_dict(pair["action"]),
                step_index=pair["step_index"],
                reason=pair.get("reason", ""),
            )
        )
    return trace
