"""Prompt construction for every model call the planner makes."""
from __future__ import annotations

from .extractor import DONE_CANDIDATE_TEXT, FeasibleAction, action_wire_json
from .memory import action_line

MAIN_HEADER = (
    "You are a web assistant helping a tester complete a task on a website. "
    "You will complete the task by taking a series of steps. Each step is a "
    "description of the action you take and the specific item, entity, or "
    "element on the website that the action is applied to."
)

DECISION_FORMAT = (
    "# The format of the JSON response must strictly follow these rules:\n"
    "{\n"
    '  "chosen_action": ... (the index of the potential action that you choose)\n'
    '  "action_description": ... (a string describing the action you choose)\n'
    '  "reason": ... (a string describing the reason why you choose the action)\n'
    "}"
)


def render_candidates(candidates: list[FeasibleAction], include_done: bool = True) -> str:
    lines = [
        f"POSSIBLE NEXT ACTION #{index}: {action_wire_json(action)}"
        for index, action in enumerate(candidates, start=1)
    ]
    if include_done:
        lines.append(f"POSSIBLE NEXT ACTION #{len(candidates) + 1}: {DONE_CANDIDATE_TEXT}")
    return "\n".join(lines)


def build_main_prompt(
    state_text: str,
    candidates: list[FeasibleAction],
    memory_section: str,
    experience_section: str,
) -> str:
    parts = [MAIN_HEADER]
    if experience_section:
        parts.append(experience_section)
    parts.append("# Here is the actual task.\n" + memory_section)
    parts.append(
        f"After completing the above steps, you reach a state: {state_text}\n"
        "where the following feasible steps exist:\n"
        + render_candidates(candidates)
    )
    parts.append(
        "Your job is to choose the most possible next step to help you complete "
        "the task. Respond with a single JSON object.\n\n" + DECISION_FORMAT
    )
    return "\n\n".join(parts)


def build_disambiguation_prompt(
    pool: list[FeasibleAction],
    memory_section: str,
    experience_section: str,
) -> str:
    numbered = "\n".join(
        f"POSSIBLE NEXT ACTION #{index}: {action_wire_json(action)}"
        for index, action in enumerate(pool, start=1)
    )
    parts = [
        "You are a web assistant. Several feasible actions on this page look "
        "identical in text form; they differ only in their position in the "
        "page, given by their xpath. Use the attached screenshot of the page "
        "to decide which one matches the task.",
    ]
    if experience_section:
        parts.append(experience_section)
    parts.append("# Here is the actual task.\n" + memory_section)
    parts.append("The ambiguous candidates are:\n" + numbered)
    parts.append(
        "Choose the candidate that is the correct one to act on next. "
        "Respond with a single JSON object.\n\n" + DECISION_FORMAT
    )
    return "\n\n".join(parts)


def build_input_content_prompt(
    target: FeasibleAction,
    memory_section: str,
    experience_section: str,
) -> str:
    parts = [
        "You are a web assistant filling in a form field while completing a task.",
    ]
    if experience_section:
        parts.append(experience_section)
    parts.append("# Here is the actual task.\n" + memory_section)
    field_lines = [f"Target field: {action_line(target)}"]
    if target.context:
        field_lines.append(f"Field context: {target.context}")
    parts.append("\n".join(field_lines))
    parts.append(
        "Respond with only the exact text to enter into this field (for a "
        "dropdown, the option to pick). Do not add quotes or explanations."
    )
    return "\n\n".join(parts)


def build_summary_prompt() -> str:
    return (
        "Describe the key contents of the attached webpage screenshot in a few "
        "short sentences of plain prose: what the page shows, the main items or "
        "results visible, and any navigation or form areas. Mention exact texts "
        "of links, buttons and headings where visible. Do not use markup."
    )
