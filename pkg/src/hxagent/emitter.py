"""Turn a completed trace into a standalone, replayable test script.

The canonical form is a JSON document (task, entry, ordered steps); a
line-oriented text rendering is available for eyeballing and for pasting into
driver-based replay harnesses.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import IncompleteTraceError, UnmappableActionError
from .extractor import FeasibleAction
from .memory import OUTCOME_DONE, EpisodeTrace

SCHEMA_VERSION = 1

COMMAND_FOR_OPERATION = {"click": "click", "input": "type", "select": "select"}


@dataclass(frozen=True)
class ScriptStep:
    ordinal: int
    command: str  # open | click | type | select | assert-title
    locator: str
    argument: str | None = None

    def to_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "command": self.command,
            "locator": self.locator,
            "argument": self.argument,
        }

    @staticmethod
    def from_dict(raw: dict) -> "ScriptStep":
        return ScriptStep(
            ordinal=raw["ordinal"],
            command=raw["command"],
            locator=raw.get("locator", ""),
            argument=raw.get("argument"),
        )


@dataclass
class Script:
    task: str
    entry: str
    steps: list[ScriptStep]
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "task": self.task,
            "entry": self.entry,
            "steps": [step.to_dict() for step in self.steps],
        }

    @staticmethod
    def from_dict(raw: dict) -> "Script":
        return Script(
            task=raw["task"],
            entry=raw["entry"],
            steps=[ScriptStep.from_dict(s) for s in raw["steps"]],
            schema_version=raw.get("schema_version", SCHEMA_VERSION),
        )


def emit_step(action: FeasibleAction, ordinal: int = 1) -> ScriptStep:
    command = COMMAND_FOR_OPERATION.get(action.operation)
    if command is None:
        raise UnmappableActionError(f"operation {action.operation!r} has no script command")
    argument = action.input_content if command in ("type", "select") else None
    return ScriptStep(ordinal=ordinal, command=command, locator=action.target.xpath, argument=argument)


def emit_script(trace: EpisodeTrace, entry: str) -> Script:
    if trace.outcome != OUTCOME_DONE:
        raise IncompleteTraceError(
            f"only completed episodes become scripts (outcome is {trace.outcome!r})"
        )
    steps = [ScriptStep(ordinal=1, command="open", locator="", argument=entry)]
    for pair in trace.pairs:
        steps.append(emit_step(pair.action, ordinal=len(steps) + 1))
    return Script(task=trace.task, entry=entry, steps=steps)


def script_json(script: Script) -> str:
    return json.dumps(script.to_dict(), indent=2, ensure_ascii=False) + "\n"


def render_script_text(script: Script) -> str:
    """Line-oriented rendering: header comments, then one command per line."""
    lines = [f"# Task: {script.task}", f"# Entry: {script.entry}"]
    for step in script.steps:
        parts = [step.command]
        if step.locator:
            parts.append(step.locator)
        if step.argument is not None:
            parts.append(json.dumps(step.argument, ensure_ascii=False))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def replay_script(script: Script, env) -> None:
    """Execute every step against an environment backend. Raises on the first
    step whose execution does not succeed."""
    from .extractor import ElementDescriptor

    for step in script.steps:
        if step.command == "open":
            env.load(step.argument)
            continue
        if step.command == "assert-title":
            observation = env._observe() if hasattr(env, "_observe") else None
            title = observation.title if observation else ""
            if title != step.argument:
                raise AssertionError(f"title {title!r} != expected {step.argument!r}")
            continue
        operation = {"click": "click", "type": "input", "select": "select"}[step.command]
        action = FeasibleAction(
            operation=operation,
            target=ElementDescriptor(tag_name="", attributes={}, xpath=step.locator, text=""),
            input_content=step.argument,
        )
        result = env.execute(action)
        if not result.ok:
            raise RuntimeError(f"replay step {step.ordinal} failed: {result.status}")
