"""Long-term experience: banks of judged episode traces, textual rules
extracted from failures, and the moving-average machinery that picks the
snapshot to freeze for evaluation runs.
"""
from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field

from .errors import (
    NoTrainingHistoryError,
    RuleDuplicateError,
    RuleEmptyError,
    SnapshotCorruptError,
)
from .llm import PURPOSE_RULE_EXTRACTION, CompletionRequest
from .memory import (
    VERDICT_CORRECT,
    EpisodeTrace,
    action_line,
    trace_from_dict,
    trace_to_dict,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_EXEMPLARS = 8
DEFAULT_MOVING_AVERAGE_WINDOW = 10
DEFAULT_EARLY_STOP_THRESHOLD = 0.9
RULE_RETRIES = 2


def normalize_rule_text(text: str) -> str:
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class Rule:
    text: str
    source_episode: str
    created_at: int  # episode ordinal


@dataclass(frozen=True)
class MovingAveragePoint:
    episode: int
    value: float


@dataclass
class ExperienceSnapshot:
    task_id: str = ""
    correct_traces: list[EpisodeTrace] = field(default_factory=list)
    incorrect_traces: list[EpisodeTrace] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)
    outcome_history: list[int] = field(default_factory=list)
    captured_at_episode: int = 0

    def is_empty(self) -> bool:
        return not self.correct_traces and not self.rules

    def evolve(self) -> "ExperienceSnapshot":
        """Copy-on-write successor: fresh lists, shared immutable items."""
        return ExperienceSnapshot(
            task_id=self.task_id,
            correct_traces=list(self.correct_traces),
            incorrect_traces=list(self.incorrect_traces),
            rules=list(self.rules),
            outcome_history=list(self.outcome_history),
            captured_at_episode=self.captured_at_episode,
        )


def build_rule_prompt(
    correct_traces: list[EpisodeTrace],
    incorrect_traces: list[EpisodeTrace],
    rules: list[Rule],
) -> str:
    lines = [
        "You review attempts at completing web tasks and distill lessons.",
        "",
        "# Correct attempts",
    ]
    if correct_traces:
        for index, trace in enumerate(correct_traces, start=1):
            lines.append(f"CORRECT TRIAL #{index}: Task: {trace.task}")
            for pair in trace.pairs:
                lines.append(f"STEP #{pair.step_index}: {action_line(pair.action)}")
    else:
        lines.append("(none)")
    lines.append("")
    lines.append("# Incorrect attempts")
    for index, trace in enumerate(incorrect_traces, start=1):
        lines.append(f"INCORRECT TRIAL #{index}: Task: {trace.task}")
        for pair in trace.pairs:
            lines.append(f"STEP #{pair.step_index}: {action_line(pair.action)}")
    lines.append("")
    lines.append("# Existing rules")
    if rules:
        for index, rule in enumerate(rules, start=1):
            lines.append(f"RULE #{index}: {rule.text}")
    else:
        lines.append("(none)")
    lines.append("")
    lines.append(
        "Write ONE new imperative rule, a single sentence, that would help avoid "
        "the mistake seen in the incorrect attempts. The rule must differ from "
        "every existing rule above. Respond with the rule text only."
    )
    return "\n".join(lines)


def extract_rule(
    correct_traces: list[EpisodeTrace],
    incorrect_traces: list[EpisodeTrace],
    rules: list[Rule],
    llm,
    source_episode: str = "",
    created_at: int = 0,
) -> Rule:
    """Ask the model for one novel rule. Duplicates (under normalization) and
    empty responses are retried; persistent failure raises."""
    if not incorrect_traces:
        raise ValueError("rule extraction requires at least one incorrect trace")
    existing = {normalize_rule_text(rule.text) for rule in rules}
    prompt = build_rule_prompt(correct_traces, incorrect_traces, rules)
    last_failure: str = ""
    for attempt in range(1 + RULE_RETRIES):
        request_prompt = prompt
        if attempt > 0:
            request_prompt = (
                f"{prompt}\n\nYour previous answer was rejected ({last_failure}). "
                "Provide a different, non-empty rule."
            )
        completion = llm.complete(
            CompletionRequest(prompt=request_prompt, purpose=PURPOSE_RULE_EXTRACTION)
        )
        text = completion.text.strip()
        if not text:
            last_failure = "empty rule"
            continue
        if normalize_rule_text(text) in existing:
            last_failure = "duplicate of an existing rule"
            continue
        return Rule(text=text, source_episode=source_episode, created_at=created_at)
    if last_failure == "empty rule":
        raise RuleEmptyError("rule extractor kept returning empty text")
    raise RuleDuplicateError(
        f"rule extractor kept duplicating existing rules after {RULE_RETRIES} retries"
    )


def update(snapshot: ExperienceSnapshot, trace: EpisodeTrace, rule_extractor=None) -> ExperienceSnapshot:
    """Fold one judged trace into a successor snapshot.

    Correct traces join the exemplar bank. Incorrect traces join the failure
    bank and contribute one freshly extracted rule; a rule extractor that
    cannot produce a novel rule downgrades to a warning so the episode itself
    is never lost.
    """
    if trace.verdict is None:
        raise ValueError("trace must carry a verdict before the experience update")
    successor = snapshot.evolve()
    successor.captured_at_episode = snapshot.captured_at_episode + 1
    if trace.verdict == VERDICT_CORRECT:
        successor.correct_traces.append(trace)
        successor.outcome_history.append(1)
        return successor

    successor.incorrect_traces.append(trace)
    successor.outcome_history.append(0)
    if rule_extractor is not None:
        try:
            rule = rule_extractor(
                successor.correct_traces,
                successor.incorrect_traces,
                successor.rules,
                source_episode=trace.episode_id,
                created_at=successor.captured_at_episode,
            )
            successor.rules.append(rule)
        except (RuleDuplicateError, RuleEmptyError) as exc:
            logger.warning(
                "episode %s recorded without a new rule: %s", trace.episode_id, exc
            )
    return successor


def render_experience_section(snapshot: ExperienceSnapshot, max_exemplars: int = DEFAULT_MAX_EXEMPLARS) -> str:
    """Prompt section with up to ``max_exemplars`` most recent successful
    trials followed by the extracted rules. Empty snapshot renders as an empty
    string so the main prompt degrades gracefully."""
    if max_exemplars < 0:
        raise ValueError("max_exemplars must be >= 0")
    if snapshot.is_empty():
        return ""
    lines: list[str] = []
    exemplars = snapshot.correct_traces[-max_exemplars:] if max_exemplars else []
    if exemplars:
        lines.append("# Here are the history of your trials")
        for index, trace in enumerate(exemplars, start=1):
            lines.append(f"SUCCESS TRIAL #{index}: Task: {trace.task}")
            for pair in trace.pairs:
                lines.append(f"STEP #{pair.step_index}: {action_line(pair.action)}")
            lines.append("")
    if snapshot.rules:
        lines.append("# Rules extracted from past attempts, use to evaluate your policy:")
        for index, rule in enumerate(snapshot.rules, start=1):
            lines.append(f"RULE #{index}: {rule.text}")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def moving_average(outcome_history: list[int], window: int = DEFAULT_MOVING_AVERAGE_WINDOW) -> list[MovingAveragePoint]:
    """Windowed mean of the outcome stream: point k averages the last
    ``window`` entries ending at k (fewer while the window is filling)."""
    if window < 1:
        raise ValueError("window must be >= 1")
    points = []
    for k in range(1, len(outcome_history) + 1):
        start = max(0, k - window)
        values = outcome_history[start:k]
        points.append(MovingAveragePoint(episode=k, value=sum(values) / len(values)))
    return points


def select_optimal(
    timeline: list[ExperienceSnapshot],
    window: int = DEFAULT_MOVING_AVERAGE_WINDOW,
    threshold: float = DEFAULT_EARLY_STOP_THRESHOLD,
) -> ExperienceSnapshot:
    """Pick the snapshot to freeze for evaluation.

    The earliest episode whose full-window moving average reaches the
    threshold wins; if the threshold is never reached, the episode with the
    highest moving average wins (latest such episode on ties). Episodes with
    a partially filled window qualify only when the history never grows to a
    full window at all.
    """
    if not timeline:
        raise NoTrainingHistoryError("cannot select experience from an empty timeline")
    history = timeline[-1].outcome_history
    if not history:
        raise NoTrainingHistoryError("no judged episodes in the training timeline")
    points = moving_average(history, window)
    full = [p for p in points if p.episode >= window]
    for point in full:
        if point.value >= threshold:
            return timeline[point.episode - 1]
    pool = full or points
    best = max(pool, key=lambda p: (p.value, p.episode))
    return timeline[best.episode - 1]


class ExperienceStore:
    """Single-writer holder of the per-task snapshot timeline. Readers always
    see a fully committed snapshot; verdict application is serialized here."""

    def __init__(self, task_id: str = "", llm=None):
        self.llm = llm
        self._lock = threading.Lock()
        self._timeline: list[ExperienceSnapshot] = [ExperienceSnapshot(task_id=task_id)]

    @property
    def current(self) -> ExperienceSnapshot:
        with self._lock:
            return self._timeline[-1]

    @property
    def timeline(self) -> list[ExperienceSnapshot]:
        with self._lock:
            return list(self._timeline)

    def update(self, trace: EpisodeTrace) -> ExperienceSnapshot:
        extractor = None
        if self.llm is not None:
            def extractor(correct, incorrect, rules, source_episode, created_at):
                return extract_rule(
                    correct, incorrect, rules, self.llm,
                    source_episode=source_episode, created_at=created_at,
                )
        with self._lock:
            successor = update(self._timeline[-1], trace, extractor)
            self._timeline.append(successor)
            return successor


# --- persistence -------------------------------------------------------------

SNAPSHOT_FIELDS = ("task_id", "correct_traces", "incorrect_traces", "rules", "outcome_history")


def snapshot_to_dict(snapshot: ExperienceSnapshot) -> dict:
    return {
        "task_id": snapshot.task_id,
        "correct_traces": [trace_to_dict(t) for t in snapshot.correct_traces],
        "incorrect_traces": [trace_to_dict(t) for t in snapshot.incorrect_traces],
        "rules": [
            {"text": r.text, "source_episode": r.source_episode, "created_at": r.created_at}
            for r in snapshot.rules
        ],
        "outcome_history": list(snapshot.outcome_history),
        "captured_at_episode": snapshot.captured_at_episode,
    }


def snapshot_from_dict(raw: dict) -> ExperienceSnapshot:
    for name in SNAPSHOT_FIELDS:
        if name not in raw:
            raise SnapshotCorruptError(f"snapshot lacks field {name!r}", field_path=name)
    try:
        snapshot = ExperienceSnapshot(
            task_id=raw["task_id"],
            outcome_history=[int(v) for v in raw["outcome_history"]],
            captured_at_episode=int(raw.get("captured_at_episode", 0)),
        )
        for index, item in enumerate(raw["correct_traces"]):
            try:
                snapshot.correct_traces.append(trace_from_dict(item))
            except (KeyError, TypeError) as exc:
                raise SnapshotCorruptError(
                    f"bad trace: {exc}", field_path=f"correct_traces[{index}]"
                ) from exc
        for index, item in enumerate(raw["incorrect_traces"]):
            try:
                snapshot.incorrect_traces.append(trace_from_dict(item))
            except (KeyError, TypeError) as exc:
                raise SnapshotCorruptError(
                    f"bad trace: {exc}", field_path=f"incorrect_traces[{index}]"
                ) from exc
        for index, item in enumerate(raw["rules"]):
            try:
                snapshot.rules.append(
                    Rule(
                        text=item["text"],
                        source_episode=item.get("source_episode", ""),
                        created_at=int(item.get("created_at", 0)),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise SnapshotCorruptError(f"bad rule: {exc}", field_path=f"rules[{index}]") from exc
    except SnapshotCorruptError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotCorruptError(str(exc), field_path="") from exc
    return snapshot


def save_snapshot(snapshot: ExperienceSnapshot, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as handle:
        json.dump(snapshot_to_dict(snapshot), handle, indent=2, ensure_ascii=False)
        handle.write("\n")


def load_snapshot(path: str) -> ExperienceSnapshot:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SnapshotCorruptError(f"unreadable snapshot file: {exc}", field_path="<file>") from exc
    if not isinstance(raw, dict):
        raise SnapshotCorruptError("snapshot root is not an object", field_path="<root>")
    return snapshot_from_dict(raw)
