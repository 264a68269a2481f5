"""Sequence evaluation metrics.

An action is correct when its operation and its target element agree with the
reference (xpath when the reference pins one, normalized text otherwise), and,
for content-checked input actions, the typed content matches up to surrounding
whitespace. Instance correctness is whole-sequence equality; prefix accuracy
is the fraction of the reference matched before the first error.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

from .dom import normalize_text
from .errors import NoResultsError
from .extractor import FeasibleAction

PER_STEP_MAX = 20


@dataclass(frozen=True)
class ReferenceAction:
    operation: str
    xpath: str = ""
    text: str = ""
    input_content: str | None = None
    content_exact: bool = True

    def to_dict(self) -> dict:
        return {
            "operation": self.operation,
            "xpath": self.xpath,
            "text": self.text,
            "input_content": self.input_content,
            "content_exact": self.content_exact,
        }

    @staticmethod
    def from_dict(raw: dict) -> "ReferenceAction":
        return ReferenceAction(
            operation=raw["operation"],
            xpath=raw.get("xpath", ""),
            text=raw.get("text", ""),
            input_content=raw.get("input_content"),
            content_exact=bool(raw.get("content_exact", True)),
        )


@dataclass
class GroundTruth:
    task_instance_id: str
    actions: list[ReferenceAction]


@dataclass
class InstanceResult:
    instance_id: str
    predicted: list[FeasibleAction]
    truth: list[ReferenceAction]
    task_id: str = ""

    @property
    def correct(self) -> bool:
        if len(self.predicted) != len(self.truth):
            return False
        return all(action_equal(p, t) for p, t in zip(self.predicted, self.truth))

    @property
    def prefix(self) -> float:
        return prefix_accuracy(self.predicted, self.truth)


@dataclass
class MetricsReport:
    exact_match_pct: float
    prefix_match_pct: float
    per_step_accuracy: list[tuple[int, float, int]]  # (step, accuracy, instances at step)
    counts: dict[str, int]
    token_totals: dict = field(default_factory=dict)
    per_task: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "exact_match_pct": round(self.exact_match_pct, 1),
            "prefix_match_pct": round(self.prefix_match_pct, 1),
            "exact_match_int": int(round(self.exact_match_pct)),
            "prefix_match_int": int(round(self.prefix_match_pct)),
            "per_step_accuracy": [
                {"step": step, "accuracy": round(acc, 4), "instances": n}
                for step, acc, n in self.per_step_accuracy
            ],
            "counts": dict(self.counts),
            "token_totals": dict(self.token_totals),
            "per_task": {
                task: {
                    "exact_match_pct": round(row["exact_match_pct"], 1),
                    "prefix_match_pct": round(row["prefix_match_pct"], 1),
                    "instances": row["instances"],
                    "correct_instances": row["correct_instances"],
                }
                for task, row in sorted(self.per_task.items())
            },
        }


def action_equal(predicted: FeasibleAction, truth: ReferenceAction) -> bool:
    if predicted.operation.lower() != truth.operation.lower():
        return False
    if truth.xpath:
        if predicted.target.xpath != truth.xpath:
            return False
    elif normalize_text(predicted.target.text) != normalize_text(truth.text):
        return False
    if predicted.operation.lower() in ("input", "select") and truth.content_exact:
        expected = (truth.input_content or "").strip()
        got = (predicted.input_content or "").strip()
        if expected != got:
            return False
    return True


def exact_match(results: list[bool]) -> float:
    """Percentage of correct instances."""
    if not results:
        raise NoResultsError("exact match needs at least one instance result")
    return 100.0 * sum(1 for r in results if r) / len(results)


def prefix_accuracy(predicted: list[FeasibleAction], truth: list[ReferenceAction]) -> float:
    """Fraction of the reference matched in order before the first error."""
    if not truth:
        raise ValueError("reference sequence must be non-empty")
    matched = 0
    for index, reference in enumerate(truth):
        if index >= len(predicted) or not action_equal(predicted[index], reference):
            break
        matched += 1
    return matched / len(truth)


def per_step_accuracy(results: list[InstanceResult]) -> list[tuple[int, float, int]]:
    """Next-action accuracy at each step, conditioned on an error-free run so
    far: at step k, over instances whose reference has at least k actions and
    whose first k-1 predictions were correct, the fraction whose k-th
    prediction is also correct."""
    if not results:
        raise NoResultsError("per-step accuracy needs at least one instance result")
    rows = []
    max_len = max(len(r.truth) for r in results)
    for k in range(1, min(max_len, PER_STEP_MAX) + 1):
        eligible = 0
        hit = 0
        for result in results:
            if len(result.truth) < k:
                continue
            prefix_ok = all(
                i < len(result.predicted) and action_equal(result.predicted[i], result.truth[i])
                for i in range(k - 1)
            )
            if not prefix_ok:
                continue
            eligible += 1
            if k - 1 < len(result.predicted) and action_equal(result.predicted[k - 1], result.truth[k - 1]):
                hit += 1
        if eligible:
            rows.append((k, hit / eligible, eligible))
    return rows


def build_report(results: list[InstanceResult], token_totals: dict | None = None) -> MetricsReport:
    if not results:
        raise NoResultsError("cannot build a report from zero results")
    flags = [r.correct for r in results]
    prefixes = [r.prefix for r in results]
    per_task: dict[str, dict] = {}
    for result in results:
        row = per_task.setdefault(
            result.task_id or "default",
            {"flags": [], "prefixes": []},
        )
        row["flags"].append(result.correct)
        row["prefixes"].append(result.prefix)
    return MetricsReport(
        exact_match_pct=exact_match(flags),
        prefix_match_pct=100.0 * sum(prefixes) / len(prefixes),
        per_step_accuracy=per_step_accuracy(results),
        counts={
            "instances": len(results),
            "correct_instances": sum(1 for f in flags if f),
        },
        token_totals=dict(token_totals or {}),
        per_task={
            task: {
                "exact_match_pct": exact_match(row["flags"]),
                "prefix_match_pct": 100.0 * sum(row["prefixes"]) / len(row["prefixes"]),
                "instances": len(row["flags"]),
                "correct_instances": sum(1 for f in row["flags"] if f),
            }
            for task, row in per_task.items()
        },
    )


def write_report_json(report: MetricsReport, path: str) -> None:
    with open(path, "w") as handle:
        json.dump(report.to_dict(), handle, indent=2, ensure_ascii=False)
        handle.write("\n")


def write_report_csv(report: MetricsReport, path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["task", "instances", "correct_instances", "exact_match_pct", "prefix_match_pct"])
        for task, row in sorted(report.per_task.items()):
            writer.writerow(
                [
                    task,
                    row["instances"],
                    row["correct_instances"],
                    f"{row['exact_match_pct']:.1f}",
                    f"{row['prefix_match_pct']:.1f}",
                ]
            )
        writer.writerow(
            [
                "total",
                report.counts["instances"],
                report.counts["correct_instances"],
                f"{report.exact_match_pct:.1f}",
                f"{report.prefix_match_pct:.1f}",
            ]
        )


# --- ground-truth files -------------------------------------------------------


def ground_truth_to_dict(task_id: str, truths: dict[str, GroundTruth], task_texts: dict[str, str]) -> dict:
    return {
        "task_id": task_id,
        "instances": [
            {
                "id": instance_id,
                "task_text": task_texts.get(instance_id, ""),
                "actions": [a.to_dict() for a in truth.actions],
            }
            for instance_id, truth in truths.items()
        ],
    }


def ground_truth_from_dict(raw: dict) -> dict[str, GroundTruth]:
    truths = {}
    for item in raw["instances"]:
        truths[item["id"]] = GroundTruth(
            task_instance_id=item["id"],
            actions=[ReferenceAction.from_dict(a) for a in item["actions"]],
        )
    return truths
