"""Plain-file stores for campaign outputs: traces, experience snapshots,
prompt logs, scripts and reports all live as diff-able files under one output
directory."""
from __future__ import annotations

import json
import os
import re
from datetime import datetime, timedelta, timezone

from .memory import EpisodeTrace, trace_from_dict, trace_to_dict

SNAPSHOT_FILE_RE = re.compile(r"^ep(\d+)\.json$")


class RealClock:
    def now(self) -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")


class CounterClock:
    """Deterministic clock: a fixed base instant advanced one second per call.
    Campaign outputs stay byte-identical across runs."""

    BASE = datetime(2000, 1, 1, tzinfo=timezone.utc)

    def __init__(self):
        self._ticks = 0

    def now(self) -> str:
        stamp = self.BASE + timedelta(seconds=self._ticks)
        self._ticks += 1
        return stamp.isoformat(timespec="seconds")


class CampaignPaths:
    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.traces = os.path.join(out_dir, "traces")
        self.screenshots = os.path.join(out_dir, "traces", "screenshots")
        self.experience = os.path.join(out_dir, "experience")
        self.prompts = os.path.join(out_dir, "prompts")
        self.scripts = os.path.join(out_dir, "scripts")
        self.reports = os.path.join(out_dir, "reports")

    def ensure(self) -> "CampaignPaths":
        for path in (self.traces, self.screenshots, self.experience, self.prompts, self.scripts, self.reports):
            os.makedirs(path, exist_ok=True)
        return self

    def trace_path(self, episode_id: str) -> str:
        return os.path.join(self.traces, f"{episode_id}.json")

    def experience_dir(self, task_id: str) -> str:
        return os.path.join(self.experience, task_id)

    def snapshot_path(self, task_id: str, episode: int) -> str:
        return os.path.join(self.experience_dir(task_id), f"ep{episode:03d}.json")

    def prompt_log_path(self, campaign: str) -> str:
        return os.path.join(self.prompts, f"{campaign}.jsonl")

    def script_path(self, episode_id: str) -> str:
        return os.path.join(self.scripts, f"{episode_id}.json")


def write_json(path: str, payload) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, ensure_ascii=False)
        handle.write("\n")


def read_json(path: str):
    with open(path) as handle:
        return json.load(handle)


def save_trace(trace: EpisodeTrace, path: str, task_id: str = "", instance_id: str = "") -> None:
    payload = {"task_id": task_id, "instance_id": instance_id}
    payload.update(trace_to_dict(trace))
    write_json(path, payload)


def load_trace(path: str) -> tuple[EpisodeTrace, dict]:
    raw = read_json(path)
    return trace_from_dict(raw), {
        "task_id": raw.get("task_id", ""),
        "instance_id": raw.get("instance_id", ""),
    }


def list_trace_files(traces_dir: str) -> list[str]:
    if not os.path.isdir(traces_dir):
        return []
    return sorted(
        os.path.join(traces_dir, name)
        for name in os.listdir(traces_dir)
        if name.endswith(".json")
    )


def list_snapshot_files(task_dir: str) -> list[tuple[int, str]]:
    """(episode, path) pairs sorted by episode number."""
    if not os.path.isdir(task_dir):
        return []
    found = []
    for name in os.listdir(task_dir):
        match = SNAPSHOT_FILE_RE.match(name)
        if match:
            found.append((int(match.group(1)), os.path.join(task_dir, name)))
    return sorted(found)
