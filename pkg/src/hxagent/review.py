"""Review HTTP service: serves episode traces for human judgment, accepts
verdicts that drive the experience update, and exposes the experience bank and
moving-average series. Also statically serves the review console when a build
of it is available."""
from __future__ import annotations

import base64
import os
import threading

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .experience import (
    DEFAULT_MOVING_AVERAGE_WINDOW,
    ExperienceSnapshot,
    extract_rule,
    load_snapshot,
    moving_average,
    save_snapshot,
    update,
)
from .memory import VERDICT_CORRECT, VERDICT_INCORRECT
from .storage import CampaignPaths, RealClock, list_snapshot_files, list_trace_files, load_trace, read_json, write_json

STATUS_PENDING = "pending"
STATUS_JUDGED = "judged"


class VerdictSubmission(BaseModel):
    verdict: str
    note: str = ""
    submitted_by: str = ""


def _episode_summary(raw: dict) -> dict:
    return {
        "episode_id": raw.get("episode_id", ""),
        "task_id": raw.get("task_id", ""),
        "instance_id": raw.get("instance_id", ""),
        "task": raw.get("task", ""),
        "steps": len(raw.get("pairs", [])),
        "outcome": raw.get("outcome", ""),
        "verdict": raw.get("verdict"),
        "status": STATUS_JUDGED if raw.get("verdict") else STATUS_PENDING,
        "created_at": raw.get("created_at", ""),
    }


def create_app(
    out_dir: str,
    llm=None,
    moving_average_window: int = DEFAULT_MOVING_AVERAGE_WINDOW,
    static_dir: str | None = None,
    clock=None,
) -> FastAPI:
    paths = CampaignPaths(out_dir).ensure()
    clock = clock or RealClock()
    app = FastAPI(title="hxagent review service")
    write_lock = threading.Lock()

    def _trace_file(episode_id: str) -> str:
        path = paths.trace_path(episode_id)
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail=f"unknown episode {episode_id!r}")
        return path

    def _latest_snapshot(task_id: str) -> ExperienceSnapshot:
        files = list_snapshot_files(paths.experience_dir(task_id))
        if not files:
            return ExperienceSnapshot(task_id=task_id)
        return load_snapshot(files[-1][1])

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/episodes")
    def list_episodes(status: str | None = None):
        episodes = []
        for path in list_trace_files(paths.traces):
            raw = read_json(path)
            summary = _episode_summary(raw)
            if status and summary["status"] != status:
                continue
            episodes.append(summary)
        episodes.sort(key=lambda e: (e["created_at"], e["episode_id"]), reverse=True)
        return {"episodes": episodes}

    @app.get("/api/episodes/{episode_id}")
    def get_episode(episode_id: str):
        raw = read_json(_trace_file(episode_id))
        raw["status"] = STATUS_JUDGED if raw.get("verdict") else STATUS_PENDING
        raw["prompt_log"] = [
            name for name in os.listdir(paths.prompts)
        ] if os.path.isdir(paths.prompts) else []
        # inline stored screenshots so the payload is self-contained
        for pair in raw.get("pairs", []):
            ref = pair.get("state", {}).get("screenshot_ref")
            if not ref:
                continue
            image_path = os.path.join(paths.traces, ref)
            if os.path.isfile(image_path):
                with open(image_path, "rb") as handle:
                    encoded = base64.b64encode(handle.read()).decode("ascii")
                pair["state"]["screenshot_data"] = f"data:image/png;base64,{encoded}"
        return raw

    @app.post("/api/episodes/{episode_id}/verdict")
    def submit_verdict(episode_id: str, submission: VerdictSubmission):
        if submission.verdict not in (VERDICT_CORRECT, VERDICT_INCORRECT):
            raise HTTPException(status_code=422, detail=f"verdict must be correct or incorrect")
        with write_lock:
            path = _trace_file(episode_id)
            raw = read_json(path)
            if raw.get("verdict"):
                raise HTTPException(
                    status_code=409,
                    detail=f"episode {episode_id!r} already judged as {raw['verdict']!r}",
                )
            raw["verdict"] = submission.verdict
            raw["judged_at"] = clock.now()
            raw["judged_by"] = submission.submitted_by
            if submission.note:
                raw["verdict_note"] = submission.note
            write_json(path, raw)

            task_id = raw.get("task_id", "")
            trace, _ = load_trace(path)
            snapshot = _latest_snapshot(task_id)

            rule_extractor = None
            if llm is not None:
                def rule_extractor(correct, incorrect, rules, source_episode, created_at):
                    return extract_rule(
                        correct, incorrect, rules, llm,
                        source_episode=source_episode, created_at=created_at,
                    )

            successor = update(snapshot, trace, rule_extractor)
            save_snapshot(
                successor, paths.snapshot_path(task_id, successor.captured_at_episode)
            )
            return {
                "episode_id": episode_id,
                "verdict": submission.verdict,
                "experience": {
                    "task_id": task_id,
                    "captured_at_episode": successor.captured_at_episode,
                    "correct": len(successor.correct_traces),
                    "incorrect": len(successor.incorrect_traces),
                    "rules": len(successor.rules),
                },
            }

    @app.get("/api/experience/{task_id}")
    def get_experience(task_id: str):
        snapshot = _latest_snapshot(task_id)
        return {
            "task_id": task_id,
            "captured_at_episode": snapshot.captured_at_episode,
            "rules": [rule.text for rule in snapshot.rules],
            "exemplars": [
                {"task": trace.task, "steps": len(trace.pairs), "episode_id": trace.episode_id}
                for trace in snapshot.correct_traces[-8:]
            ],
            "correct": len(snapshot.correct_traces),
            "incorrect": len(snapshot.incorrect_traces),
            "outcome_history": list(snapshot.outcome_history),
        }

    @app.get("/api/metrics/{task_id}/moving-average")
    def get_moving_average(task_id: str):
        snapshot = _latest_snapshot(task_id)
        points = moving_average(snapshot.outcome_history, moving_average_window)
        return {
            "task_id": task_id,
            "window": moving_average_window,
            "points": [{"episode": p.episode, "value": round(p.value, 6)} for p in points],
        }

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app


def serve_review(
    out_dir: str,
    port: int,
    host: str = "127.0.0.1",
    llm=None,
    static_dir: str | None = None,
    moving_average_window: int = DEFAULT_MOVING_AVERAGE_WINDOW,
) -> None:
    import uvicorn

    app = create_app(
        out_dir, llm=llm, static_dir=static_dir, moving_average_window=moving_average_window
    )
    uvicorn.run(app, host=host, port=port)
