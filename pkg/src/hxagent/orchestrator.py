"""Campaign orchestration: run the training phase (experience accumulation
with per-episode snapshots and moving-average tracking) and the evaluation
phase (frozen experience, metrics report, emitted test scripts) over a task
suite, against either environment backend and either model backend.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

from .emitter import emit_script, render_script_text, script_json
from .environment.builtin import TaskFamily, TaskInstance, builtin_suite, suite_policy_entries
from .environment.sim import SimEnvironment, load_site
from .environment.webdriver import WebDriverEnvironment
from .errors import ConfigError, EmptySuiteError, MissingExperienceError
from .experience import (
    DEFAULT_EARLY_STOP_THRESHOLD,
    DEFAULT_MOVING_AVERAGE_WINDOW,
    ExperienceSnapshot,
    ExperienceStore,
    load_snapshot,
    moving_average,
    save_snapshot,
    select_optimal,
)
from .llm import LLMGateway, PromptLog, RemoteBackend, ScriptedBackend, TokenLedger
from .memory import OUTCOME_DONE, VERDICT_CORRECT, VERDICT_INCORRECT, EpisodeTrace
from .metrics import (
    GroundTruth,
    InstanceResult,
    MetricsReport,
    ReferenceAction,
    action_equal,
    build_report,
    write_report_csv,
    write_report_json,
)
from .planner import PHASE_EVALUATION, PHASE_TRAINING, PlannerConfig, run_episode
from .storage import (
    CampaignPaths,
    CounterClock,
    RealClock,
    list_snapshot_files,
    save_trace,
    write_json,
)

logger = logging.getLogger(__name__)

BUILTIN_SUITE = "builtin"
BUILTIN_PERFECT_SCRIPT = "builtin-perfect"


@dataclass
class CampaignConfig:
    task_suite: str = BUILTIN_SUITE
    backend: str = "sim"  # sim | webdriver
    webdriver_endpoint: str = ""
    llm_kind: str = "scripted"  # scripted | remote
    llm_script: str = BUILTIN_PERFECT_SCRIPT
    llm_endpoint: str = ""
    llm_model: str = ""
    llm_credential_env: str = "HXAGENT_LLM_API_KEY"
    llm_timeout_s: float = 60.0
    training_episodes: int = 20
    eval_instances: int = 25
    step_limit: int = 20
    memory_window: int | str = "all"
    max_exemplars: int = 8
    state_budget: int = 20_000
    moving_average_window: int = DEFAULT_MOVING_AVERAGE_WINDOW
    early_stop_threshold: float | None = None
    out_dir: str = "out"
    save_screenshots: bool = True
    deterministic_clock: bool = True

    def planner_config(self, phase: str, frozen: ExperienceSnapshot | None = None) -> PlannerConfig:
        return PlannerConfig(
            step_limit=self.step_limit,
            memory_window=self.memory_window,
            max_exemplars=self.max_exemplars,
            state_budget=self.state_budget,
            phase=phase,
            frozen_experience=frozen,
        )


CONFIG_KEYS = {f.name for f in CampaignConfig.__dataclass_fields__.values()}


def load_config(path: str) -> CampaignConfig:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    config = CampaignConfig(**raw)
    if config.training_episodes < 1 or config.eval_instances < 1:
        raise ConfigError("training_episodes and eval_instances must be >= 1")
    if config.backend not in ("sim", "webdriver"):
        raise ConfigError(f"unknown backend {config.backend!r}")
    if config.llm_kind not in ("scripted", "remote"):
        raise ConfigError(f"unknown llm kind {config.llm_kind!r}")
    return config


def load_suite(config: CampaignConfig) -> list[TaskFamily]:
    if config.task_suite == BUILTIN_SUITE:
        return builtin_suite()
    try:
        with open(config.task_suite) as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read task suite {config.task_suite!r}: {exc}") from exc
    base = os.path.dirname(os.path.abspath(config.task_suite))
    families = []
    for task in raw.get("tasks", []):
        instances = []
        for item in task["instances"]:
            site = None
            site_path = item.get("site", task.get("site"))
            if site_path:
                site = load_site(os.path.join(base, site_path))
            truth = [ReferenceAction.from_dict(a) for a in item.get("ground_truth", [])]
            instances.append(
                TaskInstance(
                    instance_id=item["id"],
                    task_text=item["task_text"],
                    site=site,
                    entry=item.get("entry", f"sim://{site.name}" if site else ""),
                    ground_truth=truth,
                )
            )
        families.append(TaskFamily(task_id=task["task_id"], instances=instances))
    if not families or any(not f.instances for f in families):
        raise EmptySuiteError("the task suite defines no runnable task instances")
    return families


def build_gateway(config: CampaignConfig, suite: list[TaskFamily], prompt_log: PromptLog) -> LLMGateway:
    if config.llm_kind == "remote":
        backend = RemoteBackend(
            endpoint=config.llm_endpoint,
            model=config.llm_model,
            credential_env=config.llm_credential_env,
            timeout_s=config.llm_timeout_s,
        )
    elif config.llm_script == BUILTIN_PERFECT_SCRIPT:
        entries = suite_policy_entries(suite)
        if not entries:
            raise ConfigError(
                "llm_script 'builtin-perfect' needs a suite that carries scripted policies"
            )
        entries.extend(_fallback_rule_entries())
        backend = ScriptedBackend(entries, strict=True)
    else:
        backend = ScriptedBackend.from_file(config.llm_script, strict=True)
    return LLMGateway(backend, ledger=TokenLedger(), prompt_log=prompt_log)


def _fallback_rule_entries():
    from .llm import PURPOSE_RULE_EXTRACTION, ScriptEntry

    return [
        ScriptEntry(
            purpose=PURPOSE_RULE_EXTRACTION,
            response=(
                "Verify the text of the element before clicking, to confirm it is "
                "the desired link and avoid unnecessary clicks on unrelated elements."
            ),
        )
    ]


def make_environment(config: CampaignConfig, instance: TaskInstance):
    if config.backend == "sim":
        if instance.site is None:
            raise ConfigError(f"instance {instance.instance_id} has no sim site definition")
        return SimEnvironment(instance.site)
    return WebDriverEnvironment(config.webdriver_endpoint)


def judge_trace(instance: TaskInstance, trace: EpisodeTrace, env) -> str | None:
    """Ground truth wins when present (whole-sequence comparison); otherwise a
    sim environment's goal predicate decides; otherwise the episode stays
    unjudged for human review."""
    if instance.ground_truth:
        predicted = [pair.action for pair in trace.pairs]
        correct = (
            trace.outcome == OUTCOME_DONE
            and len(predicted) == len(instance.ground_truth)
            and all(action_equal(p, t) for p, t in zip(predicted, instance.ground_truth))
        )
        return VERDICT_CORRECT if correct else VERDICT_INCORRECT
    if isinstance(env, SimEnvironment):
        correct = trace.outcome == OUTCOME_DONE and env.goal_reached
        return VERDICT_CORRECT if correct else VERDICT_INCORRECT
    return None


def _screenshot_sink(paths: CampaignPaths, enable: bool):
    if not enable:
        return None

    def sink(episode_id: str, step: int, png: bytes) -> str:
        name = f"{episode_id}-{step:02d}.png"
        with open(os.path.join(paths.screenshots, name), "wb") as handle:
            handle.write(png)
        return os.path.join("screenshots", name)

    return sink


@dataclass
class TrainingResult:
    stores: dict[str, ExperienceStore]
    moving_averages: dict[str, list[dict]]
    pending_episodes: list[str] = field(default_factory=list)


def run_training(config: CampaignConfig, suite: list[TaskFamily] | None = None) -> TrainingResult:
    suite = suite if suite is not None else load_suite(config)
    if not suite:
        raise EmptySuiteError("no tasks to train on")
    paths = CampaignPaths(config.out_dir).ensure()
    clock = CounterClock() if config.deterministic_clock else RealClock()
    prompt_log = PromptLog(paths.prompt_log_path("train"))
    gateway = build_gateway(config, suite, prompt_log)
    sink = _screenshot_sink(paths, config.save_screenshots)

    stores: dict[str, ExperienceStore] = {}
    series: dict[str, list[dict]] = {}
    pending: list[str] = []
    for family in suite:
        store = ExperienceStore(family.task_id, llm=gateway)
        stores[family.task_id] = store
        for episode in range(1, config.training_episodes + 1):
            instance = family.instances[(episode - 1) % len(family.instances)]
            episode_id = f"{family.task_id}-train-e{episode:03d}"
            env = make_environment(config, instance)
            parked = []

            def updater(trace: EpisodeTrace, instance=instance, env=env):
                verdict = judge_trace(instance, trace, env)
                if verdict is None:
                    parked.append(trace.episode_id)
                    return
                trace.verdict = verdict
                trace.judged_at = clock.now()
                snapshot = store.update(trace)
                save_snapshot(snapshot, paths.snapshot_path(family.task_id, snapshot.captured_at_episode))

            trace = run_episode(
                task=instance.task_text,
                entry=instance.entry,
                env=env,
                llm=gateway,
                experience=store.current,
                config=config.planner_config(PHASE_TRAINING),
                episode_id=episode_id,
                created_at=clock.now(),
                experience_updater=updater,
                screenshot_sink=sink,
            )
            save_trace(trace, paths.trace_path(episode_id), family.task_id, instance.instance_id)
            if parked:
                pending.extend(parked)
                logger.info(
                    "task %s paused for human review after %s", family.task_id, episode_id
                )
                break
            history = store.current.outcome_history
            if config.early_stop_threshold is not None and len(history) >= config.moving_average_window:
                window_mean = sum(history[-config.moving_average_window:]) / config.moving_average_window
                if window_mean >= config.early_stop_threshold:
                    logger.info(
                        "task %s: early stop at episode %d (moving average %.2f)",
                        family.task_id, episode, window_mean,
                    )
                    break
        points = moving_average(store.current.outcome_history, config.moving_average_window)
        series[family.task_id] = [
            {"episode": p.episode, "value": round(p.value, 6)} for p in points
        ]
        write_json(
            os.path.join(paths.reports, f"{family.task_id}-moving-average.json"),
            {"task_id": family.task_id, "window": config.moving_average_window, "points": series[family.task_id]},
        )
    gateway.ledger.export_csv(os.path.join(paths.reports, "ledger-train.csv"))
    return TrainingResult(stores=stores, moving_averages=series, pending_episodes=pending)


def select_frozen_snapshot(config: CampaignConfig, task_id: str) -> ExperienceSnapshot:
    """Load the per-episode snapshot timeline from disk and pick the one the
    moving-average criterion selects."""
    paths = CampaignPaths(config.out_dir)
    files = list_snapshot_files(paths.experience_dir(task_id))
    if not files:
        raise MissingExperienceError(
            f"no experience snapshots for task {task_id!r} under {paths.experience_dir(task_id)}"
        )
    timeline = [load_snapshot(path) for _, path in files]
    threshold = config.early_stop_threshold
    if threshold is None:
        threshold = DEFAULT_EARLY_STOP_THRESHOLD
    return select_optimal(timeline, window=config.moving_average_window, threshold=threshold)


def run_evaluation(
    config: CampaignConfig,
    suite: list[TaskFamily] | None = None,
    frozen: dict[str, ExperienceSnapshot] | ExperienceSnapshot | None = None,
) -> MetricsReport:
    """Evaluation campaign with frozen experience. ``frozen`` may be one
    snapshot for every task, a per-task mapping, or None to select from the
    experience directory; a task missing everywhere is an error."""
    suite = suite if suite is not None else load_suite(config)
    if not suite:
        raise EmptySuiteError("no tasks to evaluate")
    paths = CampaignPaths(config.out_dir).ensure()
    clock = CounterClock() if config.deterministic_clock else RealClock()
    prompt_log = PromptLog(paths.prompt_log_path("eval"))
    gateway = build_gateway(config, suite, prompt_log)
    sink = _screenshot_sink(paths, config.save_screenshots)

    results: list[InstanceResult] = []
    for family in suite:
        if isinstance(frozen, ExperienceSnapshot):
            snapshot = frozen
        elif isinstance(frozen, dict) and family.task_id in frozen:
            snapshot = frozen[family.task_id]
        else:
            snapshot = select_frozen_snapshot(config, family.task_id)
        for k in range(1, config.eval_instances + 1):
            instance = family.instances[(k - 1) % len(family.instances)]
            episode_id = f"{family.task_id}-eval-e{k:03d}"
            env = make_environment(config, instance)
            trace = run_episode(
                task=instance.task_text,
                entry=instance.entry,
                env=env,
                llm=gateway,
                experience=None,
                config=config.planner_config(PHASE_EVALUATION, frozen=snapshot),
                episode_id=episode_id,
                created_at=clock.now(),
                screenshot_sink=sink,
            )
            verdict = judge_trace(instance, trace, env)
            if verdict is not None:
                trace.verdict = verdict
                trace.judged_at = clock.now()
            save_trace(trace, paths.trace_path(episode_id), family.task_id, instance.instance_id)
            if trace.outcome == OUTCOME_DONE:
                script = emit_script(trace, instance.entry)
                with open(paths.script_path(episode_id), "w") as handle:
                    handle.write(script_json(script))
                with open(paths.script_path(episode_id).replace(".json", ".txt"), "w") as handle:
                    handle.write(render_script_text(script))
            results.append(
                InstanceResult(
                    instance_id=f"{episode_id}:{instance.instance_id}",
                    predicted=[pair.action for pair in trace.pairs],
                    truth=list(instance.ground_truth),
                    task_id=family.task_id,
                )
            )
    report = build_report(results, token_totals=_ledger_payload(gateway.ledger))
    write_report_json(report, os.path.join(paths.reports, "report.json"))
    write_report_csv(report, os.path.join(paths.reports, "report.csv"))
    gateway.ledger.export_csv(os.path.join(paths.reports, "ledger-eval.csv"))
    return report


def _ledger_payload(ledger: TokenLedger) -> dict:
    payload = {"per_purpose": ledger.snapshot()}
    payload["totals"] = ledger.totals()
    return payload


def run_single_episode(config: CampaignConfig, task_id: str, instance_id: str) -> EpisodeTrace:
    suite = load_suite(config)
    family = next((f for f in suite if f.task_id == task_id), None)
    if family is None:
        raise ConfigError(f"unknown task {task_id!r}")
    instance = next((i for i in family.instances if i.instance_id == instance_id), None)
    if instance is None:
        raise ConfigError(f"unknown instance {instance_id!r} of task {task_id!r}")
    paths = CampaignPaths(config.out_dir).ensure()
    clock = CounterClock() if config.deterministic_clock else RealClock()
    gateway = build_gateway(config, suite, PromptLog(paths.prompt_log_path("run")))
    env = make_environment(config, instance)
    episode_id = f"{task_id}-run-{instance_id}"
    trace = run_episode(
        task=instance.task_text,
        entry=instance.entry,
        env=env,
        llm=gateway,
        experience=None,
        config=config.planner_config(PHASE_TRAINING),
        episode_id=episode_id,
        created_at=clock.now(),
        screenshot_sink=_screenshot_sink(paths, config.save_screenshots),
    )
    verdict = judge_trace(instance, trace, env)
    if verdict is not None:
        trace.verdict = verdict
        trace.judged_at = clock.now()
    save_trace(trace, paths.trace_path(episode_id), task_id, instance.instance_id)
    return trace


def rebuild_report(config: CampaignConfig, suite: list[TaskFamily] | None = None) -> MetricsReport:
    """Recompute the metrics report from persisted evaluation traces."""
    from .storage import list_trace_files, load_trace

    suite = suite if suite is not None else load_suite(config)
    truths: dict[tuple[str, str], GroundTruth] = {}
    for family in suite:
        for instance in family.instances:
            truths[(family.task_id, instance.instance_id)] = GroundTruth(
                task_instance_id=instance.instance_id, actions=list(instance.ground_truth)
            )
    paths = CampaignPaths(config.out_dir)
    results = []
    for path in list_trace_files(paths.traces):
        trace, meta = load_trace(path)
        if "-eval-" not in trace.episode_id:
            continue
        key = (meta["task_id"], meta["instance_id"])
        if key not in truths:
            continue
        results.append(
            InstanceResult(
                instance_id=f"{trace.episode_id}:{meta['instance_id']}",
                predicted=[pair.action for pair in trace.pairs],
                truth=list(truths[key].actions),
                task_id=meta["task_id"],
            )
        )
    report = build_report(results)
    write_report_json(report, os.path.join(paths.reports, "report.json"))
    write_report_csv(report, os.path.join(paths.reports, "report.csv"))
    return report
