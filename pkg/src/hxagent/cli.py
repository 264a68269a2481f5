"""Command-line entry points.

Exit codes: 0 on success, 1 on a campaign-level failure, 2 on a configuration
error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, HxAgentError
from .orchestrator import (
    CampaignConfig,
    load_config,
    rebuild_report,
    run_evaluation,
    run_single_episode,
    run_training,
)

logger = logging.getLogger(__name__)


def _apply_overrides(config: CampaignConfig, args) -> CampaignConfig:
    if getattr(args, "backend", None):
        config.backend = args.backend
    if getattr(args, "llm", None):
        config.llm_kind = args.llm
    if getattr(args, "task_suite", None):
        config.task_suite = args.task_suite
    if getattr(args, "out", None):
        config.out_dir = args.out
    return config


def _config_from_args(args) -> CampaignConfig:
    config = load_config(args.config) if getattr(args, "config", None) else CampaignConfig()
    return _apply_overrides(config, args)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a JSON campaign configuration")
    parser.add_argument("--backend", choices=["sim", "webdriver"], help="environment backend")
    parser.add_argument("--llm", choices=["scripted", "remote"], help="model backend")
    parser.add_argument("--task-suite", dest="task_suite", help="task suite path, or 'builtin'")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hxagent",
        description=(
            "Generate replayable web test scripts from natural-language task "
            "descriptions with a history-aware planning agent."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run the training phase over a task suite")
    _add_common(train)

    evaluate = sub.add_parser("eval", help="run the evaluation phase with frozen experience")
    _add_common(evaluate)
    evaluate.add_argument("--experience", help="explicit experience snapshot file to freeze")

    run = sub.add_parser("run", help="run one episode of one task instance")
    _add_common(run)
    run.add_argument("--task", required=True, help="task id")
    run.add_argument("--instance", required=True, help="instance id")

    extract = sub.add_parser("extract", help="print feasible actions and state for a page")
    _add_common(extract)
    extract.add_argument("source", help="HTML file path, or a URL with --backend webdriver")
    extract.add_argument("--render-info", dest="render_info", help="sidecar render-info JSON path")

    report = sub.add_parser("report", help="rebuild the metrics report from stored traces")
    _add_common(report)

    serve = sub.add_parser("serve", help="serve the review API (and console, when built)")
    _add_common(serve)
    serve.add_argument("--port", type=int, default=8321)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", help="directory with the built review console")

    return parser


def cmd_train(args) -> int:
    config = _config_from_args(args)
    result = run_training(config)
    for task_id, points in result.moving_averages.items():
        last = points[-1]["value"] if points else 0.0
        print(f"{task_id}: {len(points)} judged episodes, moving average {last:.2f}")
    if result.pending_episodes:
        print(f"pending human review: {', '.join(result.pending_episodes)}")
    print(f"outputs in {config.out_dir}")
    return 0


def cmd_eval(args) -> int:
    config = _config_from_args(args)
    frozen = None
    if getattr(args, "experience", None):
        from .experience import load_snapshot

        frozen = load_snapshot(args.experience)
    report = run_evaluation(config, frozen=frozen)
    print(
        f"Exact-Match {report.exact_match_pct:.1f}% | Prefix-Match "
        f"{report.prefix_match_pct:.1f}% over {report.counts['instances']} instances"
    )
    print(f"report written to {config.out_dir}/reports/report.json")
    return 0


def cmd_run(args) -> int:
    config = _config_from_args(args)
    trace = run_single_episode(config, args.task, args.instance)
    print(f"episode {trace.episode_id}: outcome={trace.outcome} steps={len(trace.pairs)} verdict={trace.verdict}")
    return 0


def cmd_extract(args) -> int:
    config = _config_from_args(args)
    from .extractor import actions_wire_json, extract_feasible_actions, extract_state

    if config.backend == "webdriver":
        from .environment.webdriver import WebDriverEnvironment

        env = WebDriverEnvironment(config.webdriver_endpoint)
        observation = env.load(args.source)
        document, render_info = observation.document, observation.render_info
        env.close()
    else:
        from .dom import parse_html
        from .extractor import facts_from_dict

        with open(args.source) as handle:
            document = parse_html(handle.read())
        render_path = args.render_info or f"{args.source}.render.json"
        try:
            with open(render_path) as handle:
                raw = json.load(handle)
            render_info = {xpath: facts_from_dict(facts) for xpath, facts in raw.items()}
        except OSError:
            # no sidecar: treat every candidate element as visible and interactable
            from .dom import compute_xpath
            from .extractor import RenderFacts

            render_info = {
                compute_xpath(node): RenderFacts() for node in document.iter_elements()
            }
    actions = extract_feasible_actions(document, render_info)
    state = extract_state(document, actions=actions, budget=config.state_budget)
    print(actions_wire_json(actions))
    print(f"\nstate kind: {state.kind} (source size {state.source_size})")
    print(state.body)
    return 0


def cmd_report(args) -> int:
    config = _config_from_args(args)
    report = rebuild_report(config)
    print(
        f"Exact-Match {report.exact_match_pct:.1f}% | Prefix-Match "
        f"{report.prefix_match_pct:.1f}% over {report.counts['instances']} instances"
    )
    return 0


def cmd_serve(args) -> int:
    config = _config_from_args(args)
    from .review import serve_review

    llm = None
    if config.llm_kind == "remote" and config.llm_endpoint:
        from .llm import LLMGateway, RemoteBackend

        llm = LLMGateway(
            RemoteBackend(
                endpoint=config.llm_endpoint,
                model=config.llm_model,
                credential_env=config.llm_credential_env,
                timeout_s=config.llm_timeout_s,
            )
        )
    elif config.llm_kind == "scripted":
        from .llm import LLMGateway, ScriptedBackend
        from .orchestrator import BUILTIN_PERFECT_SCRIPT, _fallback_rule_entries

        if config.llm_script and config.llm_script != BUILTIN_PERFECT_SCRIPT:
            backend = ScriptedBackend.from_file(config.llm_script, strict=True)
            backend.entries.extend(_fallback_rule_entries())
        else:
            backend = ScriptedBackend(_fallback_rule_entries(), strict=True)
        llm = LLMGateway(backend)
    serve_review(
        out_dir=config.out_dir,
        port=args.port,
        host=args.host,
        llm=llm,
        static_dir=args.static,
        moving_average_window=config.moving_average_window,
    )
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "run": cmd_run,
    "extract": cmd_extract,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except HxAgentError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
