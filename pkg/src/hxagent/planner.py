"""The iterative observe-reason-act loop.

Each iteration extracts the page state and feasible actions, asks the model
for the next step (with memory and experience sections in the prompt),
resolves text-identical duplicates through a screenshot-grounded re-prompt,
generates content for input actions, executes, and re-observes. The loop ends
when the model picks the synthetic DONE candidate, the step limit is reached,
or an error occurs; in the training phase termination hands the finished trace
to the experience updater.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .environment import PageObservation
from .errors import EmptyInputContentError, HxAgentError
from .experience import DEFAULT_MAX_EXEMPLARS, ExperienceSnapshot, render_experience_section
from .extractor import (
    DEFAULT_STATE_BUDGET,
    DONE_ACTION,
    FeasibleAction,
    WebState,
    detect_duplicates,
    extract_feasible_actions,
    extract_state,
)
from .llm import (
    PURPOSE_DUPLICATE,
    PURPOSE_INPUT_CONTENT,
    PURPOSE_NEXT_ACTION,
    PURPOSE_STATE_SUMMARY,
    CompletionRequest,
    LLMGateway,
)
from .memory import (
    MODE_FULL,
    OUTCOME_DONE,
    OUTCOME_ERROR,
    OUTCOME_STEP_LIMIT,
    WINDOW_ALL,
    EpisodeTrace,
    append,
    new_trace,
    render_memory_section,
)
from .prompts import (
    build_disambiguation_prompt,
    build_input_content_prompt,
    build_main_prompt,
    build_summary_prompt,
)

logger = logging.getLogger(__name__)

PHASE_TRAINING = "training"
PHASE_EVALUATION = "evaluation"

DEFAULT_STEP_LIMIT = 20


@dataclass
class PlannerConfig:
    step_limit: int = DEFAULT_STEP_LIMIT
    memory_window: int | str = WINDOW_ALL
    memory_mode: str = MODE_FULL
    max_exemplars: int = DEFAULT_MAX_EXEMPLARS
    state_budget: int = DEFAULT_STATE_BUDGET
    phase: str = PHASE_TRAINING
    frozen_experience: ExperienceSnapshot | None = None

    def __post_init__(self):
        if self.step_limit < 1:
            raise ValueError("step_limit must be >= 1")
        if self.phase == PHASE_EVALUATION and self.frozen_experience is None:
            raise ValueError("evaluation phase requires a frozen experience snapshot")


@dataclass
class Decision:
    chosen: FeasibleAction  # DONE_ACTION when the model declares completion
    description: str
    reason: str
    was_disambiguated: bool = False

    @property
    def is_done(self) -> bool:
        return self.chosen.operation == "done"


def choose_next_action(
    state: WebState,
    candidates: list[FeasibleAction],
    trace: EpisodeTrace,
    experience: ExperienceSnapshot,
    llm: LLMGateway,
    config: PlannerConfig,
) -> Decision:
    prompt = build_main_prompt(
        state_text=state.body,
        candidates=candidates,
        memory_section=render_memory_section(trace, config.memory_window, config.memory_mode),
        experience_section=render_experience_section(experience, config.max_exemplars),
    )
    decided = llm.complete_decision(
        CompletionRequest(prompt=prompt, purpose=PURPOSE_NEXT_ACTION),
        candidate_count=len(candidates) + 1,
    )
    index = decided["chosen_action"]
    chosen = DONE_ACTION if index == len(candidates) + 1 else candidates[index - 1]
    return Decision(chosen=chosen, description=decided["action_description"], reason=decided["reason"])


def disambiguate_with_vision(
    screenshot: bytes | None,
    pool: list[FeasibleAction],
    trace: EpisodeTrace,
    experience: ExperienceSnapshot,
    llm: LLMGateway,
    config: PlannerConfig,
) -> Decision:
    """Re-prompt over a duplicate pool with the page screenshot; without a
    screenshot the lowest-document-order member wins by fallback."""
    if screenshot is None:
        logger.warning("no screenshot available; falling back to first duplicate by document order")
        return Decision(
            chosen=pool[0],
            description="first duplicate in document order (no screenshot fallback)",
            reason="screenshot unavailable",
            was_disambiguated=True,
        )
    prompt = build_disambiguation_prompt(
        pool=pool,
        memory_section=render_memory_section(trace, config.memory_window, config.memory_mode),
        experience_section=render_experience_section(experience, config.max_exemplars),
    )
    decided = llm.complete_decision(
        CompletionRequest(prompt=prompt, purpose=PURPOSE_DUPLICATE, images=(screenshot,)),
        candidate_count=len(pool),
    )
    return Decision(
        chosen=pool[decided["chosen_action"] - 1],
        description=decided["action_description"],
        reason=decided["reason"],
        was_disambiguated=True,
    )


def generate_input_content(
    trace: EpisodeTrace,
    experience: ExperienceSnapshot,
    target: FeasibleAction,
    llm: LLMGateway,
    config: PlannerConfig,
) -> str:
    if target.operation not in ("input", "select"):
        raise ValueError(f"content generation applies to input/select, not {target.operation!r}")
    prompt = build_input_content_prompt(
        target=target,
        memory_section=render_memory_section(trace, config.memory_window, config.memory_mode),
        experience_section=render_experience_section(experience, config.max_exemplars),
    )
    completion = llm.complete(CompletionRequest(prompt=prompt, purpose=PURPOSE_INPUT_CONTENT))
    content = completion.text.strip()
    if not content:
        raise EmptyInputContentError(f"model returned no content for field {target.target.xpath!r}")
    return content


def _observe_state(
    observation: PageObservation,
    actions: list[FeasibleAction],
    llm: LLMGateway,
    config: PlannerConfig,
    screenshot_ref: str | None = None,
) -> WebState:
    def summarizer(screenshot: bytes) -> str:
        completion = llm.complete(
            CompletionRequest(
                prompt=build_summary_prompt(),
                purpose=PURPOSE_STATE_SUMMARY,
                images=(screenshot,),
            )
        )
        return completion.text.strip()

    state = extract_state(
        observation.document,
        screenshot=observation.screenshot,
        summarizer=summarizer,
        budget=config.state_budget,
        actions=actions,
    )
    if screenshot_ref is not None:
        state = replace(state, screenshot_ref=screenshot_ref)
    return state


def run_episode(
    task: str,
    entry: str,
    env,
    llm: LLMGateway,
    experience: ExperienceSnapshot | None,
    config: PlannerConfig,
    episode_id: str = "",
    created_at: str = "",
    experience_updater=None,
    screenshot_sink=None,
) -> EpisodeTrace:
    """One full planning episode; returns the closed trace.

    ``experience`` is the snapshot visible to prompts (None means empty). In
    the training phase a terminated episode is handed to ``experience_updater``
    so the judged outcome can reinforce later episodes; in the evaluation phase
    the snapshot is read-only and the updater is never invoked.
    """
    if config.phase == PHASE_EVALUATION:
        snapshot = config.frozen_experience
    else:
        snapshot = experience if experience is not None else ExperienceSnapshot()

    llm.set_episode(episode_id)
    trace: EpisodeTrace | None = None
    outcome = OUTCOME_STEP_LIMIT
    error_cause = ""
    try:
        observation = env.load(entry)
        trace = new_trace(task, observation.title, episode_id=episode_id, created_at=created_at)
        actions = extract_feasible_actions(observation.document, observation.render_info)
        state = _observe_state(
            observation, actions, llm, config,
            screenshot_ref=_sink(screenshot_sink, episode_id, 0, observation.screenshot),
        )
        for step in range(1, config.step_limit + 1):
            decision = choose_next_action(state, actions, trace, snapshot, llm, config)
            if decision.is_done:
                outcome = OUTCOME_DONE
                break
            chosen = decision.chosen
            for group in detect_duplicates(actions):
                members = [actions[i] for i in group]
                if chosen in members:
                    decision = disambiguate_with_vision(
                        observation.screenshot, members, trace, snapshot, llm, config
                    )
                    chosen = decision.chosen
                    break
            if chosen.operation in ("input", "select"):
                chosen = chosen.with_content(
                    generate_input_content(trace, snapshot, chosen, llm, config)
                )
            result = env.execute(chosen)
            if not result.ok:
                outcome = OUTCOME_ERROR
                error_cause = result.status
                break
            append(trace, state, chosen, reason=decision.reason)
            observation = result.new_observation
            actions = extract_feasible_actions(observation.document, observation.render_info)
            state = _observe_state(
                observation, actions, llm, config,
                screenshot_ref=_sink(screenshot_sink, episode_id, step, observation.screenshot),
            )
    except HxAgentError as exc:
        outcome = OUTCOME_ERROR
        error_cause = exc.code
        logger.warning("episode %s aborted: %s (%s)", episode_id, exc, exc.code)

    if trace is None:  # the entry page never loaded
        trace = new_trace(task, "", episode_id=episode_id, created_at=created_at)
    trace.close(outcome, error_cause)
    if config.phase == PHASE_TRAINING and experience_updater is not None:
        experience_updater(trace)
    return trace


def _sink(screenshot_sink, episode_id: str, step: int, screenshot: bytes | None) -> str | None:
    if screenshot_sink is None or screenshot is None:
        return None
    return screenshot_sink(episode_id, step, screenshot)
