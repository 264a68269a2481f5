"""Typed error hierarchy. Every error carries a stable string code that tests
and callers can branch on without string-matching messages."""


class HxAgentError(Exception):
    code = "hxagent-error"

    def __init__(self, message: str = "", *, code: str | None = None):
        super().__init__(message or self.__class__.code)
        if code is not None:
            self.code = code


class ConfigError(HxAgentError):
    code = "config-error"


# --- content extraction ---

class DetachedNodeError(HxAgentError):
    code = "detached-node"


class StateBudgetExceededError(HxAgentError):
    code = "state-budget-exceeded"


# --- sequence memory ---

class EmptyTaskError(HxAgentError):
    code = "empty-task"


class TraceClosedError(HxAgentError):
    code = "trace-closed"


# --- experience store ---

class RuleDuplicateError(HxAgentError):
    code = "rule-duplicate"


class RuleEmptyError(HxAgentError):
    code = "rule-empty"


class SnapshotCorruptError(HxAgentError):
    code = "snapshot-corrupt"

    def __init__(self, message: str = "", *, field_path: str = ""):
        super().__init__(message)
        self.field_path = field_path


class NoTrainingHistoryError(HxAgentError):
    code = "no-training-history"


# --- llm gateway ---

class LlmUnavailableError(HxAgentError):
    code = "llm-unavailable"


class LlmTimeoutError(HxAgentError):
    code = "llm-timeout"


class DecisionParseError(HxAgentError):
    code = "decision-parse-failure"


class ScriptedNoMatchError(HxAgentError):
    code = "scripted-no-match"


class EmptyInputContentError(HxAgentError):
    code = "empty-input-content"


# --- test environment ---

class LoadFailureError(HxAgentError):
    code = "load-failure"


class ElementNotFoundError(HxAgentError):
    code = "element-not-found"


class NotInteractableError(HxAgentError):
    code = "not-interactable"


class NavigationTimeoutError(HxAgentError):
    code = "navigation-timeout"


class GoalUnreachableError(HxAgentError):
    code = "goal-unreachable"


class WebDriverProtocolError(HxAgentError):
    code = "webdriver-protocol"

    def __init__(self, message: str = "", *, w3c_error: str = ""):
        super().__init__(message)
        self.w3c_error = w3c_error


# --- script emitter ---

class UnmappableActionError(HxAgentError):
    code = "unmappable-action"


class IncompleteTraceError(HxAgentError):
    code = "incomplete-trace"


# --- evaluation ---

class NoResultsError(HxAgentError):
    code = "no-results"


class MissingExperienceError(HxAgentError):
    code = "missing-experience"


class EmptySuiteError(HxAgentError):
    code = "empty-suite"
