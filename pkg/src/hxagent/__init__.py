"""hxagent: history-aware LLM-agent planning that turns natural-language task
descriptions into executable, replayable web test scripts."""

__version__ = "0.1.0"

from .extractor import ElementDescriptor, FeasibleAction, WebState
from .memory import EpisodeTrace, StateActionPair
from .experience import ExperienceSnapshot, Rule
from .metrics import MetricsReport

__all__ = [
    "ElementDescriptor",
    "FeasibleAction",
    "WebState",
    "EpisodeTrace",
    "StateActionPair",
    "ExperienceSnapshot",
    "Rule",
    "MetricsReport",
    "__version__",
]
