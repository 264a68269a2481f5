"""Execution substrates: an in-process deterministic simulated site for
desk-scale runs, and a remote browser driven over the WebDriver wire
protocol."""
from __future__ import annotations

from dataclasses import dataclass

from ..dom import Document
from ..extractor import RenderFacts

STATUS_OK = "ok"
STATUS_ELEMENT_NOT_FOUND = "element-not-found"
STATUS_NOT_INTERACTABLE = "not-interactable"
STATUS_NAVIGATION_TIMEOUT = "navigation-timeout"


@dataclass
class PageObservation:
    document: Document
    render_info: dict[str, RenderFacts]
    title: str
    url: str
    screenshot: bytes | None = None


@dataclass
class ExecutionResult:
    status: str
    new_observation: PageObservation | None = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


from .sim import SimEnvironment, SimSite, oracle_shortest_sequence  # noqa: E402
from .webdriver import WebDriverEnvironment, WebDriverSession  # noqa: E402

__all__ = [
    "PageObservation",
    "ExecutionResult",
    "SimEnvironment",
    "SimSite",
    "oracle_shortest_sequence",
    "WebDriverEnvironment",
    "WebDriverSession",
    "STATUS_OK",
    "STATUS_ELEMENT_NOT_FOUND",
    "STATUS_NOT_INTERACTABLE",
    "STATUS_NAVIGATION_TIMEOUT",
]
