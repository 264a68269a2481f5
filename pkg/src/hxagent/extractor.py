"""Content extraction: mine the feasible actions from a page and build the
state representation handed to the planner.

A page yields, in document order, one action per visible-and-interactable
element. Small pages are represented as simplified interactable-only markup
that keeps a path back to every source element; oversized pages fall back to
a vision-derived prose summary.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from typing import Callable

from .dom import Document, Node, compute_xpath, normalize_text
from .errors import StateBudgetExceededError

logger = logging.getLogger(__name__)

CANDIDATE_TAGS = frozenset({"a", "button", "input", "select", "textarea", "option"})

# input types that take free text; everything else on an <input> is clicked
TEXT_INPUT_TYPES = frozenset({
    "", "text", "password", "email", "search", "number", "tel", "url", "date",
})

RETAINED_ATTRIBUTES = ("id", "class", "name", "type", "href", "placeholder", "aria-label")

CONTEXT_ANCESTOR_DEPTH = 5
DEFAULT_STATE_BUDGET = 20_000

CONTEXT_SOURCE_TAGS = frozenset({"label", "legend", "h1", "h2", "h3", "h4", "h5", "h6"})


@dataclass(frozen=True)
class ElementDescriptor:
    """Identity of one page element: tag, retained attributes, indexed path,
    and normalized visible text."""

    tag_name: str
    attributes: dict[str, str]
    xpath: str
    text: str


@dataclass(frozen=True)
class FeasibleAction:
    operation: str  # click | input | select | done
    target: ElementDescriptor
    context: str = ""
    input_content: str | None = None

    def fingerprint(self) -> tuple[str, str, str, str, str]:
        """Identity in the text channel: xpath deliberately excluded, so two
        actions collide exactly when prose cannot tell them apart."""
        return (
            self.operation,
            self.target.tag_name,
            normalize_text(self.target.text),
            self.target.attributes.get("id", ""),
            self.target.attributes.get("class", ""),
        )

    def with_content(self, content: str) -> "FeasibleAction":
        return replace(self, input_content=content)


DONE_ACTION = FeasibleAction(
    operation="done",
    target=ElementDescriptor(tag_name="none", attributes={}, xpath="", text=""),
)

DONE_CANDIDATE_TEXT = "DONE — the task is complete"


@dataclass(frozen=True)
class WebState:
    kind: str  # simplified_markup | summary
    body: str
    source_size: int
    screenshot_ref: str | None = None


@dataclass(frozen=True)
class RenderFacts:
    visible: bool = True
    interactable: bool = True
    has_handler: bool = False


def facts_from_dict(raw: dict) -> RenderFacts:
    return RenderFacts(
        visible=bool(raw.get("visible", True)),
        interactable=bool(raw.get("interactable", True)),
        has_handler=bool(raw.get("has_handler", False)),
    )


def _operation_for(node: Node) -> str:
    tag = node.tag
    if tag in ("input",):
        if node.get("type", "").lower() in TEXT_INPUT_TYPES:
            return "input"
        return "click"
    if tag == "textarea":
        return "input"
    if tag == "select":
        return "select"
    return "click"


def _inside_select(node: Node) -> bool:
    return any(a.tag == "select" for a in node.ancestors())


def describe_element(node: Node) -> ElementDescriptor:
    attributes = {}
    for name, value in node.attrs.items():
        if name in RETAINED_ATTRIBUTES or name.startswith("data-"):
            attributes[name] = value
    return ElementDescriptor(
        tag_name=node.tag,
        attributes=attributes,
        xpath=compute_xpath(node),
        text=node.visible_text(),
    )


def bind_context(node: Node, document: Document) -> str:
    """Human-readable context for an element.

    Buttons and other content-bearing elements use their inner text. Input
    fields look for an explicit ``label for=``, then a preceding label or text
    among earlier siblings, then ascend up to CONTEXT_ANCESTOR_DEPTH ancestors
    collecting the first heading/label/legend text found. Empty string when
    nothing applies.
    """
    if node.tag not in ("input", "textarea", "select"):
        text = node.visible_text()
        if text:
            return text
        return _ancestor_context(node)

    element_id = node.get("id")
    if element_id:
        for candidate in document.iter_elements():
            if candidate.tag == "label" and candidate.get("for") == element_id:
                text = candidate.visible_text()
                if text:
                    return text

    sibling_text = _preceding_sibling_context(node)
    if sibling_text:
        return sibling_text
    return _ancestor_context(node)


def _preceding_sibling_context(node: Node) -> str:
    parent = node.parent
    if parent is None:
        return ""
    best = ""
    for child in parent.children:
        if child is node:
            break
        if isinstance(child, str):
            text = normalize_text(child)
            if text:
                best = text
        elif child.tag in CONTEXT_SOURCE_TAGS:
            text = child.visible_text()
            if text:
                best = text
    return best


def _ancestor_context(node: Node) -> str:
    depth = 0
    child = node
    for ancestor in node.ancestors():
        depth += 1
        if depth > CONTEXT_ANCESTOR_DEPTH:
            break
        aria = ancestor.get("aria-label")
        if aria:
            return normalize_text(aria)
        for sibling in ancestor.element_children():
            if sibling is child:
                break
            if sibling.tag in CONTEXT_SOURCE_TAGS:
                text = sibling.visible_text()
                if text:
                    return text
            # headings/labels nested one level down still count as context
            for inner in sibling.element_children():
                if inner.tag in CONTEXT_SOURCE_TAGS:
                    text = inner.visible_text()
                    if text:
                        return text
        child = ancestor
    return ""


def extract_feasible_actions(
    document: Document, render_info: dict[str, RenderFacts | dict]
) -> list[FeasibleAction]:
    """One action per visible, interactable element, in document order.

    ``render_info`` maps xpath to per-element facts; elements it does not
    cover are skipped with a warning since their state cannot be judged.
    """
    actions: list[FeasibleAction] = []
    for node in document.iter_elements():
        if node.tag in ("html", "head", "title", "script", "style", "meta", "link"):
            continue
        xpath = compute_xpath(node)
        raw = render_info.get(xpath)
        facts = facts_from_dict(raw) if isinstance(raw, dict) else raw
        candidate = node.tag in CANDIDATE_TAGS or (facts is not None and facts.has_handler)
        if not candidate:
            continue
        if node.tag == "option" and _inside_select(node):
            continue
        if facts is None:
            logger.warning("no render facts for %s; element skipped", xpath)
            continue
        if not facts.visible or not facts.interactable:
            continue
        actions.append(
            FeasibleAction(
                operation=_operation_for(node),
                target=describe_element(node),
                context=bind_context(node, document),
            )
        )
    return actions


def detect_duplicates(actions: list[FeasibleAction]) -> list[list[int]]:
    """Indices grouped by equal fingerprint; singleton groups omitted."""
    by_fingerprint: dict[tuple, list[int]] = {}
    for index, action in enumerate(actions):
        by_fingerprint.setdefault(action.fingerprint(), []).append(index)
    return [group for group in by_fingerprint.values() if len(group) > 1]


def simplified_markup(actions: list[FeasibleAction]) -> str:
    """Interactable-only markup; each line keeps the source xpath so the
    original element is recoverable."""
    lines = []
    for action in actions:
        target = action.target
        attrs = "".join(
            f' {name}="{value}"' for name, value in target.attributes.items() if value
        )
        context = ""
        if action.context and action.context != target.text:
            context = f' context="{action.context}"'
        lines.append(
            f'<{target.tag_name} xpath="{target.xpath}"{attrs}{context}>{target.text}</{target.tag_name}>'
        )
    return "\n".join(lines)


def extract_state(
    document: Document,
    screenshot: bytes | None = None,
    summarizer: Callable[[bytes], str] | None = None,
    budget: int = DEFAULT_STATE_BUDGET,
    render_info: dict | None = None,
    actions: list[FeasibleAction] | None = None,
) -> WebState:
    """Page representation: simplified markup when the serialized source fits
    the character budget, otherwise a prose summary of the screenshot.

    ``actions`` may carry a previously extracted list to avoid re-extraction;
    otherwise ``render_info`` is used to extract here.
    """
    size = document.source_size or len(document.serialize())
    if size <= budget:
        if actions is None:
            actions = extract_feasible_actions(document, render_info or {})
        return WebState(kind="simplified_markup", body=simplified_markup(actions), source_size=size)
    if screenshot is None or summarizer is None:
        raise StateBudgetExceededError(
            f"document of {size} chars exceeds budget {budget} and no summarizer is available"
        )
    return WebState(kind="summary", body=summarizer(screenshot), source_size=size)


# --- wire format -----------------------------------------------------------
# The serialized action object is a stable external contract: key names and
# nesting are fixed ("operation", "target object" holding attributes/tagName/
# xpath/text).

def action_to_wire(action: FeasibleAction) -> dict:
    return {
        "operation": action.operation,
        "target object": {
            "attributes": dict(action.target.attributes),
            "tagName": action.target.tag_name,
            "xpath": action.target.xpath,
            "text": action.target.text,
        },
    }


def action_wire_json(action: FeasibleAction, indent: int | None = None) -> str:
    return json.dumps(action_to_wire(action), indent=indent, ensure_ascii=False)


def actions_wire_json(actions: list[FeasibleAction], indent: int | None = 2) -> str:
    return json.dumps([action_to_wire(a) for a in actions], indent=indent, ensure_ascii=False)
