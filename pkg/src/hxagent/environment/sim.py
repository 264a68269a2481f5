"""Deterministic in-process site simulator.

A site is a set of static pages plus a transition table keyed by
(page, element, operation). Runtime state is the current page name and a
string-valued variable map; transitions may require variable values, write
variables, and navigate. Everything is deterministic, which makes the
shortest goal-reaching action sequence computable by breadth-first search
and usable as ground truth.
"""
from __future__ import annotations

import io
import json
from collections import deque
from dataclasses import dataclass, field

from PIL import Image, ImageDraw

from ..dom import Document, parse_html, resolve_xpath
from ..errors import GoalUnreachableError, LoadFailureError
from ..extractor import FeasibleAction, RenderFacts, bind_context, describe_element
from . import (
    STATUS_ELEMENT_NOT_FOUND,
    STATUS_NOT_INTERACTABLE,
    STATUS_OK,
    ExecutionResult,
    PageObservation,
)

ABSENT = ""  # requiring or setting a var to "" means "absent"


@dataclass(frozen=True)
class SimTransition:
    page: str
    xpath: str
    operation: str
    require: tuple[tuple[str, str], ...] = ()
    set_vars: tuple[tuple[str, str], ...] = ()
    goto: str | None = None
    var: str | None = None  # input/select: variable receiving the typed content
    content: str | None = None  # declared content, used by the oracle search

    def satisfied(self, variables: dict[str, str]) -> bool:
        for name, expected in self.require:
            if expected == ABSENT:
                if variables.get(name, ABSENT) != ABSENT:
                    return False
            elif variables.get(name, ABSENT) != expected:
                return False
        return True


@dataclass
class SimSite:
    name: str
    title: str
    start_page: str
    pages: dict[str, str]  # page name -> html source
    transitions: list[SimTransition] = field(default_factory=list)
    goal: dict = field(default_factory=dict)
    render_overrides: dict[str, dict[str, dict]] = field(default_factory=dict)

    def __post_init__(self):
        self._documents: dict[str, Document] = {}
        for transition in self.transitions:
            if transition.page not in self.pages:
                raise ValueError(f"transition references unknown page {transition.page!r}")
            if resolve_xpath(self.document(transition.page), transition.xpath) is None:
                raise ValueError(
                    f"transition element {transition.xpath!r} not found on page {transition.page!r}"
                )

    def document(self, page: str) -> Document:
        if page not in self._documents:
            self._documents[page] = parse_html(self.pages[page])
        return self._documents[page]

    def render_info(self, page: str) -> dict[str, RenderFacts]:
        from ..dom import compute_xpath

        overrides = self.render_overrides.get(page, {})
        info: dict[str, RenderFacts] = {}
        for node in self.document(page).iter_elements():
            xpath = compute_xpath(node)
            raw = overrides.get(xpath, {})
            info[xpath] = RenderFacts(
                visible=bool(raw.get("visible", True)),
                interactable=bool(raw.get("interactable", True)),
                has_handler=bool(raw.get("has_handler", False)),
            )
        return info

    def goal_satisfied(self, page: str, variables: dict[str, str]) -> bool:
        return _evaluate_goal(self.goal, page, variables)


def _evaluate_goal(goal: dict, page: str, variables: dict[str, str]) -> bool:
    kind = goal.get("kind")
    if kind == "on_page":
        return page == goal["page"]
    if kind == "vars_equal":
        for name, expected in goal["vars"].items():
            if expected == ABSENT:
                if variables.get(name, ABSENT) != ABSENT:
                    return False
            elif variables.get(name, ABSENT) != expected:
                return False
        return True
    if kind == "all":
        return all(_evaluate_goal(sub, page, variables) for sub in goal["of"])
    raise ValueError(f"unknown goal kind {kind!r}")


def _render_screenshot(title: str, lines: list[str]) -> bytes:
    image = Image.new("RGB", (480, 360), "white")
    draw = ImageDraw.Draw(image)
    draw.text((10, 8), title, fill="black")
    y = 32
    for line in lines[:20]:
        draw.text((14, y), line[:60], fill="black")
        y += 16
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


class SimEnvironment:
    """One site instance per episode; no sharing across episodes."""

    def __init__(self, site: SimSite):
        self.site = site
        self.current_page: str | None = None
        self.variables: dict[str, str] = {}
        self.executed: list[FeasibleAction] = []

    def load(self, entry: str) -> PageObservation:
        name = entry
        if entry.startswith("sim://"):
            name = entry[len("sim://"):].split("/", 1)[0]
        if name != self.site.name:
            raise LoadFailureError(f"unknown sim site {entry!r}")
        self.current_page = self.site.start_page
        self.variables = {}
        self.executed = []
        return self._observe()

    def _observe(self) -> PageObservation:
        page = self.current_page
        document = self.site.document(page)
        title = document.title() or self.site.title
        texts = [
            node.visible_text()
            for node in document.iter_elements()
            if node.tag in ("a", "button", "input", "select", "h1", "h2", "p", "label")
        ]
        return PageObservation(
            document=document,
            render_info=self.site.render_info(page),
            title=title,
            url=f"sim://{self.site.name}/{page}",
            screenshot=_render_screenshot(title, [t for t in texts if t]),
        )

    @property
    def goal_reached(self) -> bool:
        if self.current_page is None:
            return False
        return self.site.goal_satisfied(self.current_page, self.variables)

    def execute(self, action: FeasibleAction) -> ExecutionResult:
        if self.current_page is None:
            raise LoadFailureError("execute before load")
        if action.operation not in ("click", "input", "select"):
            raise ValueError(f"cannot execute operation {action.operation!r}")
        if action.operation in ("input", "select") and action.input_content is None:
            raise ValueError("input/select actions need input_content before execution")

        document = self.site.document(self.current_page)
        node = resolve_xpath(document, action.target.xpath)
        if node is None:
            return ExecutionResult(status=STATUS_ELEMENT_NOT_FOUND)
        facts = self.site.render_info(self.current_page).get(action.target.xpath)
        if facts is None or not facts.visible or not facts.interactable:
            return ExecutionResult(status=STATUS_NOT_INTERACTABLE)

        transition = self._match_transition(action)
        if transition is not None:
            if transition.var is not None and action.input_content is not None:
                self._set_var(transition.var, action.input_content)
            for name, value in transition.set_vars:
                self._set_var(name, value)
            if transition.goto is not None:
                self.current_page = transition.goto
        self.executed.append(action)
        return ExecutionResult(status=STATUS_OK, new_observation=self._observe())

    def _match_transition(self, action: FeasibleAction) -> SimTransition | None:
        for transition in self.site.transitions:
            if (
                transition.page == self.current_page
                and transition.xpath == action.target.xpath
                and transition.operation == action.operation
                and transition.satisfied(self.variables)
            ):
                return transition
        return None

    def _set_var(self, name: str, value: str) -> None:
        if value == ABSENT:
            self.variables.pop(name, None)
        else:
            self.variables[name] = value


# --- oracle ------------------------------------------------------------------


def _state_key(page: str, variables: dict[str, str]):
    return (page, frozenset(variables.items()))


def sim_moves(site: SimSite, page: str, variables: dict[str, str]) -> list[tuple[SimTransition, FeasibleAction]]:
    """Concrete moves available in a state, ordered by the source element's
    document position (ties broken by declaration order)."""
    document = site.document(page)
    from ..dom import compute_xpath

    positions = {compute_xpath(node): i for i, node in enumerate(document.iter_elements())}
    moves = []
    for order, transition in enumerate(site.transitions):
        if transition.page != page or not transition.satisfied(variables):
            continue
        node = resolve_xpath(document, transition.xpath)
        action = FeasibleAction(
            operation=transition.operation,
            target=describe_element(node),
            context=bind_context(node, document),
            input_content=transition.content if transition.operation in ("input", "select") else None,
        )
        moves.append((positions[transition.xpath], order, transition, action))
    moves.sort(key=lambda m: (m[0], m[1]))
    return [(t, a) for _, _, t, a in moves]


def _apply(site: SimSite, page: str, variables: dict[str, str], transition: SimTransition, action: FeasibleAction):
    new_vars = dict(variables)
    if transition.var is not None and action.input_content is not None:
        if action.input_content == ABSENT:
            new_vars.pop(transition.var, None)
        else:
            new_vars[transition.var] = action.input_content
    for name, value in transition.set_vars:
        if value == ABSENT:
            new_vars.pop(name, None)
        else:
            new_vars[name] = value
    new_page = transition.goto if transition.goto is not None else page
    return new_page, new_vars


def oracle_shortest_sequence(site: SimSite) -> list[FeasibleAction]:
    """Minimum-length goal-reaching action sequence, via breadth-first search
    over (page, variables) states with document-order tie-breaking."""
    start = (site.start_page, {})
    if site.goal_satisfied(*start):
        return []
    seen = {_state_key(*start)}
    queue = deque([(start, [])])
    while queue:
        (page, variables), path = queue.popleft()
        for transition, action in sim_moves(site, page, variables):
            new_page, new_vars = _apply(site, page, variables, transition, action)
            key = _state_key(new_page, new_vars)
            if key in seen:
                continue
            seen.add(key)
            new_path = path + [action]
            if site.goal_satisfied(new_page, new_vars):
                return new_path
            queue.append(((new_page, new_vars), new_path))
    raise GoalUnreachableError(f"no action sequence reaches the goal of site {site.name!r}")


# --- site files --------------------------------------------------------------


def _resolve_ref(document: Document, ref: dict) -> str:
    from ..dom import compute_xpath, normalize_text

    if "xpath" in ref:
        if resolve_xpath(document, ref["xpath"]) is None:
            raise ValueError(f"xpath {ref['xpath']!r} not found")
        return ref["xpath"]
    if "id" in ref:
        node = document.find_by_id(ref["id"])
        if node is None:
            raise ValueError(f"element with id {ref['id']!r} not found")
        return compute_xpath(node)
    if "text" in ref:
        wanted = normalize_text(ref["text"])
        tag = ref.get("tag")
        for node in document.iter_elements():
            if tag and node.tag != tag:
                continue
            if node.visible_text() == wanted:
                return compute_xpath(node)
        raise ValueError(f"element with text {ref['text']!r} not found")
    raise ValueError(f"unsupported element reference {ref!r}")


def site_from_dict(raw: dict) -> SimSite:
    pages = {name: spec["html"] for name, spec in raw["pages"].items()}
    documents = {name: parse_html(html) for name, html in pages.items()}
    transitions = []
    for item in raw.get("transitions", []):
        page = item["page"]
        transitions.append(
            SimTransition(
                page=page,
                xpath=_resolve_ref(documents[page], item["on"]),
                operation=item["operation"],
                require=tuple(sorted(item.get("require", {}).items())),
                set_vars=tuple(sorted(item.get("set", {}).items())),
                goto=item.get("goto"),
                var=item.get("var"),
                content=item.get("content"),
            )
        )
    return SimSite(
        name=raw["name"],
        title=raw.get("title", raw["name"]),
        start_page=raw["start_page"],
        pages=pages,
        transitions=transitions,
        goal=raw["goal"],
        render_overrides=raw.get("render_overrides", {}),
    )


def load_site(path: str) -> SimSite:
    with open(path) as handle:
        return site_from_dict(json.load(handle))


def export_static_html(site: SimSite, directory: str) -> dict[str, str]:
    """Write each page as a standalone HTML file; returns page -> path."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = {}
    for page, html in site.pages.items():
        path = os.path.join(directory, f"{page}.html")
        with open(path, "w") as handle:
            handle.write(html)
        paths[page] = path
    return paths
