"""Minimal document tree over the stdlib HTML tokenizer.

The tree exists so that element paths can be computed and resolved with one
exact, round-trippable convention: absolute root-to-node paths where ``html``
and ``body`` appear bare and every other segment carries a 1-based index among
same-tag siblings, e.g. ``html/body/div[1]/div[2]/div[1]/button[1]``.
"""
from __future__ import annotations

import re
from html import escape
from html.parser import HTMLParser

from .errors import DetachedNodeError

VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Segments without an explicit index (unique per document by construction).
UNINDEXED_TAGS = frozenset({"html", "body"})

_SEGMENT_RE = re.compile(r"^([a-zA-Z][\w-]*)(?:\[(\d+)\])?$")
_WS_RE = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Collapse runs of whitespace to single spaces and trim the ends."""
    return _WS_RE.sub(" ", text).strip()


class Node:
    """One element. ``children`` holds child Nodes and raw text chunks in
    document order."""

    __slots__ = ("tag", "attrs", "children", "parent", "document")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None):
        self.tag = tag.lower()
        self.attrs = dict(attrs or {})
        self.children: list[Node | str] = []
        self.parent: Node | None = None
        self.document: "Document | None" = None

    def append(self, child: "Node | str") -> None:
        if isinstance(child, Node):
            child.parent = self
            child.document = self.document
        self.children.append(child)

    def element_children(self) -> list["Node"]:
        return [c for c in self.children if isinstance(c, Node)]

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def iter_elements(self):
        """All element descendants including self, document order."""
        yield self
        for child in self.children:
            if isinstance(child, Node):
                yield from child.iter_elements()

    def visible_text(self) -> str:
        """Normalized text of all descendants, skipping script/style."""
        if self.tag in ("script", "style", "template"):
            return ""
        parts: list[str] = []
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                parts.append(child.visible_text())
        return normalize_text(" ".join(parts))

    def get(self, name: str, default: str = "") -> str:
        return self.attrs.get(name, default)

    def serialize(self) -> str:
        attrs = "".join(
            f' {name}="{escape(value, quote=True)}"' for name, value in self.attrs.items()
        )
        if self.tag in VOID_TAGS:
            return f"<{self.tag}{attrs}/>"
        inner = "".join(
            escape(c) if isinstance(c, str) else c.serialize() for c in self.children
        )
        return f"<{self.tag}{attrs}>{inner}</{self.tag}>"

    def __repr__(self):  # pragma: no cover
        return f"<Node {self.tag} attrs={self.attrs}>"


class Document:
    """Parsed page: a root ``html`` Node plus the original source text."""

    def __init__(self, root: Node, source: str = ""):
        self.root = root
        self.source = source
        self._adopt(root)

    def _adopt(self, node: Node) -> None:
        node.document = self
        for child in node.element_children():
            self._adopt(child)

    @property
    def source_size(self) -> int:
        return len(self.source)

    def serialize(self) -> str:
        return self.root.serialize()

    def iter_elements(self):
        return self.root.iter_elements()

    def title(self) -> str:
        for node in self.iter_elements():
            if node.tag == "title":
                return node.visible_text()
        return ""

    def find_by_id(self, element_id: str) -> Node | None:
        for node in self.iter_elements():
            if node.get("id") == element_id:
                return node
        return None


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.top_level: list[Node | str] = []
        self.stack: list[Node] = []

    def _append(self, item: Node | str) -> None:
        if self.stack:
            self.stack[-1].append(item)
        else:
            self.top_level.append(item)

    def handle_starttag(self, tag, attrs):
        node = Node(tag, {name: (value if value is not None else "") for name, value in attrs})
        self._append(node)
        if tag not in VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self._append(Node(tag, {name: (value if value is not None else "") for name, value in attrs}))

    def handle_endtag(self, tag):
        # Tolerate mis-nesting: pop to the nearest matching open tag, if any.
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        if data:
            self._append(data)


def parse_html(source: str) -> Document:
    """Parse into a Document, synthesizing html/body wrappers when absent."""
    builder = _TreeBuilder()
    builder.feed(source)
    builder.close()

    roots = [c for c in builder.top_level if isinstance(c, Node)]
    html_root = next((n for n in roots if n.tag == "html"), None)
    if html_root is None:
        html_root = Node("html")
        body = Node("body")
        html_root.append(body)
        for item in builder.top_level:
            body.append(item)
    elif not any(c.tag == "body" for c in html_root.element_children()):
        body = Node("body")
        kept: list[Node | str] = []
        for child in html_root.children:
            if isinstance(child, Node) and child.tag == "head":
                kept.append(child)
            else:
                body.append(child)
        html_root.children = []
        for item in kept:
            html_root.append(item)
        html_root.append(body)
    return Document(html_root, source=source)


def compute_xpath(node: Node) -> str:
    """Indexed absolute path from the document root to ``node``."""
    if node.document is None:
        raise DetachedNodeError("node is not attached to a document")
    segments: list[str] = []
    current: Node | None = node
    while current is not None:
        if current.tag in UNINDEXED_TAGS:
            segments.append(current.tag)
        else:
            parent = current.parent
            if parent is None:
                raise DetachedNodeError(f"non-root node <{current.tag}> has no parent")
            position = 0
            for sibling in parent.element_children():
                if sibling.tag == current.tag:
                    position += 1
                if sibling is current:
                    break
            segments.append(f"{current.tag}[{position}]")
        current = current.parent
    return "/".join(reversed(segments))


def resolve_xpath(document: Document, xpath: str) -> Node | None:
    """Walk an indexed absolute path; None when any segment fails to match.

    A bare segment is treated as index 1, so both ``body`` and ``body[1]``
    resolve.
    """
    if not xpath:
        return None
    node: Node | None = None
    for raw in xpath.split("/"):
        match = _SEGMENT_RE.match(raw)
        if not match:
            return None
        tag, index = match.group(1).lower(), int(match.group(2) or 1)
        if node is None:
            if tag != document.root.tag or index != 1:
                return None
            node = document.root
            continue
        found = None
        count = 0
        for child in node.element_children():
            if child.tag == tag:
                count += 1
                if count == index:
                    found = child
                    break
        if found is None:
            return None
        node = found
    return node
