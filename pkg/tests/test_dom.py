"""Document tree, indexed paths, and path resolution."""
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hxagent.dom import Node, compute_xpath, normalize_text, parse_html, resolve_xpath
from hxagent.errors import DetachedNodeError

SAMPLE = """
<html>
<head><title>sample</title></head>
<body>
<div id="a"><span>one</span><span>two</span></div>
<div id="b"><div><button>Go</button></div></div>
</body>
</html>
"""


def test_root_xpath_is_bare_html():
    doc = parse_html(SAMPLE)
    assert compute_xpath(doc.root) == "html"


def test_indexed_path_for_nested_button():
    doc = parse_html(SAMPLE)
    button = next(n for n in doc.iter_elements() if n.tag == "button")
    assert compute_xpath(button) == "html/body/div[2]/div[1]/button[1]"


def test_same_tag_siblings_get_ordinal_indices():
    doc = parse_html(SAMPLE)
    spans = [n for n in doc.iter_elements() if n.tag == "span"]
    assert [compute_xpath(s) for s in spans] == [
        "html/body/div[1]/span[1]",
        "html/body/div[1]/span[2]",
    ]


def test_resolve_round_trips_every_node():
    doc = parse_html(SAMPLE)
    for node in doc.iter_elements():
        assert resolve_xpath(doc, compute_xpath(node)) is node


def test_resolve_accepts_bare_segment_as_index_one():
    doc = parse_html(SAMPLE)
    assert resolve_xpath(doc, "html/body/div[1]") is resolve_xpath(doc, "html/body[1]/div[1]")


def test_resolve_missing_returns_none():
    doc = parse_html(SAMPLE)
    assert resolve_xpath(doc, "html/body/div[3]") is None
    assert resolve_xpath(doc, "html/body/nav[1]") is None
    assert resolve_xpath(doc, "") is None


def test_detached_node_errors():
    orphan = Node("div")
    with pytest.raises(DetachedNodeError):
        compute_xpath(orphan)


def _random_tree_html(rng: random.Random, depth: int = 0) -> str:
    tags = ["div", "span", "p", "section"]
    n_children = rng.randint(0, 3 if depth < 3 else 0)
    inner = "".join(_random_tree_html(rng, depth + 1) for _ in range(n_children))
    tag = rng.choice(tags)
    return f"<{tag}>{inner}</{tag}>"


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_over_random_fixture_trees(seed):
    rng = random.Random(seed)
    body = "".join(_random_tree_html(rng) for _ in range(rng.randint(3, 8)))
    doc = parse_html(f"<html><body>{body}</body></html>")
    nodes = list(doc.iter_elements())
    assert len(nodes) >= 5
    for node in nodes:
        path = compute_xpath(node)
        assert resolve_xpath(doc, path) is node


def test_fragment_without_html_wrapper_is_wrapped():
    doc = parse_html("<div><a href='#'>x</a></div>")
    assert doc.root.tag == "html"
    anchor = next(n for n in doc.iter_elements() if n.tag == "a")
    assert compute_xpath(anchor) == "html/body/div[1]/a[1]"


def test_void_elements_do_not_swallow_siblings():
    doc = parse_html("<html><body><input type='text'/><button>Go</button></body></html>")
    button = next(n for n in doc.iter_elements() if n.tag == "button")
    assert button.parent.tag == "body"


def test_visible_text_skips_script_and_collapses_whitespace():
    doc = parse_html(
        "<html><body><div>  hello\n   <script>var x = 1;</script> world  </div></body></html>"
    )
    div = next(n for n in doc.iter_elements() if n.tag == "div")
    assert div.visible_text() == "hello world"


@given(st.text())
def test_normalize_text_has_no_edge_or_double_spaces(text):
    normalized = normalize_text(text)
    assert normalized == normalized.strip()
    assert "  " not in normalized


def test_title_and_find_by_id():
    doc = parse_html(SAMPLE)
    assert doc.title() == "sample"
    assert doc.find_by_id("b").tag == "div"
    assert doc.find_by_id("missing") is None


def test_serialize_reparse_is_stable():
    doc = parse_html(SAMPLE)
    again = parse_html(doc.serialize())
    assert again.serialize() == doc.serialize()
