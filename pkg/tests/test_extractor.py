"""Feasible-action mining, context binding, duplicates, and state extraction."""
import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hxagent.dom import parse_html
from hxagent.errors import StateBudgetExceededError
from hxagent.extractor import (
    RenderFacts,
    action_wire_json,
    bind_context,
    detect_duplicates,
    extract_feasible_actions,
    extract_state,
    facts_from_dict,
)

FIXTURE = "tests/fixtures/search_results_page.html"


def load_fixture():
    with open(FIXTURE) as handle:
        document = parse_html(handle.read())
    with open(f"{FIXTURE}.render.json") as handle:
        render_info = {k: facts_from_dict(v) for k, v in json.load(handle).items()}
    return document, render_info


def all_visible(document):
    from hxagent.dom import compute_xpath

    return {compute_xpath(node): RenderFacts() for node in document.iter_elements()}


def test_fixture_page_search_button_matches_golden():
    document, render_info = load_fixture()
    actions = extract_feasible_actions(document, render_info)
    button = next(a for a in actions if a.target.tag_name == "button")
    assert button.target.xpath == "html/body/div[1]/div[2]/div[1]/button[1]"
    with open("tests/golden/search_button_action.json") as handle:
        assert action_wire_json(button, indent=2) + "\n" == handle.read()


def test_wire_json_key_names_are_exact():
    document, render_info = load_fixture()
    actions = extract_feasible_actions(document, render_info)
    wire = json.loads(action_wire_json(actions[0]))
    assert set(wire) == {"operation", "target object"}
    assert set(wire["target object"]) == {"attributes", "tagName", "xpath", "text"}


def test_empty_body_yields_empty_list():
    document = parse_html("<html><body></body></html>")
    assert extract_feasible_actions(document, all_visible(document)) == []


def test_hand_enumerated_fixture_counts_and_order():
    html = """
    <html><body>
    <a href="#1">first</a>
    <a href="#2">second</a>
    <a href="#3">third</a>
    <input id="q" type="text"/>
    <button id="go">Go</button>
    </body></html>
    """
    document = parse_html(html)
    actions = extract_feasible_actions(document, all_visible(document))
    assert [(a.operation, a.target.tag_name) for a in actions] == [
        ("click", "a"),
        ("click", "a"),
        ("click", "a"),
        ("input", "input"),
        ("click", "button"),
    ]
    assert [a.target.text for a in actions[:3]] == ["first", "second", "third"]


def test_hidden_and_uncovered_elements_are_skipped(caplog):
    html = "<html><body><button id='a'>A</button><button id='b'>B</button><button id='c'>C</button></body></html>"
    document = parse_html(html)
    info = all_visible(document)
    info["html/body/button[2]"] = RenderFacts(visible=False)
    del info["html/body/button[3]"]
    with caplog.at_level("WARNING"):
        actions = extract_feasible_actions(document, info)
    assert [a.target.text for a in actions] == ["A"]
    assert any("button[3]" in record.getMessage() for record in caplog.records)


def test_completeness_matches_render_info_marking():
    html = "<html><body>" + "".join(f"<button id='b{i}'>B{i}</button>" for i in range(10)) + "</body></html>"
    document = parse_html(html)
    info = all_visible(document)
    for i, xpath in enumerate(list(info)):
        if xpath.endswith("]") and i % 2 == 0:
            info[xpath] = RenderFacts(visible=False)
    expected = sum(
        1
        for xpath, facts in info.items()
        if "button" in xpath and facts.visible and facts.interactable
    )
    assert len(extract_feasible_actions(document, info)) == expected


def test_handler_elements_become_candidates():
    html = "<html><body><div id='card'>Pick me</div></body></html>"
    document = parse_html(html)
    info = all_visible(document)
    info["html/body/div[1]"] = RenderFacts(has_handler=True)
    actions = extract_feasible_actions(document, info)
    assert [a.target.tag_name for a in actions] == ["div"]
    assert actions[0].operation == "click"


def test_options_inside_select_collapse_into_one_action():
    html = """
    <html><body><select id="s"><option value="1">one</option><option value="2">two</option></select></body></html>
    """
    document = parse_html(html)
    actions = extract_feasible_actions(document, all_visible(document))
    assert [a.operation for a in actions] == ["select"]


def test_determinism_same_inputs_same_bytes():
    document, render_info = load_fixture()
    first = [action_wire_json(a) for a in extract_feasible_actions(document, render_info)]
    second = [action_wire_json(a) for a in extract_feasible_actions(document, render_info)]
    assert first == second


# --- context binding ----------------------------------------------------------


def test_button_context_is_inner_text():
    document, render_info = load_fixture()
    button_node = document.find_by_id("search")
    assert bind_context(button_node, document) == "Search"


def test_input_without_any_label_has_empty_context():
    document = parse_html("<html><body><input id='x' type='text'/></body></html>")
    node = document.find_by_id("x")
    assert bind_context(node, document) == ""


def test_input_nested_under_fieldset_legend():
    html = """
    <html><body>
    <fieldset><legend>Billing address</legend>
      <div><div><input id="street" type="text"/></div></div>
    </fieldset>
    </body></html>
    """
    document = parse_html(html)
    node = document.find_by_id("street")
    assert bind_context(node, document) == "Billing address"


def test_explicit_label_for_wins():
    html = """
    <html><body><h2>Form</h2>
    <label for="mail">Email</label><input id="mail" type="email"/>
    </body></html>
    """
    document = parse_html(html)
    assert bind_context(document.find_by_id("mail"), document) == "Email"


# --- duplicates ----------------------------------------------------------------


def brute_force_groups(actions):
    groups = {}
    for i, j in itertools.combinations(range(len(actions)), 2):
        if actions[i].fingerprint() == actions[j].fingerprint():
            groups.setdefault(actions[i].fingerprint(), set()).update((i, j))
    return sorted(sorted(g) for g in groups.values())


def make_actions(labels):
    html = "<html><body>" + "".join(f"<button>{t}</button>" for t in labels) + "</body></html>"
    document = parse_html(html)
    return extract_feasible_actions(document, all_visible(document))


def test_two_identical_day_cells_form_one_group():
    actions = make_actions(["1", "2", "1"])
    assert detect_duplicates(actions) == [[0, 2]]


def test_all_distinct_actions_yield_nothing():
    actions = make_actions(["a", "b", "c"])
    assert detect_duplicates(actions) == []


@given(st.lists(st.sampled_from(["1", "2", "3", "next", "prev"]), min_size=0, max_size=24))
def test_duplicates_match_pairwise_brute_force(labels):
    actions = make_actions(labels)
    assert sorted(detect_duplicates(actions)) == brute_force_groups(actions)


# --- state extraction -----------------------------------------------------------


def test_small_document_becomes_simplified_markup():
    html = """
    <html><body>
    <label for="u">User</label><input id="u" type="text"/>
    <label for="p">Pass</label><input id="p" type="password"/>
    <button id="login">Login</button>
    </body></html>
    """
    document = parse_html(html)
    state = extract_state(document, budget=20_000, render_info=all_visible(document))
    assert state.kind == "simplified_markup"
    assert state.body.count("<input") == 2
    assert 'xpath="html/body/input[1]"' in state.body
    assert "Login" in state.body


def test_oversized_document_uses_the_summarizer():
    document = parse_html("<html><body>" + "<p>filler</p>" * 400 + "<button>Go</button></body></html>")
    state = extract_state(
        document,
        screenshot=b"png-bytes",
        summarizer=lambda image: "A long page with one Go button.",
        budget=100,
        render_info=all_visible(document),
    )
    assert state.kind == "summary"
    assert state.body == "A long page with one Go button."
    assert state.source_size > 100


def test_oversized_without_summarizer_is_an_error():
    document = parse_html("<html><body>" + "<p>x</p>" * 200 + "</body></html>")
    with pytest.raises(StateBudgetExceededError):
        extract_state(document, budget=10, render_info=all_visible(document))


def test_empty_page_gives_empty_simplified_body():
    document = parse_html("<html><body></body></html>")
    state = extract_state(document, budget=1000, render_info={})
    assert state.kind == "simplified_markup"
    assert state.body == ""


def test_state_kind_is_a_pure_function_of_size_vs_budget():
    document = parse_html("<html><body><button>Go</button></body></html>")
    size = document.source_size
    over = extract_state(
        document, screenshot=b"s", summarizer=lambda _: "summary", budget=size - 1,
        render_info=all_visible(document),
    )
    under = extract_state(document, budget=size, render_info=all_visible(document))
    assert (over.kind, under.kind) == ("summary", "simplified_markup")
