"""Episode trace bookkeeping and the memory prompt section."""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hxagent.errors import EmptyTaskError, TraceClosedError
from hxagent.extractor import ElementDescriptor, FeasibleAction, WebState
from hxagent.memory import (
    MODE_ACTIONS_ONLY,
    append,
    new_trace,
    render_memory_section,
    trace_from_dict,
    trace_to_dict,
)


def mk_action(i, operation="click"):
    return FeasibleAction(
        operation=operation,
        target=ElementDescriptor(
            tag_name="a",
            attributes={"id": f"link-{i}"},
            xpath=f"html/body/div[1]/a[{i}]",
            text=f"Item {i}",
        ),
    )


def mk_state(i):
    return WebState(
        kind="simplified_markup",
        body=f'<a xpath="html/body/div[1]/a[{i}]" id="link-{i}">Item {i}</a>',
        source_size=120 + i,
    )


def mk_trace(n, task="Open every item in order.", title="golden site"):
    trace = new_trace(task, title)
    for i in range(1, n + 1):
        append(trace, mk_state(i), mk_action(i))
    return trace


def test_new_trace_starts_running_and_empty():
    trace = new_trace("Select Betty from the list and click Submit", "choose-list")
    assert trace.pairs == []
    assert trace.outcome == "running"
    assert trace.verdict is None


def test_minimal_task_with_empty_title_is_accepted():
    assert new_trace("x", "").site_title == ""


def test_empty_task_rejected():
    with pytest.raises(EmptyTaskError):
        new_trace("", "title")


@pytest.mark.parametrize("n", range(8))
def test_step_indices_are_contiguous(n):
    trace = mk_trace(n)
    assert [p.step_index for p in trace.pairs] == list(range(1, n + 1))


def test_append_after_termination_is_an_error():
    trace = mk_trace(2)
    trace.close("done")
    with pytest.raises(TraceClosedError):
        append(trace, mk_state(3), mk_action(3))


def test_interleaved_traces_do_not_cross_contaminate():
    a, b = new_trace("task a", "t"), new_trace("task b", "t")
    for i in range(1, 4):
        append(a, mk_state(i), mk_action(i))
        append(b, mk_state(10 + i), mk_action(10 + i))
    assert [p.action.target.text for p in a.pairs] == ["Item 1", "Item 2", "Item 3"]
    assert [p.action.target.text for p in b.pairs] == ["Item 11", "Item 12", "Item 13"]


def test_window_three_shows_last_three_renumbered():
    trace = mk_trace(5)
    section = render_memory_section(trace, window=3)
    assert section.count("> STEP #") == 3
    assert "> STEP #1: click on a 'Item 3'" in section
    assert "> STEP #3: click on a 'Item 5'" in section
    assert "Item 1" not in section


def test_empty_trace_renders_header_lines_only():
    section = render_memory_section(mk_trace(0), window="all")
    assert section.count("> STEP #") == 0
    assert section.startswith("You are visiting the website title: golden site")
    assert "You have completed the following steps:" in section


def test_window_all_on_seven_pairs_matches_golden():
    section = render_memory_section(mk_trace(7), window="all")
    with open("tests/golden/memory_section_window_all.txt") as handle:
        assert section + "\n" == handle.read()


@given(
    n=st.integers(min_value=0, max_value=20),
    window=st.one_of(st.just("all"), st.integers(min_value=1, max_value=25)),
)
def test_window_law(n, window):
    section = render_memory_section(mk_trace(n), window=window)
    expected = n if window == "all" else min(window, n)
    assert section.count("> STEP #") == expected
    assert "You are asked to complete the following task:" in section


def test_rendered_steps_preserve_append_order():
    section = render_memory_section(mk_trace(6), window="all")
    positions = [section.index(f"'Item {i}'") for i in range(1, 7)]
    assert positions == sorted(positions)


def test_actions_only_mode_omits_states():
    section = render_memory_section(mk_trace(4), window="all", mode=MODE_ACTIONS_ONLY)
    assert "> STATE #" not in section
    assert section.count("> STEP #") == 4


def test_rendering_is_pure():
    trace = mk_trace(5)
    assert render_memory_section(trace, 3) == render_memory_section(trace, 3)


def test_bad_window_rejected():
    with pytest.raises(ValueError):
        render_memory_section(mk_trace(2), window=0)


def test_trace_round_trips_through_dict():
    trace = mk_trace(3)
    trace.pairs[0].action = trace.pairs[0].action.with_content("Macie")
    trace.close("done")
    trace.verdict = "correct"
    trace.episode_id = "golden-e001"
    again = trace_from_dict(trace_to_dict(trace))
    assert trace_to_dict(again) == trace_to_dict(trace)
