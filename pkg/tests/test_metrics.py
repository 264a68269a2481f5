"""Metric definitions against independent brute-force re-implementations."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hxagent.errors import NoResultsError
from hxagent.extractor import ElementDescriptor, FeasibleAction
from hxagent.metrics import (
    GroundTruth,
    InstanceResult,
    ReferenceAction,
    action_equal,
    build_report,
    exact_match,
    ground_truth_from_dict,
    ground_truth_to_dict,
    per_step_accuracy,
    prefix_accuracy,
    write_report_csv,
    write_report_json,
)


def predicted(operation="click", xpath="html/body/a[1]", text="Go", content=None):
    return FeasibleAction(
        operation=operation,
        target=ElementDescriptor(tag_name="a", attributes={}, xpath=xpath, text=text),
        input_content=content,
    )


def reference(operation="click", xpath="html/body/a[1]", text="Go", content=None, exact=True):
    return ReferenceAction(
        operation=operation, xpath=xpath, text=text, input_content=content, content_exact=exact
    )


# --- action_equal ------------------------------------------------------------------


def test_identity_click_matches():
    assert action_equal(predicted(), reference())


def test_same_text_different_xpath_distinguishes_the_decoy():
    decoy_xpath = "html/body/div[1]/div[3]/div[1]/a[1]"       # page-2 decoy
    target_xpath = "html/body/div[1]/div[3]/div[2]/a[1]"      # the real 8th result
    truth = reference(xpath=target_xpath, text="Macie")
    assert action_equal(predicted(xpath=target_xpath, text="Macie"), truth)
    assert not action_equal(predicted(xpath=decoy_xpath, text="Macie"), truth)


def test_text_matching_when_truth_has_no_xpath():
    truth = reference(xpath="", text="  Go   now ")
    assert action_equal(predicted(text="Go now"), truth)
    assert not action_equal(predicted(text="Stop"), truth)


def test_operation_comparison_is_case_insensitive():
    assert action_equal(predicted(operation="Click"), reference(operation="click"))


def test_input_content_checked_modulo_surrounding_whitespace():
    truth = reference(operation="input", content="Macie")
    assert action_equal(predicted(operation="input", content="  Macie "), truth)
    assert not action_equal(predicted(operation="input", content="macie"), truth)


def test_content_flag_off_ignores_content():
    truth = reference(operation="input", content="Macie", exact=False)
    assert action_equal(predicted(operation="input", content="anything"), truth)


def independent_action_equal(p, t):
    """Re-implementation used as the oracle: the three clauses applied
    separately."""
    ops = p.operation.lower() == t.operation.lower()
    if t.xpath:
        element = p.target.xpath == t.xpath
    else:
        element = " ".join(p.target.text.split()) == " ".join(t.text.split())
    content = True
    if p.operation.lower() in ("input", "select") and t.content_exact:
        content = (p.input_content or "").strip() == (t.input_content or "").strip()
    return ops and element and content


@settings(max_examples=300)
@given(
    op_p=st.sampled_from(["click", "input", "select"]),
    op_t=st.sampled_from(["click", "Input", "select"]),
    xp_p=st.sampled_from(["html/body/a[1]", "html/body/a[2]"]),
    xp_t=st.sampled_from(["", "html/body/a[1]", "html/body/a[2]"]),
    text_p=st.sampled_from(["Go", "Stop", " Go  "]),
    text_t=st.sampled_from(["Go", "Stop"]),
    content_p=st.sampled_from([None, "x", "y", " x "]),
    content_t=st.sampled_from([None, "x", "y"]),
    exact=st.booleans(),
)
def test_action_equal_matches_independent_comparator(
    op_p, op_t, xp_p, xp_t, text_p, text_t, content_p, content_t, exact
):
    p = predicted(op_p, xp_p, text_p, content_p)
    t = reference(op_t, xp_t, text_t, content_t, exact)
    assert action_equal(p, t) == independent_action_equal(p, t)


# --- exact match --------------------------------------------------------------------


def test_exact_match_946_of_975_rounds_to_97():
    flags = [True] * 946 + [False] * (975 - 946)
    pct = exact_match(flags)
    assert round(pct, 1) == 97.0
    assert int(round(pct)) == 97


def test_exact_match_all_correct_is_100():
    assert exact_match([True] * 25) == 100.0


def test_exact_match_empty_is_an_error():
    with pytest.raises(NoResultsError):
        exact_match([])


@given(st.lists(st.booleans(), min_size=1, max_size=300))
def test_exact_match_equals_direct_count(flags):
    assert exact_match(flags) == pytest.approx(100.0 * sum(flags) / len(flags))


# --- prefix accuracy ------------------------------------------------------------------


def seq(*specs):
    return [predicted(xpath=f"html/body/a[{i}]") for i in specs]


def truth_seq(*specs):
    return [reference(xpath=f"html/body/a[{i}]") for i in specs]


def test_three_of_four_prefix_is_exactly_three_quarters():
    assert prefix_accuracy(seq(1, 2, 3, 9), truth_seq(1, 2, 3, 4)) == 0.75


def test_identical_sequences_score_one():
    assert prefix_accuracy(seq(1, 2, 3), truth_seq(1, 2, 3)) == 1.0


def test_shorter_prediction_stops_the_prefix():
    assert prefix_accuracy(seq(1, 2), truth_seq(1, 2, 3, 4)) == 0.5


def test_longer_prediction_with_matched_truth_is_full_prefix():
    assert prefix_accuracy(seq(1, 2, 3, 4, 5), truth_seq(1, 2, 3)) == 1.0


def brute_force_prefix(p, t):
    count = 0
    for i in range(len(t)):
        if i < len(p) and independent_action_equal(p[i], t[i]):
            count += 1
        else:
            break
    return count / len(t)


@given(
    p=st.lists(st.integers(1, 4), max_size=10),
    t=st.lists(st.integers(1, 4), min_size=1, max_size=10),
)
def test_prefix_matches_brute_force_scan(p, t):
    assert prefix_accuracy(seq(*p), truth_seq(*t)) == pytest.approx(brute_force_prefix(seq(*p), truth_seq(*t)))


@given(
    prefix=st.lists(st.integers(1, 4), min_size=1, max_size=8),
)
def test_prefix_monotone_when_appending_a_correct_action(prefix):
    truth = truth_seq(*prefix, 9)
    shorter = prefix_accuracy(seq(*prefix), truth)
    longer = prefix_accuracy(seq(*prefix, 9), truth)
    assert longer >= shorter


# --- per-step accuracy -----------------------------------------------------------------


def result(p, t, instance="i", task="t"):
    return InstanceResult(instance_id=instance, predicted=seq(*p), truth=truth_seq(*t), task_id=task)


def test_perfect_suite_is_one_at_every_step():
    results = [result([1, 2, 3], [1, 2, 3]), result([1, 2], [1, 2])]
    assert per_step_accuracy(results) == [(1, 1.0, 2), (2, 1.0, 2), (3, 1.0, 1)]


def test_half_the_instances_err_at_step_three():
    good = [result([1, 2, 3], [1, 2, 3]) for _ in range(2)]
    bad = [result([1, 2, 9], [1, 2, 3]) for _ in range(2)]
    rows = per_step_accuracy(good + bad)
    assert rows[0] == (1, 1.0, 4)
    assert rows[1] == (2, 1.0, 4)
    assert rows[2] == (3, 0.5, 4)


def test_denominator_shrinks_after_an_early_error():
    erring = result([9, 2, 3], [1, 2, 3])
    fine = result([1, 2, 3], [1, 2, 3])
    rows = per_step_accuracy([erring, fine])
    assert rows[0] == (1, 0.5, 2)
    # the erring instance no longer qualifies at step 2
    assert rows[1] == (2, 1.0, 1)


def test_missing_prediction_counts_as_a_miss():
    rows = per_step_accuracy([result([1], [1, 2])])
    assert rows == [(1, 1.0, 1), (2, 0.0, 1)]


# --- instance correctness and the report -------------------------------------------------


def test_extra_trailing_actions_make_the_instance_incorrect():
    extra = result([1, 2, 3, 4], [1, 2, 3])
    assert not extra.correct
    assert extra.prefix == 1.0


def test_instance_correct_implies_full_prefix_and_equal_length():
    r = result([1, 2, 3], [1, 2, 3])
    assert r.correct and r.prefix == 1.0 and len(r.predicted) == len(r.truth)


def test_report_mixed_suite_matches_hand_computation():
    results = [
        result([1, 2, 3], [1, 2, 3], "a", task="t1"),   # correct
        result([1, 9], [1, 2], "b", task="t1"),         # prefix 0.5
        result([1, 2], [1, 2, 3, 4], "c", task="t2"),   # prefix 0.5
        result([5], [5], "d", task="t2"),               # correct
    ]
    report = build_report(results, token_totals={"totals": {"calls": 7}})
    assert report.exact_match_pct == pytest.approx(50.0)
    assert report.prefix_match_pct == pytest.approx(100 * (1 + 0.5 + 0.5 + 1) / 4)
    assert report.counts == {"instances": 4, "correct_instances": 2}
    assert report.per_task["t1"]["exact_match_pct"] == pytest.approx(50.0)
    assert report.token_totals == {"totals": {"calls": 7}}


def test_exact_match_never_exceeds_prefix_match():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 6)
        results = []
        for i in range(n):
            t = [rng.randint(1, 3) for _ in range(rng.randint(1, 5))]
            if rng.random() < 0.5:
                p = list(t)
            else:
                p = [rng.randint(1, 3) for _ in range(rng.randint(0, 5))]
            results.append(result(p, t, str(i)))
        report = build_report(results)
        if report.exact_match_pct == 100.0:
            assert report.prefix_match_pct == 100.0
        assert report.exact_match_pct <= report.prefix_match_pct + 1e-9


def test_exact_100_implies_prefix_100_on_equal_length_sequences():
    """Sequence-equal instances force both metrics to 100; the reverse holds
    except for predictions that extend past a fully matched reference, whose
    prefix is complete by definition even though the instance is incorrect."""
    results = [result([1, 2], [1, 2]), result([3], [3])]
    report = build_report(results)
    assert report.exact_match_pct == 100.0 and report.prefix_match_pct == 100.0


def test_report_files_round_trip(tmp_path):
    report = build_report([result([1], [1], "a", task="t1")])
    json_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    write_report_json(report, str(json_path))
    write_report_csv(report, str(csv_path))
    import json as json_module

    loaded = json_module.loads(json_path.read_text())
    assert loaded["exact_match_int"] == 100
    assert "t1" in loaded["per_task"]
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("task,")
    assert lines[-1].startswith("total,1,1,100.0,100.0")


def test_ground_truth_file_round_trip():
    truths = {
        "i01": GroundTruth("i01", [reference(), reference(operation="input", content="x")]),
    }
    raw = ground_truth_to_dict("login", truths, {"i01": "Log in."})
    again = ground_truth_from_dict(raw)
    assert again["i01"].actions == truths["i01"].actions
