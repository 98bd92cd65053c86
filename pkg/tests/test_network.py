import json

import pytest

from schedrisk import (
    Activity,
    DurationDistribution,
    ParseError,
    ProjectNetwork,
    UnknownActivityError,
    immediate_successor_count,
    load_project,
    parse_project,
    serialize_project,
    topological_order,
    transitive_successor_count,
    validate,
)
from schedrisk.network import SINK_ID, SOURCE_ID

det = DurationDistribution.deterministic
norm = DurationDistribution.normal


def net(*activities, name="test", time_unit="d"):
    return ProjectNetwork(name, time_unit, tuple(activities))


@pytest.fixture
def case_study():
    return load_project("examples/case-study")


def test_case_study_parses(case_study):
    assert len(case_study.activities) == 5
    assert len(case_study.all_activities) == 7
    a3 = case_study.activity("A3")
    assert a3.distribution == norm(10, 1.4)
    assert a3.predecessors == ("A1",)
    assert case_study.virtual_source.distribution.variance() == 0.0
    assert validate(case_study).ok


def test_single_activity_network():
    n = parse_project(json.dumps({
        "name": "one", "time_unit": "d",
        "activities": [{"id": "A", "distribution": {"type": "deterministic", "value": 3}, "predecessors": []}],
    }))
    assert topological_order(n) == [SOURCE_ID, "A", SINK_ID]
    assert n.predecessors_of["A"] == (SOURCE_ID,)
    assert n.predecessors_of[SINK_ID] == ("A",)


def test_unresolved_predecessor_names_the_offender():
    doc = {
        "name": "x", "time_unit": "d",
        "activities": [
            {"id": "A1", "distribution": {"type": "deterministic", "value": 1}, "predecessors": []},
            {"id": "A2", "distribution": {"type": "deterministic", "value": 1}, "predecessors": ["A9"]},
        ],
    }
    with pytest.raises(ParseError, match="A9"):
        parse_project(json.dumps(doc))


def test_syntax_error_reports_line():
    with pytest.raises(ParseError, match="line"):
        parse_project('{"name": "x",\n "oops}')


@pytest.mark.parametrize(
    "mutation, message",
    [
        (lambda d: d["activities"].append(dict(d["activities"][0])), "duplicate"),
        (lambda d: d["activities"][0]["distribution"].update(type="cauchy"), "unknown distribution kind"),
        (lambda d: d["activities"][0]["distribution"].pop("value"), "missing"),
        (lambda d: d["activities"][0]["distribution"].update(extra=1), "unknown parameter"),
        (lambda d: d["activities"][0].update(id="__source__"), "reserved"),
        (lambda d: d["activities"][0].update(id=""), "non-empty"),
        (lambda d: d.pop("activities"), "array"),
    ],
)
def test_parse_errors(mutation, message):
    doc = {
        "name": "x", "time_unit": "d",
        "activities": [{"id": "A", "distribution": {"type": "deterministic", "value": 1}, "predecessors": []}],
    }
    mutation(doc)
    with pytest.raises(ParseError, match=message):
        parse_project(json.dumps(doc))


def test_serialize_parse_roundtrip(case_study):
    again = parse_project(serialize_project(case_study))
    assert again == case_study
    mixed = net(
        Activity("B1", DurationDistribution.beta(1, 4, 2, 3), (), name="build"),
        Activity("B2", DurationDistribution.triangular(1, 2, 8), ("B1",)),
        Activity("B3", DurationDistribution.two_point(2, 4, 0.25), ("B1",)),
    )
    assert parse_project(serialize_project(mixed)) == mixed


def test_validate_reports_cycle():
    n = net(Activity("A", det(1), ("B",)), Activity("B", det(1), ("A",)))
    report = validate(n)
    assert not report.ok
    cycles = [i for i in report.issues if i.code == "cycle"]
    assert len(cycles) == 1
    assert set(cycles[0].activity_ids) == {"A", "B"}


def test_validate_reports_bad_distribution_param():
    n = net(Activity("A", norm(5, -1.0)))
    report = validate(n)
    assert any(i.code == "distribution" and "sd" in i.message for i in report.issues)


def test_validate_reports_self_loop_and_unresolved():
    n = net(Activity("A", det(1), ("A",)), Activity("B", det(1), ("Z",)))
    codes = {i.code for i in validate(n).issues}
    assert "self-loop" in codes
    assert "unresolved-predecessor" in codes


def test_validate_reports_unreachable_cycle_members():
    # C depends on the A<->B cycle, so the cycle is reported with its members
    n = net(
        Activity("A", det(1), ("B",)),
        Activity("B", det(1), ("A",)),
        Activity("C", det(1), ("B",)),
    )
    report = validate(n)
    assert any(i.code == "cycle" for i in report.issues)


def test_topological_order_case_study(case_study):
    assert topological_order(case_study) == [SOURCE_ID, "A1", "A2", "A3", "A4", "A5", SINK_ID]


def test_topological_order_chain():
    n = net(Activity("A", det(1)), Activity("B", det(1), ("A",)), Activity("C", det(1), ("B",)))
    assert topological_order(n) == [SOURCE_ID, "A", "B", "C", SINK_ID]


def test_topological_order_respects_every_edge(case_study):
    order = topological_order(case_study)
    position = {aid: i for i, aid in enumerate(order)}
    for aid, preds in case_study.predecessors_of.items():
        for p in preds:
            assert position[p] < position[aid]
    assert sorted(order) == sorted(a.id for a in case_study.all_activities)


def test_successor_counts(case_study):
    assert transitive_successor_count(case_study, "A1") == 4
    assert transitive_successor_count(case_study, "A2") == 2
    assert transitive_successor_count(case_study, "A5") == 0
    assert immediate_successor_count(case_study, "A1") == 2
    assert immediate_successor_count(case_study, "A3") == 1
    with pytest.raises(UnknownActivityError):
        transitive_successor_count(case_study, "A9")
    with pytest.raises(UnknownActivityError):
        transitive_successor_count(case_study, SOURCE_ID)


def test_with_distributions_override(case_study):
    changed = case_study.with_distributions({"A3": det(10.0)})
    assert changed.activity("A3").distribution == det(10.0)
    assert changed.activity("A2").distribution == case_study.activity("A2").distribution
    assert changed.real_ids == case_study.real_ids
    with pytest.raises(UnknownActivityError):
        case_study.with_distributions({"nope": det(1.0)})


def test_duplicate_ids_rejected_at_construction():
    with pytest.raises(ParseError, match="duplicate"):
        net(Activity("A", det(1)), Activity("A", det(2)))


def test_topological_order_raises_on_cycle():
    from schedrisk import CycleError

    n = net(Activity("A", det(1), ("B",)), Activity("B", det(1), ("A",)))
    with pytest.raises(CycleError):
        topological_order(n)
