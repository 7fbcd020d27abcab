import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, LOGS, REPAIR, RUNNING
from logmine.eventlog import (
    EmptyLog,
    MalformedXml,
    MissingColumn,
    from_sequences,
    load_log,
    normalize_activity,
    parse_csv,
    parse_xes,
    write_xes,
)


def xes(*traces):
    body = "".join(
        "<trace>" + "".join(f'<event><string key="concept:name" value="{a}"/></event>' for a in t) + "</trace>"
        for t in traces
    )
    return f"<log>{body}</log>".encode()


def test_running_example_counts():
    log = parse_xes(RUNNING.read_bytes())
    assert len(log.traces) == 6
    assert len(log.activity_alphabet) == 8
    assert {"Register_request", "Decide", "Reject_request"} <= set(log.activity_alphabet)


@pytest.mark.parametrize("name", ["running-example.xes", "repair-example.xes"])
def test_counts_match_independent_script(name):
    expected = json.loads((FIXTURES / "log_counts.json").read_text())[name]
    log = load_log(LOGS / name)
    assert len(log.traces) == expected["traces"]
    assert log.event_count == expected["events"]
    assert len(log.activity_alphabet) == expected["activities"]


def test_single_event():
    log = parse_xes(xes(["a"]))
    assert len(log.traces) == 1
    assert list(log.activity_alphabet) == ["a"]


def test_empty_log():
    with pytest.raises(EmptyLog):
        parse_xes(b"<log/>")


def test_malformed():
    with pytest.raises(MalformedXml):
        parse_xes(b"<log><trace>")


def test_events_without_name_are_skipped():
    raw = b'<log><trace><event><string key="org:resource" value="x"/></event>' \
          b'<event><string key="concept:name" value="a"/></event></trace></log>'
    log = parse_xes(raw)
    assert log.traces[0].activities == ("a",)
    assert log.skipped_events == 1


def test_lifecycle_does_not_split_activities():
    raw = (
        b'<log><trace>'
        b'<event><string key="concept:name" value="a"/><string key="lifecycle:transition" value="start"/></event>'
        b'<event><string key="concept:name" value="a"/><string key="lifecycle:transition" value="complete"/></event>'
        b"</trace></log>"
    )
    log = parse_xes(raw)
    assert log.traces[0].activities == ("a", "a")
    assert log.traces[0].events[0].attr("lifecycle:transition") == "start"


def test_timestamps_sort_events():
    raw = (
        b"<log><trace>"
        b'<event><string key="concept:name" value="late"/><date key="time:timestamp" value="2020-01-02T00:00:00"/></event>'
        b'<event><string key="concept:name" value="early"/><date key="time:timestamp" value="2020-01-01T00:00:00"/></event>'
        b"</trace></log>"
    )
    assert parse_xes(raw).traces[0].activities == ("early", "late")


def test_normalization():
    assert normalize_activity("  Register   request ") == "Register_request"
    assert normalize_activity("Decide") == "Decide"


def test_csv_grouping():
    text = b"case,act\n1,a\n2,a\n1,b\n"
    log = parse_csv(io.BytesIO(text), "case", "act")
    assert [t.activities for t in log.traces] == [("a", "b"), ("a",)]


def test_csv_time_sort():
    text = b"case,act,ts\n1,b,2021-01-02\n1,a,2021-01-01\n"
    log = parse_csv(io.BytesIO(text), "case", "act", "ts")
    assert log.traces[0].activities == ("a", "b")


def test_csv_duplicate_header():
    with pytest.raises(MissingColumn, match="case"):
        parse_csv(io.BytesIO(b"case,case,act\n1,1,a\n"), "case", "act")


def test_csv_missing_column():
    with pytest.raises(MissingColumn):
        parse_csv(io.BytesIO(b"case,act\n1,a\n"), "case", "activity")


def test_csv_empty():
    with pytest.raises(EmptyLog):
        parse_csv(io.BytesIO(b"case,act\n"), "case", "act")


def test_parse_twice_is_equal():
    raw = REPAIR.read_bytes()
    assert parse_xes(raw) == parse_xes(raw)


names = st.sampled_from(["a", "b", "c", "Check ticket", "x_y"])


@given(st.lists(st.lists(names, min_size=1, max_size=6), min_size=1, max_size=6))
def test_write_then_parse_round_trip(seqs):
    log = from_sequences(seqs)
    buf = io.BytesIO()
    write_xes(log, buf)
    back = parse_xes(buf.getvalue())
    assert back.sequences == log.sequences
    assert back.activity_alphabet == log.activity_alphabet


@given(st.lists(st.lists(names, min_size=1, max_size=6), min_size=1, max_size=6))
def test_alphabet_soundness(seqs):
    log = from_sequences(seqs)
    seen = [a for t in log.sequences for a in t]
    assert list(log.activity_alphabet) == list(dict.fromkeys(seen))
