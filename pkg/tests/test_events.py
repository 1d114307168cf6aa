import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actlex.events import (
    DatasetProfile,
    EventKind,
    ParseError,
    ProfileConflictError,
    RawEvent,
    Trial,
    normalize_coords,
    normalize_key_value,
    parse_events,
    serialize_events,
)
from conftest import record, session_from


def test_empty_stream_gives_zero_trials():
    session = parse_events(iter([]))
    assert session.trials == ()


def test_events_sorted_within_trial():
    lines = [
        record(t=300, kind="KeyDown", key="c"),
        record(t=100, kind="KeyDown", key="a"),
        record(t=200, kind="KeyDown", key="b"),
    ]
    session = session_from(lines)
    assert [e.timestamp_ms for e in session.trials[0].events] == [100, 200, 300]


def test_key_event_with_coordinates_is_rejected_with_line_number():
    lines = [record(t=0, kind="KeyDown", key="a"),
             record(t=10, kind="KeyDown", key="b", x=5, y=5)]
    with pytest.raises(ParseError, match="line 2"):
        session_from(lines)


def test_mouse_event_without_coordinates_rejected():
    with pytest.raises(ParseError, match="line 1"):
        session_from([record(t=0, kind="MouseMove")])


def test_malformed_json_names_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_events(iter([record(t=0, kind="KeyDown", key="a"), "{not json"]))


def test_unknown_fields_ignored():
    session = session_from([record(t=0, kind="KeyDown", key="a", origin="browser")])
    assert len(session.trials[0].events) == 1


def test_mixed_click_conventions_conflict():
    lines = [record(t=0, kind="MouseClick", x=1, y=1),
             record(t=10, kind="MouseDown", x=1, y=1)]
    with pytest.raises(ProfileConflictError):
        session_from(lines)


def test_profile_inference():
    click = session_from([record(t=0, kind="MouseClick", x=1, y=1)])
    assert click.dataset_profile is DatasetProfile.CLICK_ONLY
    pr = session_from([record(t=0, kind="MouseDown", x=1, y=1)])
    assert pr.dataset_profile is DatasetProfile.PRESS_RELEASE
    keyboard_only = session_from([record(t=0, kind="KeyDown", key="a")])
    assert keyboard_only.dataset_profile is DatasetProfile.PRESS_RELEASE


def test_explicit_profile_conflicts_with_events():
    with pytest.raises(ProfileConflictError):
        session_from([record(t=0, kind="MouseClick", x=1, y=1)], "press-release")


@pytest.mark.parametrize("raw,expected", [
    ("A", "a"), ("z", "z"), ("SHIFT", "Shift"), ("space", "Space"),
    ("backspace", "Backspace"), ("control", "Ctrl"), ("left", "ArrowLeft"),
    ("F5", "F5"),
])
def test_key_normalization(raw, expected):
    assert normalize_key_value(raw) == expected


def _trial(events, sw=1920, sh=1080):
    return Trial("p", "t", 0, tuple(events), sw, sh)


def test_normalize_midpoint_and_boundary():
    trial = _trial([
        RawEvent(0, EventKind.MOUSE_MOVE, x=960, y=540),
        RawEvent(1, EventKind.MOUSE_MOVE, x=1920, y=0),
    ])
    out = normalize_coords(trial)
    assert (out.events[0].x, out.events[0].y) == (0.5, 0.5)
    assert (out.events[1].x, out.events[1].y) == (1.0, 0.0)


def test_normalize_clamps_out_of_range():
    trial = _trial([RawEvent(0, EventKind.MOUSE_MOVE, x=2000, y=-50)])
    out = normalize_coords(trial)
    assert (out.events[0].x, out.events[0].y) == (1.0, 0.0)


def test_normalize_preserves_counts_kinds_timestamps():
    trial = _trial([
        RawEvent(0, EventKind.MOUSE_MOVE, x=10, y=10),
        RawEvent(5, EventKind.KEY_DOWN, key_value="a"),
        RawEvent(9, EventKind.MOUSE_DOWN, x=12, y=13),
    ])
    out = normalize_coords(trial)
    assert [e.kind for e in out.events] == [e.kind for e in trial.events]
    assert [e.timestamp_ms for e in out.events] == [e.timestamp_ms for e in trial.events]
    assert out.events[1] == trial.events[1]


record_strategy = st.fixed_dictionaries({
    "participant": st.sampled_from(["p1", "p2"]),
    "task": st.sampled_from(["t1", "t2"]),
    "trial": st.integers(0, 2),
    "t": st.integers(0, 10_000),
    "which": st.sampled_from(["key_down", "key_up", "move", "down", "up"]),
    "key": st.sampled_from(["a", "b", "Shift", "Space"]),
    "x": st.integers(0, 1920),
    "y": st.integers(0, 1080),
})


def _to_line(d):
    if d["which"].startswith("key"):
        kind = "KeyDown" if d["which"] == "key_down" else "KeyUp"
        return record(d["participant"], d["task"], d["trial"], d["t"], kind, key=d["key"])
    kind = {"move": "MouseMove", "down": "MouseDown", "up": "MouseUp"}[d["which"]]
    return record(d["participant"], d["task"], d["trial"], d["t"], kind,
                  x=d["x"], y=d["y"])


@settings(max_examples=50, deadline=None)
@given(st.lists(record_strategy, max_size=40))
def test_parse_serialize_parse_identity(records):
    first = parse_events(iter(_to_line(d) for d in records))
    text = "\n".join(serialize_events(first)) + "\n"
    second = parse_events(io.StringIO(text))
    assert second == first


def test_serialized_records_match_schema(key_lines):
    session = session_from(key_lines)
    for line in serialize_events(session):
        rec = json.loads(line)
        assert {"participant_id", "task_id", "trial_index", "timestamp_ms",
                "kind", "screen_w", "screen_h"} <= set(rec)
