import json

import pytest

from actlex.events import DatasetProfile, parse_events


def record(participant="p1", task="t1", trial=0, t=0, kind="KeyDown",
           key=None, x=None, y=None, sw=1920, sh=1080, **extra):
    rec = {
        "participant_id": participant,
        "task_id": task,
        "trial_index": trial,
        "timestamp_ms": t,
        "kind": kind,
        "screen_w": sw,
        "screen_h": sh,
    }
    if key is not None:
        rec["key_value"] = key
    if x is not None:
        rec["x"] = x
        rec["y"] = y
    rec.update(extra)
    return json.dumps(rec)


def session_from(lines, profile=None):
    return parse_events(
        iter(lines), DatasetProfile(profile) if isinstance(profile, str) else profile
    )


@pytest.fixture
def key_lines():
    return [
        record(t=0, kind="KeyDown", key="a"),
        record(t=80, kind="KeyUp", key="a"),
        record(t=150, kind="KeyDown", key="Shift"),
        record(t=260, kind="KeyUp", key="Shift"),
    ]
