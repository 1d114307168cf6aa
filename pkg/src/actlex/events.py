"""Parsing, validation and normalization of raw mouse/keyboard interaction logs.

Input is line-delimited JSON, one event per line, with fields
{participant_id, task_id, trial_index, timestamp_ms, kind, key_value?, x?, y?,
screen_w, screen_h}. Unknown fields are ignored. Events are grouped into
trials keyed by (participant_id, task_id, trial_index) and time-sorted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Iterable, Iterator


class EventKind(str, Enum):
    KEY_DOWN = "KeyDown"
    KEY_UP = "KeyUp"
    MOUSE_MOVE = "MouseMove"
    MOUSE_DOWN = "MouseDown"
    MOUSE_UP = "MouseUp"
    MOUSE_CLICK = "MouseClick"

    @property
    def is_key(self) -> bool:
        return self in (EventKind.KEY_DOWN, EventKind.KEY_UP)

    @property
    def is_mouse(self) -> bool:
        return not self.is_key


class DatasetProfile(str, Enum):
    """Which mouse-click convention a log uses.

    CLICK_ONLY logs record a single MouseClick per click; PRESS_RELEASE logs
    record separate MouseDown and MouseUp events (and never MouseClick).
    """

    CLICK_ONLY = "click-only"
    PRESS_RELEASE = "press-release"


# Canonical capitalized names for common multi-character keys. Unlisted
# multi-character keys fall back to first-letter capitalization.
_NAMED_KEYS = {
    "space": "Space",
    "spacebar": "Space",
    "backspace": "Backspace",
    "shift": "Shift",
    "ctrl": "Ctrl",
    "control": "Ctrl",
    "alt": "Alt",
    "enter": "Enter",
    "return": "Enter",
    "tab": "Tab",
    "escape": "Escape",
    "esc": "Escape",
    "delete": "Delete",
    "del": "Delete",
    "capslock": "CapsLock",
    "arrowleft": "ArrowLeft",
    "arrowright": "ArrowRight",
    "arrowup": "ArrowUp",
    "arrowdown": "ArrowDown",
    "left": "ArrowLeft",
    "right": "ArrowRight",
    "up": "ArrowUp",
    "down": "ArrowDown",
    "pageup": "PageUp",
    "pagedown": "PageDown",
    "home": "Home",
    "end": "End",
    "meta": "Meta",
    "cmd": "Meta",
}


def normalize_key_value(key: str) -> str:
    """Map a raw key name onto the canonical alphabet.

    Printable single characters are lower-cased (key values are counted
    case-insensitively); named keys get one canonical capitalized spelling.
    """
    if len(key) == 1:
        return key.lower()
    return _NAMED_KEYS.get(key.lower(), key[:1].upper() + key[1:])


class ParseError(ValueError):
    """A malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ProfileConflictError(ValueError):
    """MouseClick and MouseDown/MouseUp conventions mixed in one session."""


class EventValidationError(ValueError):
    pass


@dataclass(frozen=True)
class RawEvent:
    timestamp_ms: int
    kind: EventKind
    key_value: str | None = None
    x: float | None = None
    y: float | None = None

    def __post_init__(self):
        if self.timestamp_ms < 0:
            raise EventValidationError(f"negative timestamp {self.timestamp_ms}")
        if self.kind.is_key:
            if not self.key_value:
                raise EventValidationError(f"{self.kind.value} event without key_value")
            if self.x is not None or self.y is not None:
                raise EventValidationError(f"{self.kind.value} event carries coordinates")
        else:
            if self.x is None or self.y is None:
                raise EventValidationError(f"{self.kind.value} event missing coordinates")
            if self.key_value is not None:
                raise EventValidationError(f"{self.kind.value} event carries key_value")


@dataclass(frozen=True)
class Trial:
    participant_id: str
    task_id: str
    trial_index: int
    events: tuple[RawEvent, ...]
    screen_w: int
    screen_h: int

    def __post_init__(self):
        if self.trial_index < 0:
            raise EventValidationError(f"negative trial_index {self.trial_index}")
        if self.screen_w <= 0 or self.screen_h <= 0:
            raise EventValidationError(
                f"non-positive screen size {self.screen_w}x{self.screen_h}"
            )
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.timestamp_ms < prev.timestamp_ms:
                raise EventValidationError("trial events not sorted by timestamp")

    def mouse_events(self) -> list[RawEvent]:
        return [e for e in self.events if e.kind.is_mouse]

    def key_events(self) -> list[RawEvent]:
        return [e for e in self.events if e.kind.is_key]


@dataclass(frozen=True)
class Session:
    trials: tuple[Trial, ...]
    dataset_profile: DatasetProfile

    def participants(self) -> list[str]:
        return sorted({t.participant_id for t in self.trials})

    def task_ids(self) -> list[str]:
        return sorted({t.task_id for t in self.trials})


_REQUIRED_FIELDS = ("participant_id", "task_id", "trial_index", "timestamp_ms",
                    "kind", "screen_w", "screen_h")


def _parse_line(line_no: int, line: str) -> tuple[tuple[str, str, int], RawEvent, int, int]:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(rec, dict):
        raise ParseError(line_no, "record is not an object")
    for name in _REQUIRED_FIELDS:
        if name not in rec:
            raise ParseError(line_no, f"missing field {name!r}")
    try:
        kind = EventKind(rec["kind"])
    except ValueError:
        raise ParseError(line_no, f"unknown event kind {rec['kind']!r}") from None
    key_value = rec.get("key_value")
    if key_value is not None:
        key_value = normalize_key_value(str(key_value))
    try:
        event = RawEvent(
            timestamp_ms=int(rec["timestamp_ms"]),
            kind=kind,
            key_value=key_value,
            x=None if rec.get("x") is None else float(rec["x"]),
            y=None if rec.get("y") is None else float(rec["y"]),
        )
        key = (str(rec["participant_id"]), str(rec["task_id"]), int(rec["trial_index"]))
        screen = (int(rec["screen_w"]), int(rec["screen_h"]))
    except (EventValidationError, TypeError, ValueError) as exc:
        raise ParseError(line_no, str(exc)) from exc
    return key, event, screen[0], screen[1]


def parse_events(
    stream: Iterable[str] | IO[str],
    profile: DatasetProfile | None = None,
) -> Session:
    """Parse line-delimited event records into a Session.

    Events are grouped by (participant_id, task_id, trial_index) and sorted by
    timestamp (stable, so ties keep input order). The click convention is
    inferred from the event kinds present unless `profile` is given; mixing
    MouseClick with MouseDown/MouseUp raises ProfileConflictError. A stream
    with no mouse clicks at all defaults to PRESS_RELEASE.
    """
    groups: dict[tuple[str, str, int], list[RawEvent]] = {}
    screens: dict[tuple[str, str, int], tuple[int, int]] = {}
    saw_click = False
    saw_press_release = False
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        key, event, sw, sh = _parse_line(line_no, line)
        if event.kind is EventKind.MOUSE_CLICK:
            saw_click = True
        elif event.kind in (EventKind.MOUSE_DOWN, EventKind.MOUSE_UP):
            saw_press_release = True
        if key in screens and screens[key] != (sw, sh):
            raise ParseError(line_no, f"conflicting screen size for trial {key}")
        screens[key] = (sw, sh)
        groups.setdefault(key, []).append(event)

    if saw_click and saw_press_release:
        raise ProfileConflictError(
            "stream mixes MouseClick with MouseDown/MouseUp events"
        )
    inferred = DatasetProfile.CLICK_ONLY if saw_click else DatasetProfile.PRESS_RELEASE
    if profile is None:
        profile = inferred
    elif saw_click and profile is not DatasetProfile.CLICK_ONLY:
        raise ProfileConflictError("MouseClick events under press-release profile")
    elif saw_press_release and profile is not DatasetProfile.PRESS_RELEASE:
        raise ProfileConflictError("MouseDown/MouseUp events under click-only profile")

    trials = []
    for key in sorted(groups):
        pid, task, idx = key
        events = sorted(groups[key], key=lambda e: e.timestamp_ms)  # stable
        sw, sh = screens[key]
        trials.append(Trial(pid, task, idx, tuple(events), sw, sh))
    return Session(trials=tuple(trials), dataset_profile=profile)


def serialize_events(session: Session) -> Iterator[str]:
    """Canonical line-delimited form; parse(serialize(parse(x))) == parse(x)."""
    for trial in session.trials:
        for e in trial.events:
            rec: dict = {
                "participant_id": trial.participant_id,
                "task_id": trial.task_id,
                "trial_index": trial.trial_index,
                "timestamp_ms": e.timestamp_ms,
                "kind": e.kind.value,
            }
            if e.key_value is not None:
                rec["key_value"] = e.key_value
            if e.x is not None:
                rec["x"] = e.x
                rec["y"] = e.y
            rec["screen_w"] = trial.screen_w
            rec["screen_h"] = trial.screen_h
            yield json.dumps(rec, ensure_ascii=False)


def normalize_coords(trial: Trial) -> Trial:
    """Rescale mouse coordinates to [0, 1] (clamped); key events unchanged.

    Out-of-range coordinates (some browsers report them during drags outside
    the window) are clamped rather than dropped so area quantization stays
    total.
    """
    out = []
    for e in trial.events:
        if e.kind.is_mouse:
            if e.x is None or e.y is None:
                raise EventValidationError(f"{e.kind.value} event missing coordinates")
            x = min(max(e.x / trial.screen_w, 0.0), 1.0)
            y = min(max(e.y / trial.screen_h, 0.0), 1.0)
            out.append(replace(e, x=x, y=y))
        else:
            out.append(e)
    return replace(trial, events=tuple(out))


def normalize_session(session: Session) -> Session:
    return replace(session, trials=tuple(normalize_coords(t) for t in session.trials))
