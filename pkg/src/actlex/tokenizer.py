"""Turn normalized event streams into atomic action tokens and fixed windows.

Keyboard events map directly to tokens like "KeyDown_a" / "KeyUp_Shift".
Mouse events are categorized with a dispersion-threshold sliding window
(pinpoint = dwelling on a target, redirection = travelling between targets),
quantized into screen quadrants, and rendered as e.g. "Move_Pinpoint_Area0"
or "Click_Redirection_Area3". Every trial's token stream ends with the
reserved "<EOT>" marker.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .events import DatasetProfile, EventKind, RawEvent, Trial

logger = logging.getLogger(__name__)

EOT = "<EOT>"

PINPOINT = "Pinpoint"
REDIRECTION = "Redirection"

# Mouse token action names by profile. Click-only logs have 2x2x4 = 16 mouse
# atoms; press-release logs have 3x2x4 = 24.
_MOUSE_ACTIONS = {
    DatasetProfile.CLICK_ONLY: ("Move", "Click"),
    DatasetProfile.PRESS_RELEASE: ("Move", "Down", "Up"),
}

_KIND_TO_ACTION = {
    EventKind.MOUSE_MOVE: "Move",
    EventKind.MOUSE_CLICK: "Click",
    EventKind.MOUSE_DOWN: "Down",
    EventKind.MOUSE_UP: "Up",
}


class Modality(str, Enum):
    MOUSE = "mouse"
    KEYBOARD = "keyboard"
    JOINT = "joint"


# Window lengths used for the headline experiments; other values work but
# are logged as off-grid.
CANONICAL_WINDOWS = {
    Modality.MOUSE: (20, 100, 200),
    Modality.KEYBOARD: (10, 50, 100),
    Modality.JOINT: (15, 75, 150),
}


@dataclass(frozen=True)
class IdtConfig:
    """Dispersion-threshold labeling parameters (normalized coordinates)."""

    duration_threshold_ms: int = 100
    dispersion_threshold: float = 0.1

    def __post_init__(self):
        if self.duration_threshold_ms <= 0:
            raise ValueError("duration_threshold_ms must be positive")
        if self.dispersion_threshold <= 0:
            raise ValueError("dispersion_threshold must be positive")


@dataclass(frozen=True)
class WindowSample:
    """A fixed-length token window, the unit of classification."""

    tokens: tuple[str, ...]
    participant_id: str
    task_id: str
    modality: Modality

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("empty window")
        if EOT in self.tokens:
            raise ValueError("window contains the end-of-trial marker")


def key_token(action: str, key: str) -> str:
    if action not in ("Down", "Up"):
        raise ValueError(f"bad key action {action!r}")
    return f"Key{action}_{key}"


def mouse_token(action: str, category: str, area: int) -> str:
    if category not in (PINPOINT, REDIRECTION):
        raise ValueError(f"bad category {category!r}")
    if area not in (0, 1, 2, 3):
        raise ValueError(f"bad area {area!r}")
    return f"{action}_{category}_Area{area}"


def dispersion(points: list[tuple[float, float]]) -> float:
    """Spread of a point set: [max(x)-min(x)] + [max(y)-min(y)]."""
    if not points:
        raise ValueError("dispersion of empty point list")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (max(xs) - min(xs)) + (max(ys) - min(ys))


def idt_label(mouse_events: list[RawEvent], cfg: IdtConfig | None = None) -> list[str]:
    """Label each mouse event Pinpoint or Redirection by dispersion windows.

    A candidate window is seeded at the current sample and grown until it
    covers at least duration_threshold_ms. If its dispersion is within the
    threshold the window expands sample by sample while dispersion stays
    within it, and all covered samples are pinpoints; otherwise the departing
    sample is a redirection and the window slides forward one sample. The
    sample that ends an expansion is likewise a redirection (it departs the
    dwell region), which keeps every maximal contiguous pinpoint run within
    the dispersion threshold; adjacent qualifying windows can otherwise fuse
    into a run whose union violates it. Trailing samples that cannot span
    the duration threshold are redirections, so every pinpoint run also
    covers the duration threshold.
    """
    cfg = cfg or IdtConfig()
    n = len(mouse_events)
    labels: list[str | None] = [None] * n
    ts = [e.timestamp_ms for e in mouse_events]
    xs = [e.x for e in mouse_events]
    ys = [e.y for e in mouse_events]

    i = 0
    while i < n:
        # seed: smallest window starting at i that spans the duration threshold
        j = i
        while j + 1 < n and ts[j] - ts[i] < cfg.duration_threshold_ms:
            j += 1
        if ts[j] - ts[i] < cfg.duration_threshold_ms:
            for k in range(i, n):
                labels[k] = REDIRECTION
            break
        min_x = min(xs[i : j + 1])
        max_x = max(xs[i : j + 1])
        min_y = min(ys[i : j + 1])
        max_y = max(ys[i : j + 1])
        if (max_x - min_x) + (max_y - min_y) <= cfg.dispersion_threshold:
            while j + 1 < n:
                nx = min(min_x, xs[j + 1])
                mx = max(max_x, xs[j + 1])
                ny = min(min_y, ys[j + 1])
                my = max(max_y, ys[j + 1])
                if (mx - nx) + (my - ny) > cfg.dispersion_threshold:
                    break
                min_x, max_x, min_y, max_y = nx, mx, ny, my
                j += 1
            for k in range(i, j + 1):
                labels[k] = PINPOINT
            if j + 1 < n:
                labels[j + 1] = REDIRECTION
            i = j + 2
        else:
            labels[i] = REDIRECTION
            i += 1
    return labels  # type: ignore[return-value]


def area_of(x: float, y: float) -> int:
    """Screen quadrant of a normalized point; y grows downward.

    0: top-left, 1: top-right, 2: bottom-left, 3: bottom-right. The boundary
    rule is >= 0.5 goes right/bottom.
    """
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"point ({x}, {y}) outside [0,1]^2")
    return 2 * (y >= 0.5) + (x >= 0.5)


def tokenize_mouse(
    trial: Trial,
    profile: DatasetProfile,
    cfg: IdtConfig | None = None,
) -> list[str]:
    """Mouse events of a normalized trial -> action tokens plus trailing <EOT>."""
    allowed = _MOUSE_ACTIONS[profile]
    events = trial.mouse_events()
    categories = idt_label(events, cfg)
    tokens = []
    for e, cat in zip(events, categories):
        action = _KIND_TO_ACTION[e.kind]
        if action not in allowed:
            raise ValueError(
                f"{e.kind.value} event not allowed under {profile.value} profile"
            )
        tokens.append(mouse_token(action, cat, area_of(e.x, e.y)))
    tokens.append(EOT)
    return tokens


def tokenize_keyboard(trial: Trial) -> list[str]:
    """Key events of a trial -> action tokens plus trailing <EOT>."""
    tokens = []
    for e in trial.key_events():
        action = "Down" if e.kind is EventKind.KEY_DOWN else "Up"
        tokens.append(key_token(action, e.key_value))
    tokens.append(EOT)
    return tokens


def merge_modalities(
    mouse_tokens: list[str],
    keyboard_tokens: list[str],
    trial: Trial,
) -> list[str]:
    """Interleave per-modality tokens by event timestamp (mouse wins ties)."""
    mouse_events = trial.mouse_events()
    key_events = trial.key_events()
    if len(mouse_tokens) != len(mouse_events) + 1 or mouse_tokens[-1] != EOT:
        raise RuntimeError("mouse token list does not match trial events")
    if len(keyboard_tokens) != len(key_events) + 1 or keyboard_tokens[-1] != EOT:
        raise RuntimeError("keyboard token list does not match trial events")
    merged = []
    mi, ki = 0, 0
    while mi < len(mouse_events) and ki < len(key_events):
        if mouse_events[mi].timestamp_ms <= key_events[ki].timestamp_ms:
            merged.append(mouse_tokens[mi])
            mi += 1
        else:
            merged.append(keyboard_tokens[ki])
            ki += 1
    merged.extend(mouse_tokens[mi : len(mouse_events)])
    merged.extend(keyboard_tokens[ki : len(key_events)])
    merged.append(EOT)
    return merged


def tokenize_trial(
    trial: Trial,
    modality: Modality,
    profile: DatasetProfile,
    cfg: IdtConfig | None = None,
) -> list[str]:
    if modality is Modality.MOUSE:
        return tokenize_mouse(trial, profile, cfg)
    if modality is Modality.KEYBOARD:
        return tokenize_keyboard(trial)
    return merge_modalities(
        tokenize_mouse(trial, profile, cfg), tokenize_keyboard(trial), trial
    )


def segment_windows(
    tokens: list[str],
    window_len: int,
    participant_id: str,
    task_id: str,
    modality: Modality,
) -> list[WindowSample]:
    """Chop a token stream into consecutive non-overlapping windows.

    <EOT> markers split the stream into trials first; windows never span a
    trial boundary and never contain the marker. Each trial's trailing
    partial chunk is dropped.
    """
    if window_len <= 0:
        raise ValueError("window_len must be positive")
    if window_len not in CANONICAL_WINDOWS[modality]:
        logger.warning(
            "window length %d is off the usual grid %s for %s",
            window_len, CANONICAL_WINDOWS[modality], modality.value,
        )
    windows = []
    trial_tokens: list[str] = []
    for tok in tokens:
        if tok == EOT:
            for start in range(0, len(trial_tokens) - window_len + 1, window_len):
                windows.append(WindowSample(
                    tokens=tuple(trial_tokens[start : start + window_len]),
                    participant_id=participant_id,
                    task_id=task_id,
                    modality=modality,
                ))
            trial_tokens = []
        else:
            trial_tokens.append(tok)
    for start in range(0, len(trial_tokens) - window_len + 1, window_len):
        windows.append(WindowSample(
            tokens=tuple(trial_tokens[start : start + window_len]),
            participant_id=participant_id,
            task_id=task_id,
            modality=modality,
        ))
    return windows


def mouse_atoms(profile: DatasetProfile) -> list[str]:
    """The full mouse token alphabet for a profile (16 or 24 atoms)."""
    return [
        mouse_token(action, category, area)
        for action in _MOUSE_ACTIONS[profile]
        for category in (PINPOINT, REDIRECTION)
        for area in range(4)
    ]


def keyboard_atoms(keys: list[str]) -> list[str]:
    """Key token alphabet over a set of observed key values (2 per key)."""
    return [
        key_token(action, key)
        for key in sorted(set(keys))
        for action in ("Down", "Up")
    ]


def atoms_for(
    modality: Modality,
    profile: DatasetProfile,
    keys: list[str] | None = None,
) -> list[str]:
    """Initial vocabulary atom list: <EOT> first, then the modality alphabet."""
    atoms = [EOT]
    if modality in (Modality.MOUSE, Modality.JOINT):
        atoms.extend(mouse_atoms(profile))
    if modality in (Modality.KEYBOARD, Modality.JOINT):
        atoms.extend(keyboard_atoms(keys or []))
    return atoms


def observed_keys(token_streams: list[list[str]]) -> list[str]:
    """Distinct key values appearing in token streams, sorted."""
    keys = set()
    for stream in token_streams:
        for tok in stream:
            if tok.startswith("KeyDown_"):
                keys.add(tok[len("KeyDown_"):])
            elif tok.startswith("KeyUp_"):
                keys.add(tok[len("KeyUp_"):])
    return sorted(keys)
