"""Deterministic synthetic interaction sessions with known task structure.

Each task profile fixes a key distribution, a screen-quadrant bias for
pinpointing, a pinpoint/redirection mix, and optional planted token motifs.
Mouse behaviour is emitted so the dispersion labeler reproduces the intended
categories with margin: pinpoint bursts dwell at the cursor for >= 130 ms
with jitter clipped to a dispersion of at most 0.05, while redirections are
straight jumps of L1 length >= 0.34 whose intermediate samples sit in the
middle of the path, far from both endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .events import DatasetProfile, EventKind, RawEvent, Session, Trial
from .tokenizer import EOT, PINPOINT, REDIRECTION

# I-DT-safety margins, in normalized units / milliseconds.
_JITTER_SIGMA = 0.006
_JITTER_CLIP = 0.012
_BURST_SPAN_MS = (130, 280)
_BURST_DT_MS = (10, 30)
_JUMP_DT_MS = (10, 18)
_JUMP_FRACTIONS = (0.50, 0.58)
_MIN_JUMP_L1 = 0.34
_QUADRANT_MARGIN = 0.05

_SCREENS = ((1920, 1080), (1366, 768), (2560, 1440), (1440, 900))


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TaskProfile:
    task_id: str
    key_distribution: dict[str, float]
    mouse_area_bias: tuple[float, float, float, float]
    pinpoint_ratio: float
    planted_motifs: tuple[tuple[tuple[str, ...], float], ...] = ()
    mouse_fraction: float = 0.5

    def __post_init__(self):
        if self.key_distribution and abs(sum(self.key_distribution.values()) - 1.0) > 1e-9:
            raise SynthConfigError(f"key_distribution of {self.task_id} must sum to 1")
        if abs(sum(self.mouse_area_bias) - 1.0) > 1e-9:
            raise SynthConfigError(f"mouse_area_bias of {self.task_id} must sum to 1")
        if not 0.0 <= self.pinpoint_ratio <= 1.0:
            raise SynthConfigError("pinpoint_ratio must be in [0, 1]")
        if not 0.0 <= self.mouse_fraction <= 1.0:
            raise SynthConfigError("mouse_fraction must be in [0, 1]")
        for tokens, rate in self.planted_motifs:
            if rate < 0:
                raise SynthConfigError("motif injection rate must be >= 0")
            _validate_motif(tokens)


_MOTIF_ACTIONS = {"Move": EventKind.MOUSE_MOVE, "Click": EventKind.MOUSE_CLICK,
                  "Down": EventKind.MOUSE_DOWN, "Up": EventKind.MOUSE_UP}


def _motif_mouse_parts(tok: str) -> tuple[EventKind, int] | None:
    """(event kind, area) for a mouse motif token, or None for key tokens."""
    if tok.startswith("KeyDown_") or tok.startswith("KeyUp_"):
        return None
    parts = tok.split("_")
    if len(parts) != 3 or parts[0] not in _MOTIF_ACTIONS or \
            not parts[2].startswith("Area"):
        raise SynthConfigError(f"unrecognized motif token {tok!r}")
    if parts[1] == REDIRECTION:
        raise SynthConfigError(
            "redirection tokens in motifs cannot be synthesized verbatim"
        )
    if parts[1] != PINPOINT:
        raise SynthConfigError(f"unrecognized motif token {tok!r}")
    area = int(parts[2][len("Area"):])
    if area not in (0, 1, 2, 3):
        raise SynthConfigError(f"bad area in motif token {tok!r}")
    return _MOTIF_ACTIONS[parts[0]], area


def _validate_motif(tokens: tuple[str, ...]):
    if not tokens:
        raise SynthConfigError("empty motif")
    if EOT in tokens:
        raise SynthConfigError("motif may not contain the end-of-trial marker")
    areas = set()
    in_run, run_len = False, 0
    for tok in tokens + ("",):
        parsed = _motif_mouse_parts(tok) if tok else None
        if parsed is not None:
            areas.add(parsed[1])
            in_run, run_len = True, run_len + 1
        else:
            if in_run and run_len < 6:
                raise SynthConfigError(
                    "mouse pinpoint runs in motifs need >= 6 tokens to span "
                    "the duration threshold"
                )
            in_run, run_len = False, 0
    if len(areas) > 1:
        raise SynthConfigError(
            "mouse tokens in one motif must share a single area; a dwell "
            "region switch would tokenize as a redirection"
        )


@dataclass(frozen=True)
class SynthConfig:
    participants: int
    trials_per_task: int
    events_per_trial: int
    profiles: tuple[TaskProfile, ...]
    dataset_profile: DatasetProfile
    seed: int
    window_len: int = 150  # reference window for motif injection rates
    click_prob: float = 0.25

    def __post_init__(self):
        if self.participants < 1 or self.trials_per_task < 1 or self.events_per_trial < 1:
            raise SynthConfigError("participants, trials and events must be >= 1")
        if not self.profiles:
            raise SynthConfigError("at least one task profile is required")
        if self.window_len < 1:
            raise SynthConfigError("window_len must be >= 1")
        allowed = {
            DatasetProfile.CLICK_ONLY: {EventKind.MOUSE_MOVE, EventKind.MOUSE_CLICK},
            DatasetProfile.PRESS_RELEASE: {
                EventKind.MOUSE_MOVE, EventKind.MOUSE_DOWN, EventKind.MOUSE_UP},
        }[self.dataset_profile]
        for profile in self.profiles:
            for tokens, _ in profile.planted_motifs:
                for tok in tokens:
                    parsed = _motif_mouse_parts(tok)
                    if parsed is not None and parsed[0] not in allowed:
                        raise SynthConfigError(
                            f"motif token {tok!r} clashes with the "
                            f"{self.dataset_profile.value} click convention"
                        )


@dataclass
class TrialTruth:
    participant_id: str
    task_id: str
    trial_index: int
    motif_counts: dict[str, int] = field(default_factory=dict)


class _TrialWriter:
    """Accumulates one trial's events on a shared millisecond timeline."""

    def __init__(self, rng: np.random.Generator, screen: tuple[int, int],
                 dataset_profile: DatasetProfile, click_prob: float):
        self.rng = rng
        self.screen = screen
        self.dataset_profile = dataset_profile
        self.click_prob = click_prob
        self.events: list[RawEvent] = []
        self.t = int(rng.integers(0, 50))

    def _advance(self, lo: int, hi: int):
        self.t += int(self.rng.integers(lo, hi + 1))

    def _pix(self, x: float, y: float) -> tuple[int, int]:
        w, h = self.screen
        return int(round(x * (w - 1))), int(round(y * (h - 1)))

    def _mouse_event(self, kind: EventKind, x: float, y: float):
        px, py = self._pix(x, y)
        self.events.append(RawEvent(self.t, kind, x=px, y=py))

    def key_press(self, key: str, hold_lo: int = 50, hold_hi: int = 150):
        self.events.append(RawEvent(self.t, EventKind.KEY_DOWN, key_value=key))
        self._advance(hold_lo, hold_hi)
        self.events.append(RawEvent(self.t, EventKind.KEY_UP, key_value=key))
        self._advance(30, 120)

    def key_event(self, action: str, key: str):
        kind = EventKind.KEY_DOWN if action == "Down" else EventKind.KEY_UP
        self.events.append(RawEvent(self.t, kind, key_value=key))
        self._advance(20, 60)

    def pinpoint_burst(self, cursor: tuple[float, float]):
        rng = self.rng
        span = int(rng.integers(*_BURST_SPAN_MS))
        times = [0]
        while times[-1] < span:
            times.append(times[-1] + int(rng.integers(*_BURST_DT_MS)))
        k = len(times)
        kinds = [EventKind.MOUSE_MOVE] * k
        if rng.random() < self.click_prob and k >= 4:
            if self.dataset_profile is DatasetProfile.CLICK_ONLY:
                kinds[int(rng.integers(1, k - 1))] = EventKind.MOUSE_CLICK
            else:
                idx = int(rng.integers(1, k - 2))
                kinds[idx] = EventKind.MOUSE_DOWN
                kinds[idx + 1] = EventKind.MOUSE_UP
        self._burst(cursor, times, kinds)

    def motif_burst(self, cursor: tuple[float, float], kinds: list[EventKind]):
        # fixed sample count: stretch spacing so the run covers the duration
        # threshold with margin (validation guarantees >= 6 samples)
        dt = max(_BURST_DT_MS[0], -(-135 // (len(kinds) - 1)))
        self._burst(cursor, [i * dt for i in range(len(kinds))], kinds)

    def approach_sample(self, cursor: tuple[float, float]):
        jx, jy = self.rng.normal(0.0, _JITTER_SIGMA, 2).clip(-_JITTER_CLIP, _JITTER_CLIP)
        self._mouse_event(EventKind.MOUSE_MOVE, cursor[0] + jx, cursor[1] + jy)
        self._advance(10, 20)

    def _burst(self, cursor, times, kinds):
        jitter = self.rng.normal(0.0, _JITTER_SIGMA, (len(times), 2)) \
            .clip(-_JITTER_CLIP, _JITTER_CLIP)
        t0 = self.t
        for dt_i, kind, (jx, jy) in zip(times, kinds, jitter):
            self.t = t0 + dt_i
            self._mouse_event(kind, cursor[0] + jx, cursor[1] + jy)
        self._advance(20, 80)

    def jump_samples(self, start: tuple[float, float], target: tuple[float, float]):
        rng = self.rng
        j = int(rng.integers(2, 5))
        fractions = np.sort(rng.uniform(*_JUMP_FRACTIONS, j))
        for f in fractions:
            x = start[0] + f * (target[0] - start[0])
            y = start[1] + f * (target[1] - start[1])
            self._mouse_event(EventKind.MOUSE_MOVE, x, y)
            self._advance(*_JUMP_DT_MS)


def _point_in_quadrant(rng: np.random.Generator, quadrant: int) -> tuple[float, float]:
    qx = 0.5 * (quadrant % 2)
    qy = 0.5 * (quadrant // 2)
    m = _QUADRANT_MARGIN
    return (
        float(rng.uniform(qx + m, qx + 0.5 - m)),
        float(rng.uniform(qy + m, qy + 0.5 - m)),
    )


def _farthest_corner(cursor: tuple[float, float], quadrant: int) -> tuple[float, float]:
    qx = 0.5 * (quadrant % 2)
    qy = 0.5 * (quadrant // 2)
    m = _QUADRANT_MARGIN
    x = qx + m if abs(cursor[0] - (qx + m)) > abs(cursor[0] - (qx + 0.5 - m)) else qx + 0.5 - m
    y = qy + m if abs(cursor[1] - (qy + m)) > abs(cursor[1] - (qy + 0.5 - m)) else qy + 0.5 - m
    return (x, y)


def _choose_target(rng: np.random.Generator, cursor: tuple[float, float],
                   bias: tuple[float, ...]) -> tuple[float, float]:
    quadrant = int(rng.choice(4, p=bias))
    target = _point_in_quadrant(rng, quadrant)
    if abs(target[0] - cursor[0]) + abs(target[1] - cursor[1]) < _MIN_JUMP_L1:
        target = _farthest_corner(cursor, quadrant)
    return target


def _motif_schedule(rng: np.random.Generator, profile: TaskProfile,
                    block_len: int) -> "_MotifScheduler":
    return _MotifScheduler(rng, profile.planted_motifs, block_len)


class _MotifScheduler:
    """Draws per-block injection positions so rates are per window block."""

    def __init__(self, rng, motifs, block_len):
        self.rng = rng
        self.motifs = motifs
        self.block_len = block_len
        self.next_block = 0
        self.due: list[tuple[int, int]] = []  # (token position, motif index)

    def _fill(self, upto_tokens: int):
        while self.next_block * self.block_len <= upto_tokens:
            base = self.next_block * self.block_len
            for mi, (_, rate) in enumerate(self.motifs):
                for _ in range(int(self.rng.poisson(rate))):
                    self.due.append((base + int(self.rng.integers(0, self.block_len)), mi))
            self.next_block += 1
        self.due.sort()

    def pop_due(self, token_count: int) -> list[int]:
        if not self.motifs:
            return []
        self._fill(token_count)
        out = []
        while self.due and self.due[0][0] <= token_count:
            out.append(self.due.pop(0)[1])
        return out


def _emit_motif(writer: _TrialWriter, cursor: tuple[float, float],
                tokens: tuple[str, ...],
                rng: np.random.Generator) -> tuple[float, float]:
    parsed = [_motif_mouse_parts(t) for t in tokens]
    areas = {p[1] for p in parsed if p is not None}
    if areas:
        # teleport into the motif's dwell region; the approach sample soaks
        # up the redirection label so every motif sample stays a pinpoint
        cursor = _point_in_quadrant(rng, areas.pop())
        writer.approach_sample(cursor)
    i = 0
    while i < len(tokens):
        if parsed[i] is None:
            action, key = tokens[i].split("_", 1)
            writer.key_event(action[len("Key"):], key)
            i += 1
        else:
            run_kinds = [parsed[i][0]]
            while i + len(run_kinds) < len(tokens) and \
                    parsed[i + len(run_kinds)] is not None:
                run_kinds.append(parsed[i + len(run_kinds)][0])
            writer.motif_burst(cursor, run_kinds)
            i += len(run_kinds)
    return cursor


def default_profiles() -> tuple[TaskProfile, TaskProfile, TaskProfile]:
    """Three well-separated task profiles for desk-scale experiments."""
    return (
        TaskProfile(
            task_id="writing",
            key_distribution={
                "e": 0.16, "t": 0.12, "a": 0.11, "o": 0.10, "i": 0.09,
                "n": 0.08, "s": 0.08, "Space": 0.14, "Backspace": 0.07,
                "Shift": 0.05,
            },
            mouse_area_bias=(0.7, 0.1, 0.1, 0.1),
            pinpoint_ratio=0.75,
            mouse_fraction=0.2,
        ),
        TaskProfile(
            task_id="drawing",
            key_distribution={
                "z": 0.25, "Ctrl": 0.3, "s": 0.15, "Shift": 0.15, "d": 0.15,
            },
            mouse_area_bias=(0.05, 0.05, 0.3, 0.6),
            pinpoint_ratio=0.35,
            mouse_fraction=0.85,
        ),
        TaskProfile(
            task_id="browsing",
            key_distribution={
                "ArrowDown": 0.35, "ArrowUp": 0.15, "Enter": 0.2, "Tab": 0.2,
                "f": 0.1,
            },
            mouse_area_bias=(0.1, 0.7, 0.1, 0.1),
            pinpoint_ratio=0.9,
            mouse_fraction=0.5,
        ),
    )


def generate(cfg: SynthConfig) -> tuple[Session, list[TrialTruth]]:
    """Emit a full synthetic session plus per-trial ground truth.

    Identical configs produce byte-identical sessions: every trial owns an
    RNG seeded from (seed, participant, task, trial), so participants could
    even be generated in parallel without changing the output.
    """
    trials: list[Trial] = []
    truths: list[TrialTruth] = []
    for p_idx in range(cfg.participants):
        pid = f"p{p_idx:03d}"
        screen = _SCREENS[p_idx % len(_SCREENS)]
        for task_idx, profile in enumerate(cfg.profiles):
            for trial_idx in range(cfg.trials_per_task):
                rng = np.random.Generator(np.random.PCG64(
                    np.random.SeedSequence([cfg.seed, p_idx, task_idx, trial_idx])
                ))
                writer = _TrialWriter(rng, screen, cfg.dataset_profile, cfg.click_prob)
                truth = TrialTruth(pid, profile.task_id, trial_idx)
                scheduler = _motif_schedule(rng, profile, cfg.window_len)
                keys = sorted(profile.key_distribution)
                key_p = np.array([profile.key_distribution[k] for k in keys])
                cursor = _point_in_quadrant(
                    rng, int(rng.choice(4, p=profile.mouse_area_bias)))
                while len(writer.events) < cfg.events_per_trial:
                    for mi in scheduler.pop_due(len(writer.events)):
                        tokens, _ = profile.planted_motifs[mi]
                        cursor = _emit_motif(writer, cursor, tokens, rng)
                        name = " ".join(tokens)
                        truth.motif_counts[name] = truth.motif_counts.get(name, 0) + 1
                    use_mouse = rng.random() < profile.mouse_fraction
                    if use_mouse or not keys:
                        if rng.random() < profile.pinpoint_ratio:
                            writer.pinpoint_burst(cursor)
                        else:
                            target = _choose_target(rng, cursor, profile.mouse_area_bias)
                            writer.jump_samples(cursor, target)
                            cursor = target
                            writer.pinpoint_burst(cursor)
                    else:
                        writer.key_press(keys[int(rng.choice(len(keys), p=key_p))])
                trials.append(Trial(
                    participant_id=pid,
                    task_id=profile.task_id,
                    trial_index=trial_idx,
                    events=tuple(writer.events),
                    screen_w=screen[0],
                    screen_h=screen[1],
                ))
                truths.append(truth)
    return Session(trials=tuple(trials), dataset_profile=cfg.dataset_profile), truths
