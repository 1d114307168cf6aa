"""Proficiency and trajectory analyses.

Mouse proficiency comes from the movement-time law MT = a + b*log2(2d/w)
fitted by least squares; keyboard proficiency from press durations and
press rate; inter-task similarity from average point-wise distances
between arc-length-resampled cursor trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .events import EventKind, RawEvent, Trial


class SingularFitError(ValueError):
    """All trials share one index of difficulty; the slope is undetermined."""


@dataclass(frozen=True)
class FittsTrial:
    d: float  # target distance, normalized units
    w: float  # target width, normalized units
    mt: float  # movement time, seconds

    def __post_init__(self):
        if self.d <= 0 or self.w <= 0 or self.mt <= 0:
            raise ValueError("d, w and mt must all be positive")

    @property
    def difficulty(self) -> float:
        return float(np.log2(2.0 * self.d / self.w))


def fitts_fit(trials: list[FittsTrial]) -> tuple[float, float]:
    """Least-squares (a, b) for mt = a + b*difficulty.

    Trials are sorted internally so the result is bit-identical under any
    input order.
    """
    if len(trials) < 2:
        raise ValueError("need at least two trials to fit")
    ordered = sorted(trials, key=lambda t: (t.difficulty, t.mt))
    x = np.array([t.difficulty for t in ordered], dtype=float)
    y = np.array([t.mt for t in ordered], dtype=float)
    dx = x - x.mean()
    denom = float(dx @ dx)
    if denom == 0.0:
        raise SingularFitError("all trials have the same index of difficulty")
    b = float(dx @ (y - y.mean())) / denom
    a = float(y.mean() - b * x.mean())
    return a, b


def keyboard_proficiency(key_events: list[RawEvent]) -> tuple[float, float]:
    """(mean press duration in seconds, completed presses per minute).

    A press pairs a KeyDown with the nearest following KeyUp of the same key
    (first-in-first-out per key); unmatched events count toward neither
    metric. The rate denominator is the full span of the given events.
    """
    events = sorted(key_events, key=lambda e: e.timestamp_ms)
    pending: dict[str, list[int]] = {}
    durations_ms: list[int] = []
    for e in events:
        if e.kind is EventKind.KEY_DOWN:
            pending.setdefault(e.key_value, []).append(e.timestamp_ms)
        elif e.kind is EventKind.KEY_UP:
            stack = pending.get(e.key_value)
            if stack:
                durations_ms.append(e.timestamp_ms - stack.pop(0))
    if not durations_ms:
        raise ValueError("no completed key press in the event list")
    span_ms = events[-1].timestamp_ms - events[0].timestamp_ms
    if span_ms <= 0:
        raise ValueError("events span no time")
    mean_press_s = float(np.mean(durations_ms)) / 1000.0
    keys_per_min = len(durations_ms) / (span_ms / 60000.0)
    return mean_press_s, keys_per_min


def resample_trajectory(points: list[tuple[float, float]], n: int = 101) -> np.ndarray:
    """Resample a polyline to n points, uniform in arc length.

    Endpoints are preserved and interpolation is linear, so the result never
    leaves the polyline. A degenerate trajectory (zero total length) yields
    n copies of its point.
    """
    if len(points) < 2:
        raise ValueError("trajectory needs at least two points")
    if n < 2:
        raise ValueError("n must be at least 2")
    pts = np.asarray(points, dtype=float)
    steps = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1))
    s = np.concatenate([[0.0], np.cumsum(steps)])
    total = s[-1]
    if total == 0.0:
        return np.tile(pts[0], (n, 1))
    targets = np.linspace(0.0, total, n)
    out = np.column_stack([
        np.interp(targets, s, pts[:, 0]),
        np.interp(targets, s, pts[:, 1]),
    ])
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def trajectory_of(trial: Trial) -> list[tuple[float, float]]:
    """All mouse action positions of one trial, in time order."""
    return [(e.x, e.y) for e in trial.mouse_events()]


def pair_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Mean Euclidean distance over index-aligned resampled points."""
    if a.shape != b.shape:
        raise ValueError("trajectories must be resampled to the same length")
    return float(np.sqrt(((a - b) ** 2).sum(axis=1)).mean())


def task_distance(
    task_a: list[list[tuple[float, float]]],
    task_b: list[list[tuple[float, float]]],
    n: int = 101,
) -> float:
    """Mean pair distance over every trajectory pair from the two tasks."""
    dists = task_pair_distances(task_a, task_b, n)
    return float(np.mean(dists))


def task_pair_distances(
    task_a: list[list[tuple[float, float]]],
    task_b: list[list[tuple[float, float]]],
    n: int = 101,
) -> list[float]:
    if not task_a or not task_b:
        raise ValueError("both tasks need at least one trajectory")
    ra = [resample_trajectory(t, n) for t in task_a]
    rb = [resample_trajectory(t, n) for t in task_b]
    return [pair_distance(a, b) for a in ra for b in rb]
