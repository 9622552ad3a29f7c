"""Variable-width histogram windowing with ping-pong sweep animation.

The window always holds at least the target occurrence count (capped at the
histogram total) and is minimal from its trailing edge: dropping the trailing
bin would fall below the target. Stepping advances the leading edge one bin,
then shrinks the trailing edge while the target still holds; when the leading
edge cannot advance, direction flips before the move so no frame is skipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

GRANULARITY_BINS = {"month": 12, "weekday": 7, "hour": 24}


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class TemporalHistogram:
    counts: tuple[int, ...]
    cumulative: tuple[int, ...]
    granularity: str

    @property
    def total(self) -> int:
        return self.cumulative[-1] if self.cumulative else 0

    def window_count(self, lo: int, hi: int) -> int:
        """Inclusive [lo, hi] occurrence count via the prefix sums."""
        return self.cumulative[hi] - (self.cumulative[lo - 1] if lo > 0 else 0)


@dataclass(frozen=True)
class TemporalWindow:
    lo: int
    hi: int
    direction: Direction
    target: int


def histogram_from_counts(counts: list[int], granularity: str = "custom") -> TemporalHistogram:
    if any(c < 0 for c in counts):
        raise ValueError("bin counts must be non-negative")
    cumulative: list[int] = []
    running = 0
    for c in counts:
        running += c
        cumulative.append(running)
    return TemporalHistogram(tuple(counts), tuple(cumulative), granularity)


def make_histogram(timestamps: list[datetime], granularity: str) -> TemporalHistogram:
    """Fixed-layout histogram: 12 month bins, 7 weekday bins, or 24 hour bins."""
    if granularity not in GRANULARITY_BINS:
        raise ValueError(f"unknown granularity: {granularity!r}")
    counts = [0] * GRANULARITY_BINS[granularity]
    for ts in timestamps:
        if granularity == "month":
            counts[ts.month - 1] += 1
        elif granularity == "weekday":
            counts[ts.weekday()] += 1
        else:
            counts[ts.hour] += 1
    return histogram_from_counts(counts, granularity)


def resolve_target(h: TemporalHistogram, mode: str, value: float) -> int:
    """Occurrence-count target from either a raw count or a density fraction."""
    if mode == "count":
        if value < 0 or value != int(value):
            raise ValueError("count target must be a non-negative integer")
        return int(value)
    if mode == "density":
        if not (0.0 <= value <= 1.0):
            raise ValueError("density must lie in [0, 1]")
        return math.ceil(value * h.total)
    raise ValueError(f"unknown target mode: {mode!r}")


def initial_window(h: TemporalHistogram, target: int) -> TemporalWindow:
    """Smallest prefix window holding at least the (capped) target."""
    if target < 0:
        raise ValueError("target must be >= 0")
    effective = min(target, h.total)
    hi = 0
    while h.window_count(0, hi) < effective and hi < len(h.counts) - 1:
        hi += 1
    return TemporalWindow(0, hi, Direction.FORWARD, target)


def step(h: TemporalHistogram, w: TemporalWindow) -> TemporalWindow:
    """Advance one frame, flipping direction at the histogram ends."""
    n = len(h.counts)
    if not (0 <= w.lo <= w.hi < n):
        raise ValueError("window out of range")
    effective = min(w.target, h.total)
    direction = w.direction
    if direction is Direction.FORWARD and w.hi == n - 1:
        direction = Direction.BACKWARD
    elif direction is Direction.BACKWARD and w.lo == 0:
        direction = Direction.FORWARD

    lo, hi = w.lo, w.hi
    if direction is Direction.FORWARD:
        if hi < n - 1:
            hi += 1
        while lo < hi and h.window_count(lo + 1, hi) >= effective:
            lo += 1
    else:
        if lo > 0:
            lo -= 1
        while hi > lo and h.window_count(lo, hi - 1) >= effective:
            hi -= 1
    return TemporalWindow(lo, hi, direction, w.target)
