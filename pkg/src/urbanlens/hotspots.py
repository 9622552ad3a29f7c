"""Hotspot scoring from per-corner monthly crime activity.

Each node gets a two-state Markov chain over its monthly active/inactive
series; the long-run (stationary) probability of being active, combined with a
minimum occurrence count, decides hotspot status. Transition probabilities use
add-one smoothing so nodes with one-sided histories stay well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass

MONTHS_PER_YEAR = 12


@dataclass(frozen=True)
class NodeActivitySeries:
    """Monthly 0/1 activity for one node plus its total occurrence count."""

    node: int
    activity: tuple[int, ...]
    total: int

    def __post_init__(self):
        if len(self.activity) != MONTHS_PER_YEAR:
            raise ValueError("activity series must cover 12 months")
        if self.total < sum(self.activity):
            raise ValueError("total below number of active months")


@dataclass(frozen=True)
class HotspotResult:
    node: int
    p_stay_active: float  # P(active -> active)
    p_turn_active: float  # P(inactive -> active)
    stationary_prob: float
    is_hotspot: bool
    count: int


def build_activity_series(
    node_count: int, crime_nodes: list[int], crime_months: list[int]
) -> list[NodeActivitySeries]:
    """Series for every node; months are 1..12 within the analysis year."""
    monthly = [[0] * MONTHS_PER_YEAR for _ in range(node_count)]
    totals = [0] * node_count
    for node, month in zip(crime_nodes, crime_months):
        monthly[node][month - 1] += 1
        totals[node] += 1
    return [
        NodeActivitySeries(
            node=i,
            activity=tuple(1 if c > 0 else 0 for c in monthly[i]),
            total=totals[i],
        )
        for i in range(node_count)
    ]


def stationary_probability(p_stay_active: float, p_turn_active: float) -> float:
    """Stationary P(active) of the 2-state chain: b / (1 - a + b)."""
    denom = 1.0 - p_stay_active + p_turn_active
    if denom <= 0.0:
        raise ValueError("degenerate chain: 1 - a + b must be positive")
    return p_turn_active / denom


def detect_hotspots(
    series: list[NodeActivitySeries],
    theta: float = 0.5,
    min_count: int = 5,
) -> list[HotspotResult]:
    """Score every node's series; hotspot iff stationary prob >= theta and
    total occurrences >= min_count."""
    results: list[HotspotResult] = []
    for s in series:
        n00 = n01 = n10 = n11 = 0
        for prev, cur in zip(s.activity, s.activity[1:]):
            if prev == 0:
                if cur == 0:
                    n00 += 1
                else:
                    n01 += 1
            else:
                if cur == 0:
                    n10 += 1
                else:
                    n11 += 1
        a = (n11 + 1.0) / (n10 + n11 + 2.0)
        b = (n01 + 1.0) / (n00 + n01 + 2.0)
        pi = stationary_probability(a, b)
        results.append(
            HotspotResult(
                node=s.node,
                p_stay_active=a,
                p_turn_active=b,
                stationary_prob=pi,
                is_hotspot=(pi >= theta and s.total >= min_count),
                count=s.total,
            )
        )
    return results
