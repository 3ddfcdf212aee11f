"""Per-pair latency and data-rate budgets of a PtMP backhaul link.

A hub/terminal pair's one-way latency is the sum of hub processing, air
transmission and terminal processing. Its data rate is the minimum of the
hub processor, air link and terminal processor rates. Any TDMA slot waiting
time belongs in the terminal processing term.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import InputError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

LATENCY_TARGET_S = 1e-3
RATE_TARGET_DS_BPS = 2.5e9
RATE_TARGET_US_BPS = 2.0e9
REL12_LATENCY_BAND_S = (5e-3, 35e-3)


class Direction(str, Enum):
    DS = "DS"
    US = "US"


@dataclass(frozen=True)
class LatencyBudget:
    t_proc_hub: float  # s
    t_air: float  # s
    t_proc_terminal: float  # s
    direction: Direction = Direction.DS

    def __post_init__(self) -> None:
        for name in ("t_proc_hub", "t_air", "t_proc_terminal"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InputError(f"{name} must be finite and >= 0, got {v!r}")
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class RateBudget:
    r_proc_hub: float  # bit/s
    r_air: float  # bit/s
    r_proc_terminal: float  # bit/s
    direction: Direction = Direction.DS

    def __post_init__(self) -> None:
        for name in ("r_proc_hub", "r_air", "r_proc_terminal"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise InputError(f"{name} must be finite and > 0, got {v!r}")
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class TargetVerdict:
    measured: float
    target: float
    passed: bool
    margin: float  # positive when the target is met with room to spare
    note: str = ""


def pair_latency(b: LatencyBudget) -> float:
    """One-way latency of a hub/terminal pair in seconds."""
    return b.t_proc_hub + b.t_air + b.t_proc_terminal


def pair_rate(b: RateBudget) -> float:
    """Data rate of a hub/terminal pair in bit/s."""
    return min(b.r_proc_hub, b.r_air, b.r_proc_terminal)


def aggregate_cluster_rate(pairs: Sequence[RateBudget], hub_rate: float) -> float:
    """Aggregate hub-to-terminals rate.

    The hub processor is shared by all pairs, while air and terminal limits
    apply per pair: ``min(hub_rate, sum(min(r_air, r_proc_terminal)))``.
    """
    if not pairs:
        raise InputError("at least one pair is required")
    if not math.isfinite(hub_rate) or hub_rate <= 0:
        raise InputError(f"hub_rate must be finite and > 0, got {hub_rate!r}")
    per_pair = math.fsum(min(p.r_air, p.r_proc_terminal) for p in pairs)
    return min(hub_rate, per_pair)


def air_time(distance_m: float) -> float:
    """Free-space propagation delay in seconds.

    Idealised: ignores framing, guard times and any processing in L1.
    """
    if not math.isfinite(distance_m) or distance_m < 0:
        raise InputError(f"distance must be finite and >= 0, got {distance_m!r}")
    return distance_m / SPEED_OF_LIGHT


def check_latency_target(one_way: float) -> TargetVerdict:
    """Pass iff the one-way latency is at most 1 ms."""
    if not math.isfinite(one_way) or one_way < 0:
        raise InputError(f"latency must be finite and >= 0, got {one_way!r}")
    passed = one_way <= LATENCY_TARGET_S
    note = ""
    lo, hi = REL12_LATENCY_BAND_S
    if not passed and one_way <= hi:
        note = f"within the 3GPP Rel-12 wireless backhaul range ({lo * 1e3:g}-{hi * 1e3:g} ms)"
    return TargetVerdict(one_way, LATENCY_TARGET_S, passed, LATENCY_TARGET_S - one_way, note)


@dataclass(frozen=True)
class RateVerdict:
    ds: TargetVerdict
    us: TargetVerdict

    @property
    def passed(self) -> bool:
        return self.ds.passed and self.us.passed


def check_rate_target(ds: float, us: float) -> RateVerdict:
    """Pass iff DS >= 2.5 Gbit/s and US >= 2.0 Gbit/s."""
    verdicts = []
    for value, target, label in ((ds, RATE_TARGET_DS_BPS, "DS"), (us, RATE_TARGET_US_BPS, "US")):
        if not math.isfinite(value) or value < 0:
            raise InputError(f"{label} rate must be finite and >= 0, got {value!r}")
        passed = value >= target
        verdicts.append(TargetVerdict(value, target, passed, value - target, "" if passed else f"{label} below target"))
    return RateVerdict(*verdicts)


# -- CSV ingestion ------------------------------------------------------------

BUDGET_COLUMNS = (
    "pair_id",
    "direction",
    "t_proc_hub_us",
    "t_air_us",
    "t_proc_terminal_us",
    "r_proc_hub_mbps",
    "r_air_mbps",
    "r_proc_terminal_mbps",
)


@dataclass(frozen=True)
class PairBudget:
    pair_id: str
    latency: LatencyBudget
    rate: RateBudget

    @property
    def direction(self) -> Direction:
        return self.latency.direction


def read_budget_csv(path: str | Path) -> list[PairBudget]:
    """One row per pair per direction; times in microseconds, rates in Mbit/s."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(BUDGET_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise InputError(f"{path}: missing columns {sorted(missing)}")
        out = []
        for line, row in enumerate(reader, start=2):
            try:
                direction = Direction(row["direction"].strip().upper())
                latency = LatencyBudget(
                    float(row["t_proc_hub_us"]) * 1e-6,
                    float(row["t_air_us"]) * 1e-6,
                    float(row["t_proc_terminal_us"]) * 1e-6,
                    direction,
                )
                rate = RateBudget(
                    float(row["r_proc_hub_mbps"]) * 1e6,
                    float(row["r_air_mbps"]) * 1e6,
                    float(row["r_proc_terminal_mbps"]) * 1e6,
                    direction,
                )
            except (ValueError, TypeError) as exc:
                raise InputError(f"{path}:{line}: {exc}") from None
            out.append(PairBudget(row["pair_id"], latency, rate))
    if not out:
        raise InputError(f"{path}: no budget rows")
    return out


@dataclass(frozen=True)
class LinkSummary:
    pairs: tuple[tuple[str, Direction, float, float], ...]  # id, dir, latency s, rate bit/s
    worst_latency: TargetVerdict
    aggregate: dict[Direction, float]
    rate: RateVerdict

    @property
    def passed(self) -> bool:
        return self.worst_latency.passed and self.rate.passed


def evaluate_link(budgets: Iterable[PairBudget]) -> LinkSummary:
    """Evaluate every pair and check the cluster against the backhaul targets.

    The hub processor rate of a direction is the smallest one listed for it.
    A direction without rows aggregates to 0 bit/s.
    """
    budgets = list(budgets)
    if not budgets:
        raise InputError("at least one pair budget is required")
    pairs = tuple(
        (b.pair_id, b.direction, pair_latency(b.latency), pair_rate(b.rate)) for b in budgets
    )
    worst = max(p[2] for p in pairs)
    aggregate = {}
    for d in Direction:
        rows = [b.rate for b in budgets if b.direction is d]
        aggregate[d] = aggregate_cluster_rate(rows, min(r.r_proc_hub for r in rows)) if rows else 0.0
    return LinkSummary(
        pairs,
        check_latency_target(worst),
        aggregate,
        check_rate_target(aggregate[Direction.DS], aggregate[Direction.US]),
    )
