"""Steady-state availability of repairable nodes and redundant PtMP clusters.

Every quantity is carried as *unavailability* ``U = 1 - A``. Highly available
systems have ``U`` around 1e-11, which is far below the spacing of doubles
near 1.0, so products and sums are formed on the small complement and ``A``
is only derived at presentation time.

Nodes are assumed to fail and recover independently of each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

from .errors import InputError

HOURS_PER_YEAR = 8760.0
MINUTES_PER_YEAR = 525600.0
MAX_NINES = 20
BRUTE_FORCE_MAX_N = 20

# relative slack so that e.g. A = 0.99999 (stored as U = 1.0000000000065e-5)
# still counts as five nines
_NINES_RTOL = 1e-9


def _check_fraction(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InputError(f"{name} must be a finite value in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class NodeReliability:
    """MTBF/MTTR pair of one repairable node, both in hours."""

    mtbf: float
    mttr: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mtbf) or self.mtbf <= 0:
            raise InputError(f"mtbf must be finite and > 0, got {self.mtbf!r}")
        if not math.isfinite(self.mttr) or self.mttr < 0:
            raise InputError(f"mttr must be finite and >= 0, got {self.mttr!r}")


@dataclass(frozen=True)
class Availability:
    """Availability stored through its complement, the unavailability."""

    unavailability: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "unavailability", _check_fraction("unavailability", self.unavailability)
        )

    @classmethod
    def from_value(cls, a: float) -> Availability:
        a = _check_fraction("availability", a)
        return cls(1.0 - a)

    @property
    def value(self) -> float:
        return 1.0 - self.unavailability

    def __float__(self) -> float:
        return self.value


AvailabilityLike = Union[Availability, float]


def as_availability(a: AvailabilityLike) -> Availability:
    if isinstance(a, Availability):
        return a
    return Availability.from_value(a)


@dataclass(frozen=True)
class AvailabilityReport:
    availability: Availability
    downtime_per_year: float  # minutes
    nines: int

    @property
    def value(self) -> float:
        return self.availability.value

    @property
    def unavailability(self) -> float:
        return self.availability.unavailability


# -- reliability block diagram ------------------------------------------------


@dataclass(frozen=True)
class Unit:
    """Leaf block: a single node, or a block with a known availability."""

    node: NodeReliability | Availability


@dataclass(frozen=True)
class Series:
    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", tuple(children))
        if not self.children:
            raise InputError("Series needs at least one child")


@dataclass(frozen=True)
class Parallel:
    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", tuple(children))
        if not self.children:
            raise InputError("Parallel needs at least one child")


@dataclass(frozen=True)
class KofN:
    """Up iff at least ``m`` of ``n`` identical nodes are up."""

    n: int
    m: int
    node: NodeReliability | Availability

    def __post_init__(self) -> None:
        _check_k_of_n(self.n, self.m)


ReliabilityExpr = Union[Unit, Series, Parallel, KofN]


def _check_k_of_n(n: int, m: int) -> None:
    if int(n) != n or int(m) != m:
        raise InputError(f"n and m must be integers, got n={n!r}, m={m!r}")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not 1 <= m <= n:
        raise InputError(f"m must satisfy 1 <= m <= n, got m={m}, n={n}")


def _leaf_availability(node: NodeReliability | Availability) -> Availability:
    if isinstance(node, NodeReliability):
        return node_availability(node)
    if isinstance(node, Availability):
        return node
    raise InputError(f"expected NodeReliability or Availability, got {type(node).__name__}")


# -- operations ---------------------------------------------------------------


def node_availability(node: NodeReliability) -> Availability:
    """``A = MTBF / (MTBF + MTTR)``; the complement is formed directly."""
    if not isinstance(node, NodeReliability):
        raise InputError(f"expected NodeReliability, got {type(node).__name__}")
    return Availability(node.mttr / (node.mtbf + node.mttr))


def downtime_per_year(a: AvailabilityLike) -> float:
    """Expected downtime in minutes over a 365-day year."""
    return as_availability(a).unavailability * MINUTES_PER_YEAR


def nines(a: AvailabilityLike) -> int:
    """Largest ``k`` with ``A >= 1 - 10**-k``, saturating at ``MAX_NINES``.

    Exact boundaries count, so 99.9 % is three nines.
    """
    u = as_availability(a).unavailability
    k = 0
    while k < MAX_NINES and u <= 10.0 ** -(k + 1) * (1.0 + _NINES_RTOL):
        k += 1
    return k


def k_of_n_availability(n: int, m: int, a: AvailabilityLike) -> Availability:
    """Availability of ``n`` identical nodes of which at least ``m`` must be up.

    The unavailability is accumulated over the failing tail (more than
    ``n - m`` nodes down), which keeps full relative precision when ``A``
    is close to 1.
    """
    _check_k_of_n(n, m)
    av = as_availability(a)
    u, up = av.unavailability, av.value
    tail = sum(math.comb(n, i) * up ** (n - i) * u**i for i in range(n - m + 1, n + 1))
    return Availability(min(max(tail, 0.0), 1.0))


def brute_force_k_of_n(n: int, m: int, a: AvailabilityLike) -> Availability:
    """Enumerate all ``2**n`` up/down states and sum those with ``>= m`` up."""
    _check_k_of_n(n, m)
    if n > BRUTE_FORCE_MAX_N:
        raise InputError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    av = as_availability(a)
    p_up, p_down = av.value, av.unavailability
    total = 0.0
    for states in itertools.product((True, False), repeat=n):
        n_up = sum(states)
        if n_up >= m:
            total += p_up**n_up * p_down ** (n - n_up)
    return Availability.from_value(min(max(total, 0.0), 1.0))


def _series_unavailability(us: list[float]) -> float:
    if any(u >= 1.0 for u in us):
        return 1.0
    return -math.expm1(math.fsum(math.log1p(-u) for u in us))


def eval_expr(expr: ReliabilityExpr) -> Availability:
    """Evaluate a reliability block diagram to an availability."""
    match expr:
        case Unit(node=node):
            return _leaf_availability(node)
        case Series(children=children):
            us = [eval_expr(c).unavailability for c in children]
            return Availability(min(max(_series_unavailability(us), 0.0), 1.0))
        case Parallel(children=children):
            return Availability(math.prod(eval_expr(c).unavailability for c in children))
        case KofN(n=n, m=m, node=node):
            return k_of_n_availability(n, m, _leaf_availability(node))
    raise InputError(f"not a reliability expression: {expr!r}")


@dataclass(frozen=True)
class ClusterSpec:
    """PtMP cluster of identical nodes: one or two hubs, ``m_required`` of
    ``n_terminals`` terminals needed."""

    hub_count: int
    n_terminals: int
    m_required: int
    node: NodeReliability

    def __post_init__(self) -> None:
        if self.hub_count not in (1, 2):
            raise InputError(f"hub_count must be 1 or 2, got {self.hub_count!r}")
        _check_k_of_n(self.n_terminals, self.m_required)
        if not isinstance(self.node, NodeReliability):
            raise InputError("node must be a NodeReliability")

    def block_diagram(self) -> ReliabilityExpr:
        if self.hub_count == 1:
            hubs: ReliabilityExpr = Unit(self.node)
        else:
            hubs = Parallel([Unit(self.node), Unit(self.node)])
        return Series([hubs, KofN(self.n_terminals, self.m_required, self.node)])


def report(a: AvailabilityLike) -> AvailabilityReport:
    av = as_availability(a)
    return AvailabilityReport(av, downtime_per_year(av), nines(av))


def cluster_availability(spec: ClusterSpec) -> AvailabilityReport:
    """Hub block (single node or 1:1 pair) in series with the terminal
    k-out-of-n block."""
    return report(eval_expr(spec.block_diagram()))


def format_duration(minutes: float) -> str:
    """Human-readable rendering of a yearly downtime given in minutes."""
    if minutes == 0:
        return "0 s"
    if minutes >= 1440:
        return f"{minutes / 1440:.4g} days"
    if minutes >= 60:
        return f"{minutes / 60:.4g} hours"
    if minutes >= 1:
        return f"{minutes:.4g} min"
    if minutes >= 1 / 60:
        return f"{minutes * 60:.4g} s"
    return f"{minutes * 60000:.4g} ms"
