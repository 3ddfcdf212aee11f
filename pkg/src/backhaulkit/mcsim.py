"""Event-driven Monte-Carlo simulation of a PtMP cluster.

Every node alternates exponentially distributed up phases (mean MTBF) and
down phases (mean MTTR). The cluster is available while the hub condition
holds (the single hub up, or at least one of a 1:1 hub pair up) and at least
``m_required`` terminals are up. Up terminals are attached to up hubs by an
instantaneous rebalancing rule, whose load split is tracked as a
time-weighted Gini coefficient.

Each replication draws from its own stream derived from ``(seed, index)``,
so results do not depend on how replications are scheduled across threads.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from numba import njit

from .errors import InputError
from .fairness import gini
from .reliability import ClusterSpec


class RebalancePolicy(str, Enum):
    GREEDY = "greedy"  # rebuild every assignment, fewest-terminals hub first
    STICKY = "sticky"  # keep assignments; only place orphaned or recovered terminals


_POLICY_CODE = {RebalancePolicy.GREEDY: 0, RebalancePolicy.STICKY: 1}


@dataclass(frozen=True)
class SimConfig:
    cluster: ClusterSpec
    horizon: float  # hours per replication
    seed: int
    replications: int = 1
    policy: RebalancePolicy = RebalancePolicy.GREEDY
    # start each node in its stationary state instead of "all up"
    stationary_start: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.cluster, ClusterSpec):
            raise InputError("cluster must be a ClusterSpec")
        if not math.isfinite(self.horizon) or self.horizon <= 0:
            raise InputError(f"horizon must be finite and > 0, got {self.horizon!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InputError(f"replications must be >= 1, got {self.replications!r}")
        object.__setattr__(self, "policy", RebalancePolicy(self.policy))


@dataclass(frozen=True)
class SimResult:
    estimated_availability: float
    stderr: float  # nan with a single replication
    available_time: float  # hours, summed over replications
    event_count: int
    hub_load_gini: float
    rebalance_count: int
    replication_estimates: tuple[float, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class ClusterState:
    """Up/down flags of hubs and terminals plus the terminal -> hub map.

    Indices are zero-based; hub ``h`` is displayed as ``H{h+1}`` and terminal
    ``t`` as ``T{t+1}``.
    """

    hub_up: tuple[bool, ...]
    terminal_up: tuple[bool, ...]
    assignment: dict[int, int] = field(default_factory=dict)

    def hub_loads(self) -> list[int]:
        loads = [0] * len(self.hub_up)
        for hub in self.assignment.values():
            loads[hub] += 1
        return loads

    @property
    def any_hub_up(self) -> bool:
        return any(self.hub_up)


def rebalance(state: ClusterState, policy: RebalancePolicy = RebalancePolicy.GREEDY) -> ClusterState:
    """Attach every up terminal to an up hub.

    Assignments to down hubs or of down terminals are dropped first. Under
    the greedy policy every remaining assignment is rebuilt; under the sticky
    policy valid assignments are kept. Unassigned up terminals are then
    placed, in index order, on the up hub with the fewest terminals (ties go
    to the lower hub index). With no hub up the map is empty.
    """
    policy = RebalancePolicy(policy)
    assignment = {
        t: h
        for t, h in state.assignment.items()
        if state.terminal_up[t] and state.hub_up[h]
    }
    if policy is RebalancePolicy.GREEDY:
        assignment = {}
    loads = [0] * len(state.hub_up)
    for h in assignment.values():
        loads[h] += 1
    up_hubs = [h for h, up in enumerate(state.hub_up) if up]
    if up_hubs:
        for t, up in enumerate(state.terminal_up):
            if up and t not in assignment:
                best = min(up_hubs, key=lambda h: (loads[h], h))
                assignment[t] = best
                loads[best] += 1
    return ClusterState(state.hub_up, state.terminal_up, dict(sorted(assignment.items())))


# -- trajectory kernel --------------------------------------------------------


@njit(cache=True, nogil=True)
def _kernel_rebalance(up, n_hubs, assign, loads, policy):
    n_terms = assign.shape[0]
    for t in range(n_terms):
        h = assign[t]
        if h >= 0 and (policy == 0 or not up[n_hubs + t] or not up[h]):
            loads[h] -= 1
            assign[t] = -1
    for t in range(n_terms):
        if up[n_hubs + t] and assign[t] < 0:
            best = -1
            for h in range(n_hubs):
                if up[h] and (best < 0 or loads[h] < loads[best]):
                    best = h
            if best >= 0:
                assign[t] = best
                loads[best] += 1


@njit(cache=True, nogil=True)
def _kernel_available(up, n_hubs, n_terms, m_required):
    hubs_ok = False
    for h in range(n_hubs):
        if up[h]:
            hubs_ok = True
    if not hubs_ok:
        return False
    count = 0
    for t in range(n_terms):
        if up[n_hubs + t]:
            count += 1
    return count >= m_required


@njit(cache=True, nogil=True)
def _run_trajectory(
    times, nodes, initial_up, n_hubs, n_terms, m_required, horizon, policy,
    load_time, trace_available, trace_assign,
):
    up = initial_up.copy()
    assign = -np.ones(n_terms, dtype=np.int64)
    loads = np.zeros(n_hubs, dtype=np.int64)
    old = np.empty(n_terms, dtype=np.int64)
    record = trace_available.shape[0] > 0

    _kernel_rebalance(up, n_hubs, assign, loads, policy)
    available = _kernel_available(up, n_hubs, n_terms, m_required)
    unavailable_time = 0.0
    moves = 0
    prev = 0.0
    for e in range(times.shape[0]):
        t = times[e]
        dt = t - prev
        if not available:
            unavailable_time += dt
        if n_hubs == 2 and up[0] and up[1]:
            load_time[loads[0], loads[1]] += dt
        prev = t

        node = nodes[e]
        up[node] = not up[node]
        old[:] = assign
        _kernel_rebalance(up, n_hubs, assign, loads, policy)
        for k in range(n_terms):
            if old[k] >= 0 and assign[k] >= 0 and old[k] != assign[k]:
                moves += 1
        available = _kernel_available(up, n_hubs, n_terms, m_required)
        if record:
            trace_available[e] = available
            trace_assign[e, :] = assign

    dt = horizon - prev
    if not available:
        unavailable_time += dt
    if n_hubs == 2 and up[0] and up[1]:
        load_time[loads[0], loads[1]] += dt
    return unavailable_time, moves


def _node_transitions(rng, mtbf, mttr, starts_up, horizon):
    """Times at which one node changes state within ``[0, horizon)``."""
    if mttr == 0.0:
        return np.empty(0)
    chunk = int(horizon / (mtbf + mttr) * 1.2) + 16
    pieces = []
    elapsed = 0.0
    while elapsed < horizon:
        ups = rng.exponential(mtbf, chunk)
        downs = rng.exponential(mttr, chunk)
        phases = np.empty(2 * chunk)
        if starts_up:
            phases[0::2], phases[1::2] = ups, downs
        else:
            phases[0::2], phases[1::2] = downs, ups
        edges = elapsed + np.cumsum(phases)
        pieces.append(edges)
        elapsed = edges[-1]
    edges = np.concatenate(pieces)
    return edges[edges < horizon]


def _stream(seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replication,))))


def _replication_events(cfg: SimConfig, replication: int):
    spec = cfg.cluster
    n_nodes = spec.hub_count + spec.n_terminals
    mtbf, mttr = spec.node.mtbf, spec.node.mttr
    a = mtbf / (mtbf + mttr)
    rng = _stream(cfg.seed, replication)
    initial_up = np.ones(n_nodes, dtype=np.bool_)
    times, nodes = [], []
    for node in range(n_nodes):
        if cfg.stationary_start and mttr > 0:
            initial_up[node] = rng.random() < a
        edges = _node_transitions(rng, mtbf, mttr, bool(initial_up[node]), cfg.horizon)
        times.append(edges)
        nodes.append(np.full(edges.size, node, dtype=np.int64))
    times = np.concatenate(times)
    nodes = np.concatenate(nodes)
    order = np.argsort(times, kind="stable")
    return times[order], nodes[order], initial_up


def _run_replication(cfg: SimConfig, replication: int, trace: bool = False):
    spec = cfg.cluster
    times, nodes, initial_up = _replication_events(cfg, replication)
    n = spec.n_terminals
    load_time = np.zeros((n + 1, n + 1))
    if trace:
        trace_available = np.zeros(times.size, dtype=np.bool_)
        trace_assign = np.zeros((times.size, n), dtype=np.int64)
    else:
        trace_available = np.zeros(0, dtype=np.bool_)
        trace_assign = np.zeros((0, n), dtype=np.int64)
    unavailable, moves = _run_trajectory(
        times, nodes, initial_up, spec.hub_count, n, spec.m_required,
        float(cfg.horizon), _POLICY_CODE[cfg.policy], load_time, trace_available, trace_assign,
    )
    out = {
        "unavailable": float(unavailable),
        "moves": int(moves),
        "events": int(times.size),
        "load_time": load_time,
    }
    if trace:
        out["trace"] = (times, nodes, initial_up, trace_available, trace_assign)
    return out


def _time_weighted_gini(load_time: np.ndarray) -> float:
    weighted = 0.0
    total = 0.0
    for a, b in zip(*np.nonzero(load_time)):
        if a + b == 0:
            continue
        dt = load_time[a, b]
        weighted += float(dt) * gini([a, b])
        total += float(dt)
    return weighted / total if total > 0 else 0.0


def simulate(cfg: SimConfig, n_jobs: int = 1) -> SimResult:
    """Run ``cfg.replications`` independent trajectories and pool them.

    The hub-load Gini is time-weighted over the periods in which both hubs of
    a 1:1 pair are up and at least one terminal is attached; it is 0 for a
    single-hub cluster.
    """
    reps = range(cfg.replications)
    if n_jobs > 1 and cfg.replications > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outs = list(pool.map(lambda r: _run_replication(cfg, r), reps))
    else:
        outs = [_run_replication(cfg, r) for r in reps]

    total_time = cfg.horizon * cfg.replications
    unavailable = math.fsum(o["unavailable"] for o in outs)
    estimates = np.array([1.0 - o["unavailable"] / cfg.horizon for o in outs])
    if cfg.replications > 1:
        stderr = float(np.std(estimates, ddof=1) / math.sqrt(cfg.replications))
    else:
        stderr = float("nan")
    load_time = sum(o["load_time"] for o in outs)
    hub_gini = _time_weighted_gini(load_time) if cfg.cluster.hub_count == 2 else 0.0
    return SimResult(
        estimated_availability=1.0 - unavailable / total_time,
        stderr=stderr,
        available_time=total_time - unavailable,
        event_count=sum(o["events"] for o in outs),
        hub_load_gini=hub_gini,
        rebalance_count=sum(o["moves"] for o in outs),
        replication_estimates=tuple(estimates.tolist()),
    )


TRACE_COLUMNS = ("time_h", "event", "node_id", "cluster_available", "assignment")


def _node_label(node: int, n_hubs: int) -> str:
    return f"H{node + 1}" if node < n_hubs else f"T{node - n_hubs + 1}"


def trace_rows(cfg: SimConfig, replication: int = 0):
    """Per-event rows of one replication, in event order."""
    n_hubs = cfg.cluster.hub_count
    out = _run_replication(cfg, replication, trace=True)
    times, nodes, initial_up, available, assign = out["trace"]
    up = initial_up.copy()
    rows = []
    for e in range(times.size):
        node = int(nodes[e])
        up[node] = not up[node]
        mapping = " ".join(
            f"T{t + 1}:{'-' if h < 0 else f'H{h + 1}'}" for t, h in enumerate(assign[e])
        )
        rows.append(
            {
                "time_h": f"{times[e]:.6f}",
                "event": "repair" if up[node] else "fail",
                "node_id": _node_label(node, n_hubs),
                "cluster_available": int(available[e]),
                "assignment": mapping,
            }
        )
    return rows


def write_trace_csv(cfg: SimConfig, path: str | Path, replication: int = 0) -> int:
    """Write the event trace of one replication to CSV; returns the row count."""
    rows = trace_rows(cfg, replication)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return len(rows)
