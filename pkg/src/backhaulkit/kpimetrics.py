"""KPI formulas over measurement traces and the per-scenario target registry.

The registry (``kpi_targets.csv``) encodes each requirement with a
comparator: ``>=`` for "min X" style floors, ``<=`` for "max X" caps, ``<``
where the requirement is written as a strict bound, and ``info`` for rows
that are not pass/fail gates ("up to X", "On demand", ...). Boundary values
pass the inclusive comparators.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._data import data_dir, data_path
from .errors import CatalogLookupError, ConfigurationError, InputError

CELL_EDGE_PERCENTILE = 0.05


def _positive(name: str, value: float) -> float:
    if not math.isfinite(value) or value <= 0:
        raise InputError(f"{name} must be finite and > 0, got {value!r}")
    return value


def _non_negative(name: str, value: float) -> float:
    if not math.isfinite(value) or value < 0:
        raise InputError(f"{name} must be finite and >= 0, got {value!r}")
    return value


# -- data rate ----------------------------------------------------------------


def per_user_throughput(bits: float, runtime: float) -> float:
    """Information bits received by a user over the run time, in bit/s."""
    return _non_negative("bits", bits) / _positive("runtime", runtime)


def avg_cell_throughput(total_bits: float, n_cells: int, duration: float) -> float:
    """Bits received by all users per cell and per second."""
    if n_cells < 1:
        raise InputError(f"n_cells must be >= 1, got {n_cells!r}")
    return _non_negative("total_bits", total_bits) / (n_cells * _positive("duration", duration))


def cell_edge_throughput(per_user: Sequence[float]) -> float:
    """5th percentile of per-user throughput.

    Linear interpolation between order statistics at rank ``0.05 (n - 1)``.
    """
    values = np.sort(np.asarray(per_user, dtype=float).ravel())
    if values.size == 0:
        raise InputError("at least one user throughput is required")
    rank = CELL_EDGE_PERCENTILE * (values.size - 1)
    lo = math.floor(rank)
    hi = math.ceil(rank)
    return float(values[lo] + (rank - lo) * (values[hi] - values[lo]))


# -- reliability --------------------------------------------------------------


def _packet_counts(delivered: int, sent: int) -> None:
    if sent < 1:
        raise InputError(f"sent must be >= 1, got {sent!r}")
    if not 0 <= delivered <= sent:
        raise InputError(f"delivered must be in [0, sent], got {delivered!r} of {sent!r}")


def reliability_rate(delivered_in_deadline: int, sent: int) -> float:
    """Share of sent packets delivered within the service deadline."""
    _packet_counts(delivered_in_deadline, sent)
    return delivered_in_deadline / sent


def packet_loss_ratio(delivered: int, sent: int) -> float:
    _packet_counts(delivered, sent)
    return (sent - delivered) / sent


# -- energy, spectrum, connection ---------------------------------------------


def energy_efficiency(bits: float, joules: float) -> float:
    """Bits transmitted per joule."""
    return _non_negative("bits", bits) / _positive("joules", joules)


def energy_per_mbit(bits: float, joules: float) -> float:
    """Joules spent per Mbit delivered (the unit of the "joule/Mbps" target)."""
    return _non_negative("joules", joules) / (_positive("bits", bits) / 1e6)


def spectrum_efficiency(peak_rate: float, bandwidth: float) -> float:
    """Peak data rate normalised by bandwidth, bit/s/Hz."""
    return _non_negative("peak_rate", peak_rate) / _positive("bandwidth", bandwidth)


def connection_density(devices: int, area_km2: float) -> float:
    """Simultaneously connected devices per km^2."""
    return _non_negative("devices", devices) / _positive("area_km2", area_km2)


# -- virtualisation economics -------------------------------------------------


def deployment_efficiency(throughput: float, capex_plus_opex: float) -> float:
    """System throughput per unit of deployment cost."""
    return _non_negative("throughput", throughput) / _positive("capex_plus_opex", capex_plus_opex)


def profit(revenue: float, cost: float) -> float:
    return revenue - cost


def rcr(revenue: float, cost: float) -> float:
    """Revenue to cost ratio."""
    return revenue / _positive("cost", cost)


def network_utilisation(used: float, total: float) -> float:
    """Share of the substrate resources in use."""
    _positive("total", total)
    if not 0 <= used <= total:
        raise InputError(f"used must be in [0, total], got {used!r} of {total!r}")
    return used / total


# -- traces -------------------------------------------------------------------

TRACE_COLUMNS = (
    "user_id",
    "cell_id",
    "bits_delivered",
    "sent_packets",
    "delivered_packets",
    "delivered_in_deadline",
    "active_time_s",
    "energy_j",
)


@dataclass(frozen=True)
class TraceRecord:
    user_id: str
    cell_id: str
    bits_delivered: int
    sent_packets: int
    delivered_packets: int
    delivered_in_deadline: int
    active_time: float  # s
    energy: float | None = None  # J

    def __post_init__(self) -> None:
        for name in ("bits_delivered", "sent_packets", "delivered_packets", "delivered_in_deadline"):
            _non_negative(name, getattr(self, name))
        _non_negative("active_time", self.active_time)
        if self.energy is not None:
            _non_negative("energy", self.energy)
        if not self.delivered_in_deadline <= self.delivered_packets <= self.sent_packets:
            raise InputError(
                f"user {self.user_id}: need delivered_in_deadline <= delivered_packets <= sent_packets"
            )


def read_trace_csv(path: str | Path) -> list[TraceRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRACE_COLUMNS[:-1]) - set(reader.fieldnames or ())
        if missing:
            raise InputError(f"{path}: missing columns {sorted(missing)}")
        records = []
        for line, row in enumerate(reader, start=2):
            try:
                energy = (row.get("energy_j") or "").strip()
                records.append(
                    TraceRecord(
                        row["user_id"],
                        row["cell_id"],
                        int(row["bits_delivered"]),
                        int(row["sent_packets"]),
                        int(row["delivered_packets"]),
                        int(row["delivered_in_deadline"]),
                        float(row["active_time_s"]),
                        float(energy) if energy else None,
                    )
                )
            except (TypeError, ValueError) as exc:
                raise InputError(f"{path}:{line}: {exc}") from None
    if not records:
        raise InputError(f"{path}: no trace records")
    return records


def trace_kpis(records: Iterable[TraceRecord], duration: float | None = None) -> dict[str, float]:
    """KPIs measurable from a trace, keyed by registry name.

    ``duration`` defaults to the longest active time in the trace. Energy
    KPIs are included only when every record carries an energy value.
    """
    records = list(records)
    if not records:
        raise InputError("at least one trace record is required")
    if duration is None:
        duration = max(r.active_time for r in records)
    _positive("duration", duration)
    sent = sum(r.sent_packets for r in records)
    bits = sum(r.bits_delivered for r in records)
    out = {
        "reliability_rate": reliability_rate(sum(r.delivered_in_deadline for r in records), sent),
        "packet_loss_ratio": packet_loss_ratio(sum(r.delivered_packets for r in records), sent),
        "average_cell_throughput": avg_cell_throughput(
            bits, len({r.cell_id for r in records}), duration
        ),
    }
    per_user = [per_user_throughput(r.bits_delivered, r.active_time) for r in records if r.active_time > 0]
    if per_user:
        out["cell_edge_throughput"] = cell_edge_throughput(per_user)
    if all(r.energy is not None for r in records):
        joules = math.fsum(r.energy for r in records)
        if joules > 0:
            out["energy_efficiency"] = energy_efficiency(bits, joules)
        if bits > 0:
            out["energy_per_mbit"] = energy_per_mbit(bits, joules)
    return out


# -- target registry ----------------------------------------------------------


class Comparator(str, Enum):
    GE = ">="
    LE = "<="
    LT = "<"
    INFO = "info"

    def holds(self, measured: float, threshold: float) -> bool:
        if self is Comparator.GE:
            return measured >= threshold
        if self is Comparator.LE:
            return measured <= threshold
        if self is Comparator.LT:
            return measured < threshold
        raise ValueError("informational rows have no pass/fail rule")


@dataclass(frozen=True)
class KpiTarget:
    kpi: str
    comparator: Comparator
    threshold: float | None
    unit: str
    requirement: str
    note: str = ""


@dataclass(frozen=True)
class KpiTargetSet:
    scenario: str
    rows: tuple[KpiTarget, ...]


SCENARIOS = ("broadband", "massive_iot", "ultra_reliable", "high_speed")


@lru_cache(maxsize=8)
def _registry(directory: Path) -> dict[str, KpiTargetSet]:
    path = data_path("kpi_targets.csv")
    by_scenario: dict[str, list[KpiTarget]] = {}
    comparators: dict[str, tuple[Comparator, str]] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                comp = Comparator(row["comparator"].strip())
                text = row["threshold"].strip()
                threshold = float(text) if text else None
                if comp is not Comparator.INFO and threshold is None:
                    raise ConfigurationError(f"{path}: {row['kpi']} needs a threshold")
                target = KpiTarget(row["kpi"].strip(), comp, threshold, row["unit"].strip(),
                                   row["requirement"], row.get("note", "") or "")
                if comp is not Comparator.INFO:
                    seen = comparators.setdefault(target.kpi, (comp, target.unit))
                    if seen != (comp, target.unit):
                        raise ConfigurationError(
                            f"{path}: {target.kpi} uses inconsistent comparator or unit across scenarios"
                        )
                by_scenario.setdefault(row["scenario"].strip(), []).append(target)
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed {path}: {exc}") from None
    return {s: KpiTargetSet(s, tuple(rows)) for s, rows in by_scenario.items()}


def load_targets(scenario: str) -> KpiTargetSet:
    registry = _registry(data_dir())
    try:
        return registry[scenario]
    except KeyError:
        raise CatalogLookupError(
            f"unknown scenario {scenario!r}; known: {', '.join(sorted(registry))}"
        ) from None


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_EVALUATED = "not evaluated"
    INFORMATIONAL = "informational"


@dataclass(frozen=True)
class KpiRow:
    kpi: str
    measured: float | None
    target: KpiTarget
    status: Status

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS


@dataclass(frozen=True)
class KpiReport:
    scenario: str
    rows: tuple[KpiRow, ...]

    def gated(self) -> list[KpiRow]:
        return [r for r in self.rows if r.target.comparator is not Comparator.INFO]

    @property
    def evaluated(self) -> list[KpiRow]:
        return [r for r in self.gated() if r.status is not Status.NOT_EVALUATED]

    @property
    def passed(self) -> bool:
        """Every evaluated gate passes and at least one gate was evaluated."""
        evaluated = self.evaluated
        return bool(evaluated) and all(r.passed for r in evaluated)

    @property
    def complete(self) -> bool:
        """No gated KPI is missing a measurement."""
        return all(r.status is not Status.NOT_EVALUATED for r in self.gated())


def check_targets(measured: Mapping[str, float], scenario: str) -> KpiReport:
    """Compare measurements against the scenario's registry rows.

    Missing measurements are reported as not evaluated, never as passing.
    """
    targets = load_targets(scenario)
    rows = []
    for t in targets.rows:
        value = measured.get(t.kpi)
        if value is not None:
            value = float(value)
            if not math.isfinite(value):
                raise InputError(f"{t.kpi}: measurement must be finite, got {value!r}")
        if t.comparator is Comparator.INFO:
            status = Status.INFORMATIONAL
        elif value is None:
            status = Status.NOT_EVALUATED
        else:
            status = Status.PASS if t.comparator.holds(value, t.threshold) else Status.FAIL
        rows.append(KpiRow(t.kpi, value, t, status))
    return KpiReport(scenario, tuple(rows))
