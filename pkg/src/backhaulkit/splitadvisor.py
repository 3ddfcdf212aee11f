"""RAN functional-split feasibility for a given fronthaul/backhaul profile.

Requirements per split, the technology catalog and the split-point advice
are bundled as editable data files (``splits.csv``, ``backhaul_catalog.csv``,
``split_advice.txt``). Latency requirements are compared against round-trip
latency.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

from ._data import data_dir, data_path
from .errors import CatalogLookupError, ConfigurationError, InputError


class Mode(str, Enum):
    OPTIMISTIC = "optimistic"  # lenient end of ranged requirements
    STRICT = "strict"  # demanding end


class Topology(str, Enum):
    PTP = "PtP"
    PTMP = "PtMP"
    RING = "Ring"
    MESH = "Mesh"


@dataclass(frozen=True)
class SplitRequirement:
    split_id: int
    name: str
    bw_min: float  # bit/s
    bw_max: float
    latency_min: float  # s, round trip
    latency_max: float
    bw_text: str = ""
    latency_text: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.split_id <= 6:
            raise InputError(f"split_id must be in 1..6, got {self.split_id}")
        if not 0 < self.bw_min <= self.bw_max:
            raise InputError(f"split {self.split_id}: need 0 < bw_min <= bw_max")
        if not 0 < self.latency_min <= self.latency_max:
            raise InputError(f"split {self.split_id}: need 0 < latency_min <= latency_max")

    def required(self, mode: Mode) -> tuple[float, float]:
        """(minimum bandwidth, maximum latency) the profile must offer."""
        if Mode(mode) is Mode.OPTIMISTIC:
            return self.bw_min, self.latency_max
        return self.bw_max, self.latency_min


@dataclass(frozen=True)
class FronthaulProfile:
    bandwidth: float  # bit/s
    latency: float  # s, round trip
    technology_tag: str | None = None
    topology: Topology | None = None
    los: str | None = None  # "LOS" or "NLOS"

    def __post_init__(self) -> None:
        if not math.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise InputError(f"bandwidth must be finite and > 0, got {self.bandwidth!r}")
        if not math.isfinite(self.latency) or self.latency <= 0:
            raise InputError(f"latency must be finite and > 0, got {self.latency!r}")
        if self.topology is not None:
            object.__setattr__(self, "topology", Topology(self.topology))
        if self.los is not None and self.los not in ("LOS", "NLOS"):
            raise InputError(f"los must be LOS or NLOS, got {self.los!r}")


@dataclass(frozen=True)
class SplitRow:
    split_id: int
    name: str
    required_bw: float
    required_latency: float
    offered_bw: float
    offered_latency: float
    passed: bool


@dataclass(frozen=True)
class Advice:
    split_point: str  # PHY, MAC, PDCP or NONE
    pros: str
    cons: str


@dataclass(frozen=True)
class SplitVerdict:
    profile: FronthaulProfile
    mode: Mode
    rows: tuple[SplitRow, ...]
    advice: Advice

    @property
    def feasible(self) -> list[int]:
        return [r.split_id for r in self.rows if r.passed]

    @property
    def max_split(self) -> int | None:
        feasible = self.feasible
        return max(feasible) if feasible else None


# -- bundled data -------------------------------------------------------------


def _read_csv(name: str) -> list[dict[str, str]]:
    path = data_path(name)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except (OSError, csv.Error, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from None


@lru_cache(maxsize=8)
def _split_table(directory: Path) -> tuple[SplitRequirement, ...]:
    rows = []
    try:
        for r in _read_csv("splits.csv"):
            rows.append(
                SplitRequirement(
                    int(r["split_id"]),
                    r["name"],
                    float(r["bw_min_bps"]),
                    float(r["bw_max_bps"]),
                    float(r["latency_min_s"]),
                    float(r["latency_max_s"]),
                    r.get("bw_text", ""),
                    r.get("latency_text", ""),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed splits.csv: {exc}") from None
    if [r.split_id for r in rows] != list(range(1, 7)):
        raise ConfigurationError("splits.csv must list splits 1..6 in order")
    for a, b in zip(rows, rows[1:]):
        if b.bw_min < a.bw_min or b.bw_max < a.bw_max:
            raise ConfigurationError("split bandwidth requirements must not decrease with split id")
        if b.latency_max > a.latency_max or b.latency_min > a.latency_min:
            raise ConfigurationError("split latency budgets must not increase with split id")
    return tuple(rows)


def load_split_table() -> list[SplitRequirement]:
    """Bandwidth and round-trip latency requirements of splits 1..6."""
    return list(_split_table(data_dir()))


@dataclass(frozen=True)
class CatalogEntry:
    technology_id: str
    ref: str
    description: str
    bandwidth: float  # bit/s, upper bound of the quoted range
    latency_rtt: float | None  # s, upper bound
    latency_rtt_per_km: float | None  # s/km, fibre rows
    topology: Topology | None
    los: str | None
    duplexing: str
    multiplexing: str
    bandwidth_text: str
    latency_text: str

    @classmethod
    def from_row(cls, row: dict[str, str]) -> CatalogEntry:
        def opt_float(key):
            v = row.get(key, "").strip()
            return float(v) if v else None

        def opt_str(key):
            v = row.get(key, "").strip()
            return v or None

        topology = opt_str("topology")
        return cls(
            row["technology_id"].strip(),
            row.get("ref", ""),
            row.get("description", ""),
            float(row["bandwidth_bps"]),
            opt_float("latency_rtt_s"),
            opt_float("latency_rtt_per_km_s"),
            Topology(topology) if topology else None,
            opt_str("los"),
            row.get("duplexing", ""),
            row.get("multiplexing", ""),
            row.get("bandwidth_text", ""),
            row.get("latency_text", ""),
        )

    def to_row(self) -> dict[str, str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, Enum):
                return v.value
            return repr(v) if isinstance(v, float) else str(v)

        return {
            "technology_id": self.technology_id,
            "ref": self.ref,
            "description": self.description,
            "bandwidth_bps": fmt(self.bandwidth),
            "latency_rtt_s": fmt(self.latency_rtt),
            "latency_rtt_per_km_s": fmt(self.latency_rtt_per_km),
            "topology": fmt(self.topology),
            "los": fmt(self.los),
            "duplexing": self.duplexing,
            "multiplexing": self.multiplexing,
            "bandwidth_text": self.bandwidth_text,
            "latency_text": self.latency_text,
        }


@lru_cache(maxsize=8)
def _catalog(directory: Path) -> dict[str, CatalogEntry]:
    out = {}
    try:
        for row in _read_csv("backhaul_catalog.csv"):
            entry = CatalogEntry.from_row(row)
            if (entry.latency_rtt is None) == (entry.latency_rtt_per_km is None):
                raise ConfigurationError(
                    f"{entry.technology_id}: exactly one of latency_rtt_s / latency_rtt_per_km_s is required"
                )
            out[entry.technology_id] = entry
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed backhaul_catalog.csv: {exc}") from None
    return out


def load_catalog() -> dict[str, CatalogEntry]:
    return dict(_catalog(data_dir()))


@lru_cache(maxsize=8)
def _advice_blocks(directory: Path) -> tuple[dict[int, Advice], Advice]:
    path = data_path("split_advice.txt")
    blocks: dict[str, dict[str, str]] = {}
    current = None
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = blocks.setdefault(line[1:-1], {})
            continue
        if current is None or ":" not in line:
            raise ConfigurationError(f"malformed line in {path}: {raw!r}")
        key, _, value = line.partition(":")
        current[key.strip()] = value.strip()
    by_split = {}
    fallback = None
    for point, fields in blocks.items():
        try:
            advice = Advice(point, fields["pros"], fields["cons"])
        except KeyError as exc:
            raise ConfigurationError(f"{path}: block [{point}] lacks {exc}") from None
        splits = fields.get("splits", "").split()
        if not splits:
            fallback = advice
        for s in splits:
            by_split[int(s)] = advice
    if fallback is None or sorted(by_split) != list(range(1, 7)):
        raise ConfigurationError(f"{path}: must cover splits 1..6 and one block without splits")
    return by_split, fallback


def split_advice(split_id: int | None) -> Advice:
    """Advice text for the split point containing ``split_id`` (None: no split)."""
    by_split, fallback = _advice_blocks(data_dir())
    return fallback if split_id is None else by_split[split_id]


# -- operations ---------------------------------------------------------------


def feasible_splits(p: FronthaulProfile, mode: Mode | str = Mode.OPTIMISTIC) -> SplitVerdict:
    """Check every split's bandwidth and latency requirement against ``p``.

    Bounds are inclusive: a profile exactly at a requirement meets it.
    """
    mode = Mode(mode)
    rows = []
    for req in load_split_table():
        bw, lat = req.required(mode)
        rows.append(
            SplitRow(req.split_id, req.name, bw, lat, p.bandwidth, p.latency,
                     p.bandwidth >= bw and p.latency <= lat)
        )
    feasible = [r.split_id for r in rows if r.passed]
    return SplitVerdict(p, mode, tuple(rows), split_advice(max(feasible) if feasible else None))


def catalog_profile(technology_id: str, distance_km: float | None = None) -> FronthaulProfile:
    """Profile of a catalog technology (upper-bound throughput and latency).

    Fibre rows quote latency per km and need ``distance_km``.
    """
    catalog = _catalog(data_dir())
    try:
        entry = catalog[technology_id]
    except KeyError:
        raise CatalogLookupError(
            f"unknown technology {technology_id!r}; known: {', '.join(sorted(catalog))}"
        ) from None
    if entry.latency_rtt_per_km is not None:
        if distance_km is None:
            raise InputError(f"{technology_id} latency depends on distance; distance_km is required")
        if not math.isfinite(distance_km) or distance_km <= 0:
            raise InputError(f"distance_km must be finite and > 0, got {distance_km!r}")
        latency = entry.latency_rtt_per_km * distance_km
    else:
        latency = entry.latency_rtt
    return FronthaulProfile(entry.bandwidth, latency, entry.technology_id, entry.topology, entry.los)


def advise(
    technology: str | FronthaulProfile,
    mode: Mode | str = Mode.OPTIMISTIC,
    distance_km: float | None = None,
) -> SplitVerdict:
    if isinstance(technology, FronthaulProfile):
        profile = technology
    else:
        profile = catalog_profile(technology, distance_km)
    return feasible_splits(profile, mode)
