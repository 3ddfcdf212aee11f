"""Synchronisation compliance: G.8262 EEC MTIE/TDEV masks, time-error
estimators, and frequency-accuracy / correction-field bounds.

MTIE and TDEV follow the usual metrology definitions:

* MTIE(tau) is the largest peak-to-peak time error over every window of
  ``floor(tau / tau0)`` sample intervals.
* TDEV(n tau0)^2 = 1 / (6 n^2 (N - 3n + 1)) *
  sum_j [ sum_{i=j}^{j+n-1} (x[i+2n] - 2 x[i+n] + x[i]) ]^2
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d
from scipy.signal import lfilter, lfilter_zi

from .errors import DomainError, InputError

DEFAULT_SAMPLE_INTERVAL = 1.0 / 30.0  # s
FILTER_CUTOFF_HZ = 10.0
TDEV_RECORD_FACTOR = 12  # minimum record length is 12 tau
FREQUENCY_ACCURACY_PPM = 4.6
CF_ACCURACY_NS = 80.0
GRID_POINTS_PER_DECADE = 10
UNIFORM_TIMESTAMP_TOL = 1e-6  # s

# floor(tau / tau0) must not lose a whole interval to rounding noise
_RATIO_EPS = 1e-9


@dataclass(frozen=True)
class MaskSegment:
    tau_lo: float  # exclusive
    tau_hi: float  # inclusive
    coefficient: float  # ns
    exponent: float


@dataclass(frozen=True)
class PiecewiseMask:
    name: str
    segments: tuple[MaskSegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise InputError("a mask needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.tau_hi != b.tau_lo:
                raise InputError(f"mask segments are not contiguous at tau={a.tau_hi}")
            left = a.coefficient * a.tau_hi**a.exponent
            right = b.coefficient * b.tau_lo**b.exponent
            if abs(left - right) > 1e-3 * max(left, right):
                raise InputError(f"mask is discontinuous at tau={a.tau_hi}")

    @property
    def tau_min(self) -> float:
        return self.segments[0].tau_lo

    @property
    def tau_max(self) -> float:
        return self.segments[-1].tau_hi

    def limit(self, tau: float) -> float:
        for seg in self.segments:
            if seg.tau_lo < tau <= seg.tau_hi:
                return seg.coefficient * tau**seg.exponent
        raise DomainError(
            f"{self.name} mask is defined for {self.tau_min} < tau <= {self.tau_max} s, got {tau!r}"
        )

    __call__ = limit


MTIE_G8262 = PiecewiseMask(
    "MTIE",
    (
        MaskSegment(0.1, 1.0, 40.0, 0.0),
        MaskSegment(1.0, 100.0, 40.0, 0.1),
        MaskSegment(100.0, 1000.0, 25.25, 0.2),
    ),
)

TDEV_G8262 = PiecewiseMask(
    "TDEV",
    (
        MaskSegment(0.1, 25.0, 3.2, 0.0),
        MaskSegment(25.0, 100.0, 0.64, 0.5),
        MaskSegment(100.0, 1000.0, 6.4, 0.0),
    ),
)


def mtie_mask_g8262(tau: float) -> float:
    """EEC MTIE limit in ns for an observation interval in seconds."""
    return MTIE_G8262.limit(tau)


def tdev_mask_g8262(tau: float) -> float:
    """EEC TDEV limit in ns for an observation interval in seconds."""
    return TDEV_G8262.limit(tau)


# -- time-error series --------------------------------------------------------


@dataclass(frozen=True)
class TieSeries:
    samples: np.ndarray  # ns
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL  # s
    prefiltered: bool = False

    def __post_init__(self) -> None:
        x = np.asarray(self.samples, dtype=float).ravel()
        if x.size < 2:
            raise InputError("a time-error series needs at least 2 samples")
        if not np.all(np.isfinite(x)):
            raise InputError("time-error samples must be finite")
        if not math.isfinite(self.sample_interval) or self.sample_interval <= 0:
            raise InputError(f"sample_interval must be > 0, got {self.sample_interval!r}")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Time spanned by the record, ``(N - 1) * tau0``."""
        return (self.samples.size - 1) * self.sample_interval


def read_tie_csv(path: str | Path) -> TieSeries:
    """Read a ``t_seconds,tie_ns`` CSV with uniformly spaced timestamps."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t_seconds", "tie_ns"} <= set(reader.fieldnames):
            raise InputError(f"{path}: header must contain t_seconds,tie_ns")
        try:
            rows = [(float(r["t_seconds"]), float(r["tie_ns"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise InputError(f"{path}: non-numeric value ({exc})") from None
    if len(rows) < 2:
        raise InputError(f"{path}: at least 2 samples are required")
    t = np.array([r[0] for r in rows])
    x = np.array([r[1] for r in rows])
    steps = np.diff(t)
    tau0 = (t[-1] - t[0]) / (t.size - 1)
    if tau0 <= 0 or np.max(np.abs(steps - tau0)) > UNIFORM_TIMESTAMP_TOL:
        raise InputError(f"{path}: timestamps are not uniformly spaced")
    return TieSeries(x, tau0)


def lowpass_10hz(series: TieSeries) -> TieSeries:
    """Causal first-order 10 Hz low-pass measurement filter.

    Discretised step-invariantly, ``y[n] = a y[n-1] + (1 - a) x[n-1]`` with
    ``a = exp(-tau0 / rc)``, so the sampled step response equals the analog
    one exactly. The filter starts in steady state (``y[0] = x[0]``).
    """
    if series.prefiltered:
        raise InputError("series is already low-pass filtered")
    x = series.samples
    rc = 1.0 / (2.0 * math.pi * FILTER_CUTOFF_HZ)
    a = math.exp(-series.sample_interval / rc)
    num, den = [0.0, 1.0 - a], [1.0, -a]
    y, _ = lfilter(num, den, x, zi=lfilter_zi(num, den) * x[0])
    return replace(series, samples=y, prefiltered=True)


@dataclass(frozen=True)
class EstimatePoint:
    tau: float  # s
    value: float  # ns; nan when error is set
    error: str | None = None


def _require_filtered(series: TieSeries, bypass_filter: bool) -> None:
    if not series.prefiltered and not bypass_filter:
        raise InputError("series must be low-pass filtered first (or pass bypass_filter=True)")


def _intervals(tau: float, tau0: float) -> int:
    return int(math.floor(tau / tau0 + _RATIO_EPS))


def compute_mtie(series: TieSeries, taus, bypass_filter: bool = False) -> list[EstimatePoint]:
    _require_filtered(series, bypass_filter)
    x = series.samples
    out = []
    for tau in taus:
        tau = float(tau)
        n = _intervals(tau, series.sample_interval)
        if n < 1 or n > x.size - 1:
            out.append(EstimatePoint(tau, math.nan, "tau outside the record"))
            continue
        width = n + 1
        # centred filters; keep only windows lying fully inside the record
        half = width // 2
        hi = maximum_filter1d(x, width, mode="nearest")[half : x.size - (width - 1 - half)]
        lo = minimum_filter1d(x, width, mode="nearest")[half : x.size - (width - 1 - half)]
        out.append(EstimatePoint(tau, float(np.max(hi - lo))))
    return out


def compute_tdev(series: TieSeries, taus, bypass_filter: bool = False) -> list[EstimatePoint]:
    _require_filtered(series, bypass_filter)
    x = series.samples
    size = x.size
    out = []
    for tau in taus:
        tau = float(tau)
        n = _intervals(tau, series.sample_interval)
        if n < 1:
            out.append(EstimatePoint(tau, math.nan, "tau below the sample interval"))
            continue
        if series.duration < TDEV_RECORD_FACTOR * tau * (1 - _RATIO_EPS) or size < 3 * n + 1:
            out.append(EstimatePoint(tau, math.nan, "insufficient record"))
            continue
        second = x[2 * n :] - 2.0 * x[n : size - n] + x[: size - 2 * n]
        csum = np.concatenate(([0.0], np.cumsum(second)))
        inner = csum[n:] - csum[:-n]  # N - 3n + 1 window sums
        var = float(np.sum(inner**2)) / (6.0 * n * n * (size - 3 * n + 1))
        out.append(EstimatePoint(tau, math.sqrt(var)))
    return out


# -- compliance ---------------------------------------------------------------


class Metric(str, Enum):
    MTIE = "MTIE"
    TDEV = "TDEV"


@dataclass(frozen=True)
class MaskRow:
    tau: float
    measured: float
    limit: float
    passed: bool
    error: str | None = None


@dataclass(frozen=True)
class MaskReport:
    metric: Metric
    rows: tuple[MaskRow, ...]
    status: str  # "ok" or "insufficient record"

    @property
    def passed(self) -> bool:
        """True iff the record is sufficient and every row is within the mask."""
        return self.status == "ok" and all(r.passed for r in self.rows)


def tau_grid(mask: PiecewiseMask, per_decade: int = GRID_POINTS_PER_DECADE) -> np.ndarray:
    """Log-spaced observation intervals inside ``(tau_min, tau_max]``."""
    lo = math.log10(mask.tau_min)
    hi = math.log10(mask.tau_max)
    k_lo = math.floor(lo * per_decade) + 1
    k_hi = math.floor(hi * per_decade + 1e-9)
    return 10.0 ** (np.arange(k_lo, k_hi + 1) / per_decade)


def admissible_taus(series: TieSeries, metric: Metric) -> np.ndarray:
    metric = Metric(metric)
    mask = MTIE_G8262 if metric is Metric.MTIE else TDEV_G8262
    grid = tau_grid(mask)
    tau0 = series.sample_interval
    ok = grid * (1 + _RATIO_EPS) >= tau0
    if metric is Metric.MTIE:
        ok &= grid <= series.duration * (1 + _RATIO_EPS)
    else:
        ok &= TDEV_RECORD_FACTOR * grid <= series.duration * (1 + _RATIO_EPS)
    return grid[ok]


def check_compliance(series: TieSeries, which: Metric | str, bypass_filter: bool = False) -> MaskReport:
    """Compare MTIE or TDEV against the G.8262 mask on the admissible grid.

    An unfiltered series is passed through the 10 Hz measurement filter
    unless ``bypass_filter`` is set.
    """
    metric = Metric(which)
    if not series.prefiltered and not bypass_filter:
        series = lowpass_10hz(series)
    taus = admissible_taus(series, metric)
    if taus.size == 0:
        return MaskReport(metric, (), "insufficient record")
    if metric is Metric.MTIE:
        mask, points = MTIE_G8262, compute_mtie(series, taus, bypass_filter=True)
    else:
        mask, points = TDEV_G8262, compute_tdev(series, taus, bypass_filter=True)
    rows = []
    for p in points:
        limit = mask.limit(p.tau)
        ok = p.error is None and p.value <= limit
        rows.append(MaskRow(p.tau, p.value, limit, ok, p.error))
    return MaskReport(metric, tuple(rows), "ok")


@dataclass(frozen=True)
class BoundVerdict:
    measured: float
    limit: float
    passed: bool
    margin: float  # limit - |measured|


def _bound_verdict(value: float, limit: float) -> BoundVerdict:
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"value must be finite, got {value!r}")
    return BoundVerdict(value, limit, abs(value) <= limit, limit - abs(value))


def check_frequency_accuracy(offset_ppm: float) -> BoundVerdict:
    """EEC output frequency accuracy: pass iff ``|offset| <= 4.6 ppm``."""
    return _bound_verdict(offset_ppm, FREQUENCY_ACCURACY_PPM)


def check_cf_accuracy(cf_error_ns: float) -> BoundVerdict:
    """Transparent-clock correction-field accuracy: pass iff ``|error| <= 80 ns``."""
    return _bound_verdict(cf_error_ns, CF_ACCURACY_NS)
