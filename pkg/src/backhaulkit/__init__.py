"""Engineering calculators for wireless backhaul and fronthaul planning."""

from .errors import (
    BackhaulKitError,
    CatalogLookupError,
    ConfigurationError,
    DomainError,
    InputError,
)
from .fairness import gini, gini_from_lorenz, lorenz
from .kpimetrics import check_targets
from .linkmodel import check_latency_target, check_rate_target, pair_latency, pair_rate
from .mcsim import SimConfig, SimResult, simulate
from .reliability import (
    Availability,
    ClusterSpec,
    NodeReliability,
    cluster_availability,
    downtime_per_year,
    k_of_n_availability,
    nines,
)
from .splitadvisor import FronthaulProfile, advise, feasible_splits
from .syncmask import TieSeries, check_compliance, compute_mtie, compute_tdev

__version__ = "0.1.0"

__all__ = [
    "Availability",
    "BackhaulKitError",
    "CatalogLookupError",
    "ClusterSpec",
    "ConfigurationError",
    "DomainError",
    "FronthaulProfile",
    "InputError",
    "NodeReliability",
    "SimConfig",
    "SimResult",
    "TieSeries",
    "advise",
    "check_compliance",
    "check_latency_target",
    "check_rate_target",
    "check_targets",
    "cluster_availability",
    "compute_mtie",
    "compute_tdev",
    "downtime_per_year",
    "feasible_splits",
    "gini",
    "gini_from_lorenz",
    "k_of_n_availability",
    "lorenz",
    "nines",
    "pair_latency",
    "pair_rate",
    "simulate",
]
