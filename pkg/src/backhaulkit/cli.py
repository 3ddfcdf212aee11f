"""Command-line front end.

Every subcommand builds a :class:`Report` (fixed columns, rows, trailing
notes and an exit status) which is rendered as an aligned table, CSV or
JSON. Exit codes: 0 success/compliant, 1 computed but noncompliant,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from . import fairness, kpimetrics, linkmodel, mcsim, reliability, splitadvisor, syncmask
from ._data import data_path
from .errors import BackhaulKitError

EXIT_OK = 0
EXIT_NONCOMPLIANT = 1
EXIT_USAGE = 2

AVAILABILITY_DIGITS = 13
GINI_DECIMALS = 12


@dataclass(frozen=True)
class Num:
    """A numeric cell with its display format."""

    value: float
    spec: str = ".13g"

    def __str__(self) -> str:
        if isinstance(self.value, float) and not math.isfinite(self.value):
            return "nan" if math.isnan(self.value) else ("inf" if self.value > 0 else "-inf")
        return format(self.value, self.spec)

    def to_json(self):
        if isinstance(self.value, int) and not isinstance(self.value, bool):
            return self.value
        if not math.isfinite(self.value):
            return None
        return float(str(self))


@dataclass
class Report:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    status: int = EXIT_OK


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _json_cell(v):
    if isinstance(v, Num):
        return v.to_json()
    return v


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        writer.writerows([_cell(v) for v in row] for row in report.rows)
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "columns": list(report.columns),
            "rows": [dict(zip(report.columns, map(_json_cell, row))) for row in report.rows],
            "notes": report.notes,
            "status": report.status,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    cells = [list(report.columns)] + [[_cell(v) for v in row] for row in report.rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(report.columns))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines + report.notes) + "\n"


# -- avail / sim --------------------------------------------------------------


def _cluster(args) -> reliability.ClusterSpec:
    return reliability.ClusterSpec(
        args.hubs,
        args.terminals,
        args.min_terminals,
        reliability.NodeReliability(args.mtbf_h, args.mttr_h),
    )


def cmd_avail(args) -> Report:
    rep = reliability.cluster_availability(_cluster(args))
    return Report(
        ("availability", "unavailability", "downtime_min_per_year", "downtime", "nines"),
        [(
            Num(rep.value, f".{AVAILABILITY_DIGITS}g"),
            Num(rep.unavailability, ".6e"),
            Num(rep.downtime_per_year, ".6g"),
            reliability.format_duration(rep.downtime_per_year),
            Num(rep.nines, "d"),
        )],
    )


def cmd_sim(args) -> Report:
    spec = _cluster(args)
    cfg = mcsim.SimConfig(spec, args.horizon_h, args.seed, args.replications, args.policy)
    res = mcsim.simulate(cfg, n_jobs=args.jobs)
    analytic = reliability.cluster_availability(spec).value
    notes = []
    if args.trace:
        n = mcsim.write_trace_csv(cfg, args.trace)
        notes.append(f"trace: {n} events of replication 0 written to {args.trace}")
    return Report(
        ("estimated_availability", "stderr", "analytic_availability", "available_time_h",
         "event_count", "hub_load_gini", "rebalance_count"),
        [(
            Num(res.estimated_availability, f".{AVAILABILITY_DIGITS}g"),
            Num(res.stderr, ".6e"),
            Num(analytic, f".{AVAILABILITY_DIGITS}g"),
            Num(res.available_time, ".10g"),
            Num(res.event_count, "d"),
            Num(res.hub_load_gini, f".{GINI_DECIMALS}f"),
            Num(res.rebalance_count, "d"),
        )],
        notes,
    )


# -- sync ---------------------------------------------------------------------


def cmd_sync(args) -> Report:
    report = Report(("check", "tau_s", "measured", "limit", "unit", "pass"))
    if args.input is None and args.freq_offset_ppm is None and args.cf_error_ns is None:
        raise BackhaulKitError("sync needs --input, --freq-offset-ppm or --cf-error-ns")
    ok = True
    if args.input is not None:
        series = syncmask.read_tie_csv(args.input)
        metrics = list(syncmask.Metric) if args.metric == "both" else [syncmask.Metric(args.metric)]
        for metric in metrics:
            mask = syncmask.check_compliance(series, metric, bypass_filter=args.bypass_filter)
            ok &= mask.passed
            if mask.status != "ok":
                report.notes.append(f"{metric.value}: {mask.status}")
            for r in mask.rows:
                report.rows.append(
                    (metric.value, Num(r.tau, ".6g"), Num(r.measured, ".6g"),
                     Num(r.limit, ".6g"), "ns", r.passed)
                )
    for name, value, check, unit in (
        ("frequency_accuracy", args.freq_offset_ppm, syncmask.check_frequency_accuracy, "ppm"),
        ("cf_accuracy", args.cf_error_ns, syncmask.check_cf_accuracy, "ns"),
    ):
        if value is not None:
            v = check(value)
            ok &= v.passed
            report.rows.append((name, None, Num(v.measured, ".6g"), Num(v.limit, ".6g"), unit, v.passed))
    report.notes.append("compliant" if ok else "NOT compliant")
    report.status = EXIT_OK if ok else EXIT_NONCOMPLIANT
    return report


# -- link ---------------------------------------------------------------------


def cmd_link(args) -> Report:
    summary = linkmodel.evaluate_link(linkmodel.read_budget_csv(args.input))
    report = Report(("pair_id", "direction", "latency_us", "rate_mbps"))
    for pair_id, direction, latency, rate in summary.pairs:
        report.rows.append((pair_id, direction.value, Num(latency * 1e6, ".6g"), Num(rate / 1e6, ".6g")))
    worst = summary.worst_latency
    report.notes.append(
        f"worst one-way latency {worst.measured * 1e6:.6g} us vs {worst.target * 1e6:g} us: "
        f"{'pass' if worst.passed else 'fail'}" + (f" ({worst.note})" if worst.note else "")
    )
    for d, v in ((linkmodel.Direction.DS, summary.rate.ds), (linkmodel.Direction.US, summary.rate.us)):
        report.notes.append(
            f"aggregate {d.value} rate {v.measured / 1e6:.6g} Mbit/s vs {v.target / 1e6:g} Mbit/s: "
            f"{'pass' if v.passed else 'fail'}"
        )
    report.status = EXIT_OK if summary.passed else EXIT_NONCOMPLIANT
    return report


# -- split --------------------------------------------------------------------


def cmd_split(args) -> Report:
    if args.tech is not None:
        if args.bw_mbps is not None or args.latency_us is not None:
            raise BackhaulKitError("--tech cannot be combined with --bw-mbps/--latency-us")
        verdict = splitadvisor.advise(args.tech, args.mode, args.distance_km)
    else:
        if args.bw_mbps is None or args.latency_us is None:
            raise BackhaulKitError("split needs --tech, or both --bw-mbps and --latency-us")
        profile = splitadvisor.FronthaulProfile(args.bw_mbps * 1e6, args.latency_us * 1e-6)
        verdict = splitadvisor.feasible_splits(profile, args.mode)
    report = Report(("split", "name", "required_mbps", "max_latency_us", "offered_mbps",
                     "offered_latency_us", "feasible"))
    for r in verdict.rows:
        report.rows.append((
            r.split_id, r.name, Num(r.required_bw / 1e6, ".6g"), Num(r.required_latency * 1e6, ".6g"),
            Num(r.offered_bw / 1e6, ".6g"), Num(r.offered_latency * 1e6, ".6g"), r.passed,
        ))
    if verdict.max_split is None:
        report.notes.append("no split feasible")
        report.status = EXIT_NONCOMPLIANT
    else:
        report.notes.append(f"highest feasible split: {verdict.max_split} ({verdict.advice.split_point})")
    report.notes.append(f"pros: {verdict.advice.pros}")
    report.notes.append(f"cons: {verdict.advice.cons}")
    return report


# -- fairness -----------------------------------------------------------------


def _read_values(path: str) -> list[float]:
    """First column of a CSV; a non-numeric first row is taken as a header."""
    values = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if i == 0:
                    continue
                raise BackhaulKitError(f"{path}:{i + 1}: not a number: {row[0]!r}") from None
    return values


def cmd_fairness(args) -> Report:
    values = _read_values(args.input)
    if args.snr_db:
        values = fairness.db_to_linear(values).tolist()
    g = fairness.gini(values)
    if args.lorenz_out:
        curve = fairness.lorenz(values)
        with open(args.lorenz_out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("population_share", "value_share"))
            writer.writerows((f"{x:.12g}", f"{y:.12g}") for x, y in curve.points)
    return Report(("n", "gini"), [(Num(len(values), "d"), Num(g, f".{GINI_DECIMALS}f"))],
                  [f"G={g:.{GINI_DECIMALS}f}"])


# -- kpi ----------------------------------------------------------------------


def _measure(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KPI=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def cmd_kpi(args) -> Report:
    measured: dict[str, float] = {}
    if args.input:
        measured.update(kpimetrics.trace_kpis(kpimetrics.read_trace_csv(args.input)))
    measured.update(dict(args.measure or ()))
    result = kpimetrics.check_targets(measured, args.scenario)
    report = Report(("kpi", "measured", "comparator", "threshold", "unit", "status"))
    for r in result.rows:
        t = r.target
        report.rows.append((
            r.kpi,
            None if r.measured is None else Num(r.measured, ".10g"),
            t.comparator.value,
            None if t.threshold is None else Num(t.threshold, ".10g"),
            t.unit,
            r.status.value,
        ))
    if not result.evaluated:
        report.notes.append("no gated KPI was measured")
    report.notes.append(f"overall: {'pass' if result.passed else 'fail'}"
                        + ("" if result.complete else " (incomplete)"))
    report.status = EXIT_OK if result.passed else EXIT_NONCOMPLIANT
    return report


# -- reproduce-tables ---------------------------------------------------------

TABLE11_MTBF_H = 438000.0
TABLE11_TERMINALS = 3
TABLE11_MIN_TERMINALS = 1
TABLE11_DOWNTIME_RTOL = 0.005

_UNIT_MINUTES = {
    "days": 1440.0,
    "hours": 60.0,
    "minutes": 1.0,
    "seconds": 1.0 / 60.0,
    "milliseconds": 1.0 / 60000.0,
}


def _expected(name: str) -> list[dict[str, str]]:
    with open(data_path(f"expected_tables/{name}"), newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _truncate(value: float, decimals: int) -> float:
    """Truncate to ``decimals`` places; a relative guard absorbs binary noise."""
    scale = 10.0**decimals
    return math.floor(value * scale * (1 + 1e-12)) / scale


def _decimals(text: str) -> int:
    return max(-Decimal(text).as_tuple().exponent, 0)


def _sig(value: float, digits: int = AVAILABILITY_DIGITS) -> str:
    return f"{value:.{digits}g}"


def table9_rows() -> list[tuple]:
    rows = []
    for e in _expected("table9.csv"):
        minutes = reliability.downtime_per_year(float(e["availability"]))
        decimals = int(e["decimals"])
        shown = _truncate(minutes / _UNIT_MINUTES[e["unit"]], decimals)
        expected = float(e["downtime"])
        rows.append(("9", e["label"], "downtime", e["downtime"], f"{shown:.{decimals}f}", e["unit"],
                     shown == expected))
    return rows


def table10_rows() -> list[tuple]:
    single = reliability.Unit(reliability.Availability.from_value(0.99))
    exprs = {"H": single, "H1 and H2 in parallel": reliability.Parallel([single, single])}
    rows = []
    for e in _expected("table10.csv"):
        rep = reliability.report(reliability.eval_expr(exprs[e["component"]]))
        decimals = int(e["decimals"])
        shown = _truncate(rep.downtime_per_year / _UNIT_MINUTES[e["unit"]], decimals)
        label = e["component"]
        a = float(e["availability"])
        rows.append(("10", label, "availability", e["availability"], _sig(rep.value), "",
                     math.isclose(rep.value, a, rel_tol=1e-12)))
        rows.append(("10", label, "nines", e["nines"], str(rep.nines), "", rep.nines == int(e["nines"])))
        rows.append(("10", label, "downtime", e["downtime"], f"{shown:.{decimals}f}", e["unit"],
                     shown == float(e["downtime"])))
    return rows


def table11_report(mttr_h: float, hubs: int) -> reliability.AvailabilityReport:
    return reliability.cluster_availability(
        reliability.ClusterSpec(
            hubs, TABLE11_TERMINALS, TABLE11_MIN_TERMINALS,
            reliability.NodeReliability(TABLE11_MTBF_H, mttr_h),
        )
    )


def table11_downtime_matches(computed: float, expected_text: str) -> bool:
    """Within 0.5% relative, or equal at the displayed precision."""
    expected = float(expected_text)
    half_ulp = 0.5 * 10.0 ** -_decimals(expected_text)
    return abs(computed - expected) <= max(TABLE11_DOWNTIME_RTOL * expected, half_ulp * (1 + 1e-9))


def table11_rows() -> list[tuple]:
    rows = []
    for e in _expected("table11.csv"):
        hubs = int(e["hubs"])
        rep = table11_report(float(e["mttr_h"]), hubs)
        label = f"MTTR {e['mttr_h']} h, {hubs} hub{'s' if hubs > 1 else ''}"
        if hubs == 1:
            percent = _sig(100 * rep.value)
            rows.append(("11", label, "availability_percent", e["availability_percent"], percent, "%",
                         percent == _sig(float(e["availability_percent"]))))
            rows.append(("11", label, "nines", e["nines"], str(rep.nines), "", rep.nines == int(e["nines"])))
        downtime = rep.downtime_per_year / _UNIT_MINUTES[e["unit"]]
        rows.append(("11", label, "downtime", e["downtime"], f"{downtime:.6g}", e["unit"],
                     table11_downtime_matches(downtime, e["downtime"])))
    return rows


def cmd_reproduce_tables(args) -> Report:
    report = Report(("table", "row", "quantity", "expected", "computed", "unit", "match"))
    report.rows = table9_rows() + table10_rows() + table11_rows()
    mismatches = sum(1 for r in report.rows if not r[-1])
    report.notes.append(
        "dual-hub availability percentages and nines are not compared: the reference strings "
        "are inconsistent with their own downtime column, which is compared instead"
    )
    report.notes.append(f"{len(report.rows) - mismatches}/{len(report.rows)} values match")
    report.status = EXIT_OK if mismatches == 0 else EXIT_NONCOMPLIANT
    return report


# -- parser -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")


def _add_cluster(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mtbf-h", type=float, required=True, help="node MTBF in hours")
    p.add_argument("--mttr-h", type=float, required=True, help="node MTTR in hours")
    p.add_argument("--hubs", type=int, choices=(1, 2), default=1)
    p.add_argument("--terminals", type=int, required=True, help="terminal count N")
    p.add_argument("--min-terminals", type=int, default=1, help="terminals required M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="backhaulkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("avail", help="analytic PtMP cluster availability")
    _add_cluster(p)
    p.set_defaults(func=cmd_avail)

    p = sub.add_parser("sim", help="Monte-Carlo availability of a PtMP cluster")
    _add_cluster(p)
    p.add_argument("--horizon-h", type=float, default=1e6, help="simulated hours per replication")
    p.add_argument("--replications", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=[x.value for x in mcsim.RebalancePolicy], default="greedy")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for replications")
    p.add_argument("--trace", metavar="PATH", help="write the event trace of replication 0")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("sync", help="MTIE/TDEV mask and accuracy compliance")
    p.add_argument("--input", metavar="CSV", help="t_seconds,tie_ns time-error series")
    p.add_argument("--metric", choices=("MTIE", "TDEV", "both"), default="both")
    p.add_argument("--bypass-filter", action="store_true", help="skip the 10 Hz measurement filter")
    p.add_argument("--freq-offset-ppm", type=float)
    p.add_argument("--cf-error-ns", type=float)
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("link", help="per-pair latency/rate budgets against backhaul targets")
    p.add_argument("--input", metavar="CSV", required=True, help="pair budget CSV")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("split", help="feasible RAN functional splits")
    p.add_argument("--tech", help="technology id from the bundled catalog")
    p.add_argument("--distance-km", type=float, help="link length for per-km latency rows")
    p.add_argument("--bw-mbps", type=float, help="offered bandwidth in Mbit/s")
    p.add_argument("--latency-us", type=float, help="offered round-trip latency in microseconds")
    p.add_argument("--mode", choices=[m.value for m in splitadvisor.Mode], default="optimistic")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("fairness", help="Gini coefficient of a set of observations")
    p.add_argument("--input", metavar="CSV", required=True, help="values in the first column")
    p.add_argument("--snr-db", action="store_true", help="values are SNRs in dB")
    p.add_argument("--lorenz-out", metavar="PATH", help="write Lorenz curve points as CSV")
    p.set_defaults(func=cmd_fairness)

    p = sub.add_parser("kpi", help="KPI compliance against a scenario's targets")
    p.add_argument("--scenario", required=True, choices=kpimetrics.SCENARIOS)
    p.add_argument("--input", metavar="CSV", help="measurement trace CSV")
    p.add_argument("--measure", metavar="KPI=VALUE", type=_measure, action="append",
                   help="direct measurement in SI units (repeatable)")
    p.set_defaults(func=cmd_kpi)

    p = sub.add_parser("reproduce-tables", help="regenerate the availability reference tables")
    p.set_defaults(func=cmd_reproduce_tables)

    for action in sub.choices.values():
        _add_common(action)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        report = args.func(args)
        text = render(report, args.format)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (BackhaulKitError, OSError) as exc:
        print(f"backhaulkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return report.status


def main() -> None:
    sys.exit(run())
