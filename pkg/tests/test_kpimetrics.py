import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from backhaulkit.errors import CatalogLookupError, InputError
from backhaulkit.kpimetrics import (
    SCENARIOS,
    Comparator,
    Status,
    TraceRecord,
    avg_cell_throughput,
    cell_edge_throughput,
    check_targets,
    connection_density,
    deployment_efficiency,
    energy_efficiency,
    energy_per_mbit,
    load_targets,
    network_utilisation,
    packet_loss_ratio,
    per_user_throughput,
    profit,
    rcr,
    read_trace_csv,
    reliability_rate,
    spectrum_efficiency,
    trace_kpis,
)

HEADER = "user_id,cell_id,bits_delivered,sent_packets,delivered_packets,delivered_in_deadline,active_time_s,energy_j\n"


class TestFormulas:
    def test_throughput(self):
        assert per_user_throughput(1e6, 1) == 1e6
        assert per_user_throughput(0, 10) == 0
        assert per_user_throughput(3e9, 60) == 50e6
        assert avg_cell_throughput(1e9, 1, 1) == 1e9
        assert avg_cell_throughput(1e9, 10, 10) == 10e6
        assert avg_cell_throughput(0, 5, 1) == 0

    def test_cell_edge(self):
        assert cell_edge_throughput([7.0]) == 7.0
        assert cell_edge_throughput([3.0] * 9) == 3.0
        assert cell_edge_throughput([x * 1e6 for x in range(1, 101)]) == pytest.approx(5.95e6)

    def test_packets(self):
        assert reliability_rate(95, 100) == 0.95
        assert reliability_rate(0, 10) == 0
        assert reliability_rate(7, 8) == 0.875
        assert packet_loss_ratio(100, 100) == 0
        assert packet_loss_ratio(95, 100) == pytest.approx(0.05)
        assert packet_loss_ratio(0, 4) == 1

    def test_energy_spectrum_density(self):
        assert energy_efficiency(1e6, 1) == 1e6
        assert energy_efficiency(0, 5) == 0
        assert energy_per_mbit(2e6, 100) == 50
        assert spectrum_efficiency(20e6, 10e6) == 2
        assert spectrum_efficiency(0, 5e6) == 0
        assert spectrum_efficiency(5e6, 5e6) == 1
        assert connection_density(200000, 1) == 200000
        assert connection_density(0, 1) == 0
        assert connection_density(500, 0.25) == 2000

    def test_economics(self):
        assert deployment_efficiency(1e9, 1e6) == 1000
        assert deployment_efficiency(0, 5) == 0
        assert deployment_efficiency(2e9, 2e6) == deployment_efficiency(1e9, 1e6)
        assert (profit(100, 100), rcr(100, 100)) == (0, 1)
        assert (profit(150, 100), rcr(150, 100)) == (50, 1.5)
        assert (profit(0, 100), rcr(0, 100)) == (-100, 0)
        assert network_utilisation(0, 4) == 0
        assert network_utilisation(4, 4) == 1
        assert network_utilisation(3, 4) == 0.75

    @pytest.mark.parametrize(
        "call",
        [
            lambda: per_user_throughput(1, 0),
            lambda: avg_cell_throughput(1, 0, 1),
            lambda: avg_cell_throughput(1, 1, 0),
            lambda: cell_edge_throughput([]),
            lambda: reliability_rate(1, 0),
            lambda: reliability_rate(3, 2),
            lambda: packet_loss_ratio(0, 0),
            lambda: energy_efficiency(1, 0),
            lambda: spectrum_efficiency(1, 0),
            lambda: connection_density(1, 0),
            lambda: deployment_efficiency(1, -1),
            lambda: rcr(1, 0),
            lambda: network_utilisation(5, 4),
            lambda: network_utilisation(1, 0),
        ],
    )
    def test_errors(self, call):
        with pytest.raises(InputError):
            call()

    @given(st.lists(st.floats(0, 1e10), min_size=1, max_size=80), st.randoms(use_true_random=False))
    def test_cell_edge_properties(self, xs, rnd):
        v = cell_edge_throughput(xs)
        assert min(xs) <= v <= max(xs)
        ys = list(xs)
        rnd.shuffle(ys)
        assert cell_edge_throughput(ys) == v

    @given(st.integers(1, 10**6), st.data(), st.integers(1, 1000))
    def test_ratio_scaling(self, sent, data, k):
        delivered = data.draw(st.integers(0, sent))
        in_deadline = data.draw(st.integers(0, delivered))
        assert reliability_rate(in_deadline * k, sent * k) == pytest.approx(reliability_rate(in_deadline, sent))
        assert packet_loss_ratio(delivered * k, sent * k) == pytest.approx(packet_loss_ratio(delivered, sent))
        assert reliability_rate(in_deadline, sent) + packet_loss_ratio(delivered, sent) <= 1 + 1e-12
        if in_deadline == delivered:
            assert reliability_rate(in_deadline, sent) + packet_loss_ratio(delivered, sent) == pytest.approx(1)


class TestRegistry:
    def test_scenarios(self):
        for s in SCENARIOS:
            assert load_targets(s).rows
        with pytest.raises(CatalogLookupError):
            load_targets("satellite")

    def test_consistency(self):
        seen = {}
        for s in SCENARIOS:
            for t in load_targets(s).rows:
                if t.comparator is Comparator.INFO:
                    continue
                assert seen.setdefault(t.kpi, (t.comparator, t.unit)) == (t.comparator, t.unit)

    def test_non_numeric_rows_informational(self):
        rows = {t.requirement: t for t in load_targets("massive_iot").rows}
        assert rows["Batteries to last tens of years"].comparator is Comparator.INFO
        assert rows["Zero and limited"].comparator is Comparator.INFO

    def test_examples(self):
        rep = check_targets({"reliability_rate": 0.96}, "broadband")
        row = next(r for r in rep.rows if r.kpi == "reliability_rate")
        assert row.status is Status.PASS
        rep = check_targets({"packet_loss_ratio": 0.06}, "broadband")
        assert not rep.passed
        assert check_targets({"connection_density": 200000}, "massive_iot").passed

    def test_missing_is_not_evaluated(self):
        rep = check_targets({}, "broadband")
        assert not rep.passed and not rep.complete
        assert all(r.status in (Status.NOT_EVALUATED, Status.INFORMATIONAL) for r in rep.rows)

    def test_informational_never_gates(self):
        rep = check_targets({"user_experienced_data_rate_dl": 1.0, "reliability_rate": 1.0}, "broadband")
        assert rep.passed

    def test_strict_comparator(self):
        assert not check_targets({"e2e_latency": 1.0}, "massive_iot").passed
        assert check_targets({"e2e_latency": 0.999}, "massive_iot").passed

    def test_non_finite(self):
        with pytest.raises(InputError):
            check_targets({"reliability_rate": math.nan}, "broadband")

    @given(st.sampled_from(SCENARIOS), st.data())
    def test_monotone(self, scenario, data):
        gated = [t for t in load_targets(scenario).rows if t.comparator is not Comparator.INFO]
        measured = {t.kpi: data.draw(st.floats(0, 2 * t.threshold + 1)) for t in gated}
        before = check_targets(measured, scenario)
        improved = dict(measured)
        for t in gated:
            step = data.draw(st.floats(0, 10))
            improved[t.kpi] += step if t.comparator is Comparator.GE else -step
        after = check_targets(improved, scenario)
        for b, a in zip(before.rows, after.rows):
            if b.status is Status.PASS:
                assert a.status is Status.PASS
        if before.passed:
            assert after.passed


class TestTrace:
    def test_read_and_compute(self, tmp_path):
        p = tmp_path / "trace.csv"
        p.write_text(
            HEADER
            + "u1,c1,1000000,100,96,95,10,1\n"
            + "u2,c1,3000000,100,94,90,10,1\n"
            + "u3,c2,2000000,100,100,100,10,\n"
        )
        recs = read_trace_csv(p)
        assert recs[2].energy is None
        k = trace_kpis(recs)
        assert k["reliability_rate"] == pytest.approx(285 / 300)
        assert k["packet_loss_ratio"] == pytest.approx(10 / 300)
        assert k["average_cell_throughput"] == pytest.approx(6e6 / (2 * 10))
        assert "energy_per_mbit" not in k
        assert k["cell_edge_throughput"] == pytest.approx(1e5 + 0.1 * 1e5)

    def test_record_invariants(self):
        with pytest.raises(InputError):
            TraceRecord("u", "c", 1, 10, 5, 6, 1.0)
        with pytest.raises(InputError):
            TraceRecord("u", "c", -1, 10, 5, 5, 1.0)

    @pytest.mark.parametrize("body", ["user_id\nu1\n", HEADER, HEADER + "u,c,x,1,1,1,1,\n"])
    def test_rejects(self, tmp_path, body):
        p = tmp_path / "t.csv"
        p.write_text(body)
        with pytest.raises(InputError):
            read_trace_csv(p)
