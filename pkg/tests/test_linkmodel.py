import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from backhaulkit.errors import InputError
from backhaulkit.linkmodel import (
    Direction,
    LatencyBudget,
    RateBudget,
    aggregate_cluster_rate,
    air_time,
    check_latency_target,
    check_rate_target,
    evaluate_link,
    pair_latency,
    pair_rate,
    read_budget_csv,
)

MS = 1e-3
GBPS = 1e9
times = st.floats(0, 1, allow_nan=False)
rates = st.floats(1, 1e12, allow_nan=False)


class TestLatency:
    def test_examples(self):
        assert pair_latency(LatencyBudget(0.3 * MS, 0.4 * MS, 0.3 * MS)) == 1.0 * MS
        assert pair_latency(LatencyBudget(0, 0, 0)) == 0
        t = pair_latency(LatencyBudget(0.5 * MS, 0.2 * MS, 0.4 * MS))
        assert t == pytest.approx(1.1 * MS) and not check_latency_target(t).passed

    @pytest.mark.parametrize("ms,ok", [(0.9, True), (1.0, True), (1.1, False)])
    def test_target(self, ms, ok):
        assert check_latency_target(ms * MS).passed is ok

    def test_rel12_note(self):
        v = check_latency_target(5 * MS)
        assert not v.passed and "Rel-12" in v.note
        assert check_latency_target(40 * MS).note == ""
        assert check_latency_target(0.5 * MS).note == ""

    def test_negative(self):
        with pytest.raises(InputError):
            LatencyBudget(-1e-6, 0, 0)
        with pytest.raises(InputError):
            check_latency_target(-1.0)

    @given(times, times, times, times)
    def test_properties(self, a, b, c, extra):
        base = pair_latency(LatencyBudget(a, b, c))
        assert base >= max(a, b, c)
        assert pair_latency(LatencyBudget(a + extra, b, c)) >= base
        assert pair_latency(LatencyBudget(a, b + extra, c)) >= base
        assert pair_latency(LatencyBudget(a, b, c + extra)) >= base

    def test_air_time(self):
        assert air_time(299_792.458) == pytest.approx(1 * MS)
        with pytest.raises(InputError):
            air_time(-1)


class TestRate:
    def test_examples(self):
        assert pair_rate(RateBudget(3.0 * GBPS, 2.6 * GBPS, 2.8 * GBPS)) == 2.6 * GBPS
        assert pair_rate(RateBudget(7.0, 7.0, 7.0)) == 7.0
        r = pair_rate(RateBudget(2.4 * GBPS, 10 * GBPS, 10 * GBPS))
        assert r == 2.4 * GBPS and not check_rate_target(r, 2.0 * GBPS).ds.passed

    @pytest.mark.parametrize(
        "ds,us,ok", [(2.5, 2.0, True), (3.0, 2.5, True), (2.5, 1.0, False), (2.4, 2.0, False)]
    )
    def test_target(self, ds, us, ok):
        v = check_rate_target(ds * GBPS, us * GBPS)
        assert v.passed is ok
        if (ds, us) == (2.5, 1.0):
            assert v.ds.passed and not v.us.passed

    def test_aggregate_examples(self):
        one = RateBudget(3 * GBPS, 2 * GBPS, 1.5 * GBPS)
        assert aggregate_cluster_rate([one], one.r_proc_hub) == pair_rate(one)
        pairs = [RateBudget(2.5 * GBPS, 1 * GBPS, 1 * GBPS)] * 4
        assert aggregate_cluster_rate(pairs, 2.5 * GBPS) == 2.5 * GBPS
        assert aggregate_cluster_rate(pairs[:2], 10 * GBPS) == 2 * GBPS

    def test_invalid(self):
        with pytest.raises(InputError):
            RateBudget(0, 1, 1)
        with pytest.raises(InputError):
            aggregate_cluster_rate([], 1.0)
        with pytest.raises(InputError):
            check_rate_target(math.nan, 1.0)

    @given(rates, rates, rates, st.floats(1, 10))
    def test_properties(self, h, a, t, k):
        base = pair_rate(RateBudget(h, a, t))
        assert base <= min(h, a, t)
        assert pair_rate(RateBudget(h * k, a, t)) >= base
        assert pair_rate(RateBudget(h, a * k, t)) >= base
        assert pair_rate(RateBudget(h, a, t * k)) >= base

    @given(st.lists(st.tuples(rates, rates), min_size=1, max_size=8), rates)
    def test_aggregate_bounds(self, pairs, hub):
        budgets = [RateBudget(hub, a, t) for a, t in pairs]
        agg = aggregate_cluster_rate(budgets, hub)
        assert agg <= hub
        assert agg <= math.fsum(min(a, t) for a, t in pairs) * (1 + 1e-15)


class TestCsv:
    HEADER = "pair_id,direction,t_proc_hub_us,t_air_us,t_proc_terminal_us,r_proc_hub_mbps,r_air_mbps,r_proc_terminal_mbps\n"

    def test_evaluate(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text(
            self.HEADER
            + "T1,DS,300,400,300,3000,1500,2000\n"
            + "T2,ds,100,100,100,3000,1500,2000\n"
            + "T1,US,300,200,300,2500,1200,1200\n"
            + "T2,US,300,200,300,2500,1200,1200\n"
        )
        budgets = read_budget_csv(p)
        assert budgets[1].direction is Direction.DS
        s = evaluate_link(budgets)
        assert s.worst_latency.measured == pytest.approx(1e-3) and s.worst_latency.passed
        assert s.aggregate[Direction.DS] == pytest.approx(3e9)
        assert s.aggregate[Direction.US] == pytest.approx(2.4e9)
        assert s.passed

    def test_missing_direction_fails(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text(self.HEADER + "T1,DS,1,1,1,3000,3000,3000\n")
        s = evaluate_link(read_budget_csv(p))
        assert s.aggregate[Direction.US] == 0.0 and not s.passed

    @pytest.mark.parametrize(
        "body", ["pair_id,direction\nT1,DS\n", HEADER, HEADER + "T1,XX,1,1,1,1,1,1\n", HEADER + "T1,DS,a,1,1,1,1,1\n"]
    )
    def test_rejects(self, tmp_path, body):
        p = tmp_path / "b.csv"
        p.write_text(body)
        with pytest.raises(InputError):
            read_budget_csv(p)
