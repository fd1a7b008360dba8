import numpy as np
import pytest

from evsim.kpi import (KpiReport, UndefinedKpiError, YearLedger, assemble_report,
                       avg_charging_cost, compare_reports, dso_revenue,
                       load_factor, pct_difference, round_half_away)


def report(**overrides):
    base = dict(year=2039, overload_count=0, avg_charging_cost_dkk_per_kwh=1.0,
                avg_total_bill_dkk=10_000.0, avg_total_co2_kg=500.0,
                dissatisfaction_count=0, load_factor=0.25,
                dso_revenue_dkk=150_000.0)
    base.update(overrides)
    return KpiReport(**base)


class TestLoadFactor:
    def test_constant_is_one(self):
        assert load_factor(np.full(100, 321.0)) == pytest.approx(1.0)

    def test_two_point_example(self):
        assert load_factor(np.array([100.0, 300.0])) == pytest.approx(0.6667, abs=1e-4)

    def test_scale_invariance(self):
        values = np.random.default_rng(1).uniform(10, 400, 200)
        assert load_factor(values) == pytest.approx(load_factor(values / 2))

    def test_all_zero_undefined(self):
        with pytest.raises(UndefinedKpiError):
            load_factor(np.zeros(10))


class TestAvgChargingCost:
    def test_flat_rate(self):
        assert avg_charging_cost([5.0, 5.0], [5 * 1.3495, 5 * 1.3495]) == \
            pytest.approx(1.3495)

    def test_weighted_mean(self):
        assert avg_charging_cost([1.0, 1.0], [1.0, 2.0]) == pytest.approx(1.5)

    def test_shifting_to_cheap_hours_lowers_cost(self):
        expensive = avg_charging_cost([2.0, 0.0], [2 * 2.0, 0.0])
        shifted = avg_charging_cost([1.0, 1.0], [1 * 2.0, 1 * 1.0])
        assert shifted < expensive

    def test_zero_energy_undefined(self):
        with pytest.raises(UndefinedKpiError):
            avg_charging_cost([0.0], [0.0])


class TestDsoRevenue:
    def test_fixed_tariff(self):
        consumption = np.full((10, 100), 1.0)   # 1000 kWh total
        assert dso_revenue(consumption, np.full(100, 0.5)) == pytest.approx(500.0)

    def test_zero_consumption(self):
        assert dso_revenue(np.zeros((5, 10)), np.full(10, 0.5)) == 0.0

    def test_peak_to_offpeak_shift_lowers_revenue(self):
        rates = np.array([1.0, 0.2])
        peaky = dso_revenue(np.array([[3.0, 1.0]]), rates)
        shifted = dso_revenue(np.array([[1.0, 3.0]]), rates)
        assert shifted < peaky


class TestPctDifference:
    def test_reference_values(self):
        assert pct_difference(0.252, 0.2048) == 23.05
        assert pct_difference(0.2977, 0.2025) == 47.01
        assert pct_difference(1.3482, 1.3495) == -0.10
        assert pct_difference(147_006.17, 168_397.66) == -12.70

    def test_zero_baseline_not_applicable(self):
        assert pct_difference(5.0, 0.0) is None

    def test_half_away_from_zero(self):
        assert round_half_away(0.005, 2) == 0.01
        assert round_half_away(-0.005, 2) == -0.01


class TestCompareReports:
    def test_identical_reports_all_zero(self):
        rows = compare_reports(report(), report())
        assert all(r.pct_difference == 0.0 for r in rows)

    def test_load_factor_row(self):
        rows = compare_reports(report(load_factor=0.252),
                               report(load_factor=0.2048))
        by_name = {r.metric: r for r in rows}
        assert by_name["load_factor"].pct_difference == 23.05

    def test_year_mismatch(self):
        with pytest.raises(ValueError):
            compare_reports(report(year=2038), report(year=2039))

    def test_none_metric_marked_na(self):
        rows = compare_reports(report(avg_charging_cost_dkk_per_kwh=None),
                               report())
        by_name = {r.metric: r for r in rows}
        assert by_name["avg_charging_cost_dkk_per_kwh"].pct_difference is None


class TestAssembleReport:
    def ledger(self, **overrides):
        led = YearLedger(year=2039, hourly_max_load=np.array([100.0, 300.0]))
        led.baseload_cost = {1: 100.0, 2: 200.0}
        led.baseload_tariff = {1: 30.0, 2: 60.0}
        led.baseload_co2 = {1: 10.0, 2: 20.0}
        led.charging_kwh = {1: 10.0}
        led.charging_cost = {1: 13.0}
        led.charging_tariff = {1: 3.0}
        led.charging_co2 = {1: 1.5}
        led.ev_households = [1]
        for k, v in overrides.items():
            setattr(led, k, v)
        return led

    def test_fields(self):
        rep = assemble_report(self.ledger())
        assert rep.avg_charging_cost_dkk_per_kwh == pytest.approx(1.3)
        assert rep.avg_total_bill_dkk == pytest.approx(113.0)
        assert rep.avg_total_co2_kg == pytest.approx(11.5)
        assert rep.dso_revenue_dkk == pytest.approx(93.0)
        assert rep.load_factor == pytest.approx(200.0 / 300.0)

    def test_revenue_not_above_total_bills(self):
        led = self.ledger()
        rep = assemble_report(led)
        total_bills = sum(led.baseload_cost.values()) + sum(led.charging_cost.values())
        assert rep.dso_revenue_dkk <= total_bills

    def test_year_without_evs(self):
        led = self.ledger(charging_kwh={}, charging_cost={}, charging_tariff={},
                          charging_co2={}, ev_households=[])
        rep = assemble_report(led)
        assert rep.avg_charging_cost_dkk_per_kwh is None
        assert rep.avg_total_bill_dkk is None
        assert rep.dissatisfaction_count == 0

    def test_overload_units(self):
        from evsim.grid import OverloadEvent
        from evsim.timebase import Timestamp
        events = [OverloadEvent(Timestamp(17 * 60), 18, 74.16),
                  OverloadEvent(Timestamp(18 * 60), 60, 55.27)]
        led = self.ledger(overload_events=events, overload_minutes=78,
                          overload_hours=2)
        assert assemble_report(led, "hours").overload_count == 2
        assert assemble_report(led, "events").overload_count == 2
        assert assemble_report(led, "minutes").overload_count == 78
        with pytest.raises(ValueError):
            assemble_report(led, "days")
