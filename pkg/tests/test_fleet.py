import numpy as np
import pytest
from scipy import stats

from evsim.fleet import (AdoptionCurve, DrivingPattern, EvModel, TripEvent,
                         Vehicle, apply_trip_energy, charge_step,
                         record_departure_satisfaction, sample_adoptions,
                         sample_daily_trips, validate_catalog)
from evsim.rng import RngStreams
from evsim.timebase import Timestamp

from conftest import FAST, LEAF


def make_vehicle(model=LEAF, soc=20.0, target=None):
    v = Vehicle(id=1, household_id=1, model=model, soc_kwh=soc)
    if target is not None:
        v.desired_target_kwh = target
    return v


class TestCatalog:
    def test_share_sum_enforced(self):
        bad = [EvModel("a", 40, 11, 0.5), EvModel("b", 40, 11, 0.4)]
        with pytest.raises(ValueError):
            validate_catalog(bad)

    def test_positive_fields(self):
        with pytest.raises(ValueError):
            EvModel("x", 0, 11, 1.0)
        with pytest.raises(ValueError):
            EvModel("x", 40, -1, 1.0)


class TestChargeStep:
    def test_one_hour_at_rate(self):
        v = make_vehicle(soc=20.0)
        assert charge_step(v, 3.7, 60) == pytest.approx(3.7)
        assert v.soc_kwh == pytest.approx(23.7)

    def test_idempotent_at_target(self):
        v = make_vehicle(soc=40.0)
        assert charge_step(v, 3.7, 60) == 0.0

    def test_clamps_at_target_and_releases(self):
        v = make_vehicle(model=FAST, soc=59.0)
        delivered = charge_step(v, 11.0, 15)    # 2.75 kWh would overshoot
        assert delivered == pytest.approx(1.0)
        assert v.satisfied

    def test_rejects_grant_above_rate(self):
        v = make_vehicle()
        with pytest.raises(ValueError):
            charge_step(v, 5.0, 1)


class TestTripEnergy:
    def test_drain(self):
        v = make_vehicle(soc=30.0)
        trip = TripEvent(Timestamp(0), Timestamp(600), 8.0)
        apply_trip_energy(v, trip)
        assert v.soc_kwh == pytest.approx(22.0)
        assert v.plugged and v.location == "home"

    def test_floor_at_zero(self, caplog):
        v = make_vehicle(soc=5.0)
        with caplog.at_level("WARNING"):
            apply_trip_energy(v, TripEvent(Timestamp(0), Timestamp(600), 8.0))
        assert v.soc_kwh == 0.0
        assert "ran out of charge" in caplog.text

    def test_zero_energy_identity(self):
        v = make_vehicle(soc=30.0)
        apply_trip_energy(v, TripEvent(Timestamp(0), Timestamp(600), 0.0))
        assert v.soc_kwh == 30.0


class TestSatisfaction:
    def test_boundary_exact_target_is_satisfied(self):
        v = make_vehicle(soc=40.0)
        assert record_departure_satisfaction(v)

    def test_leaf_overnight_window_infeasible(self):
        # 3.7 kW, 23:00 arrival at 5/40 kWh, 05:00 departure: 22.2 < 35 needed
        v = make_vehicle(soc=5.0)
        delivered = charge_step(v, 3.7, 6 * 60)
        assert delivered == pytest.approx(22.2)
        assert not record_departure_satisfaction(v)

    def test_fast_twin_same_window_satisfied(self):
        v = make_vehicle(model=FAST, soc=25.0)   # needs 35 kWh
        charge_step(v, 11.0, 6 * 60)             # could deliver 66
        assert record_departure_satisfaction(v)


class TestAdoption:
    def test_flat_curve_no_adoptions(self):
        curve = AdoptionCurve([(2020, 0), (2025, 0)])
        events = sample_adoptions(curve, list(range(10)), [LEAF, FAST],
                                  RngStreams(1).stream("adoption"))
        assert events == []

    def test_full_adoption_by_curve_end(self):
        curve = AdoptionCurve([(2020, 3), (2021, 8), (2022, 12)])
        ids = list(range(12))
        events = sample_adoptions(curve, ids, [LEAF, FAST],
                                  RngStreams(5).stream("adoption"))
        assert len(events) == 12
        assert sorted(e.household_id for e in events) == ids
        end = Timestamp.from_iso("2023-01-01T00:00")
        assert all(e.at.minutes < end.minutes for e in events)

    def test_poisson_moments_first_year(self):
        curve = AdoptionCurve([(2019 + y, 10 * y) for y in range(1, 13)] + [(2032, 126)])
        counts = []
        for seed in range(400):
            rng = RngStreams(seed).stream("adoption")
            events = sample_adoptions(curve, list(range(126)), [LEAF, FAST], rng)
            counts.append(sum(1 for e in events if e.at.year == 2020))
        mean = np.mean(counts)
        assert mean == pytest.approx(10.0, abs=3 * np.sqrt(10 / 400))
        assert 0.8 < np.var(counts) / mean < 1.25

    def test_model_shares_chi_square(self):
        catalog = [EvModel("a", 40, 3.7, 0.3), EvModel("b", 40, 11, 0.45),
                   EvModel("c", 60, 11, 0.25)]
        curve = AdoptionCurve([(2020, 126)])
        names = []
        for seed in range(100):
            rng = RngStreams(1000 + seed).stream("adoption")
            names += [e.model.name for e in
                      sample_adoptions(curve, list(range(126)), catalog, rng)]
        observed = [names.count(m.name) for m in catalog]
        expected = [m.market_share * len(names) for m in catalog]
        _, p = stats.chisquare(observed, expected)
        assert p > 0.01


class TestDailyTrips:
    def test_zero_probability_no_trip(self):
        pattern = DrivingPattern(weekday_trip_prob=0.0, weekend_trip_prob=0.0)
        v = make_vehicle()
        day = Timestamp.from_iso("2036-01-07T00:00")
        assert sample_daily_trips(v, day, pattern, RngStreams(3).stream("t")) == []

    def test_departure_mean(self):
        pattern = DrivingPattern(departure_mean_min=450, departure_std_min=60)
        rng = RngStreams(11).stream("trips")
        v = make_vehicle()
        day = Timestamp.from_iso("2036-01-07T00:00")   # a Monday
        deps = []
        for _ in range(10_000):
            trips = sample_daily_trips(v, day, pattern, rng)
            deps.append(trips[0].departure.minutes % (24 * 60))
        assert np.mean(deps) == pytest.approx(450, abs=2)

    def test_arrival_after_departure(self):
        # overlapping distributions force the resample rule to kick in
        pattern = DrivingPattern(departure_mean_min=700, departure_std_min=120,
                                 arrival_mean_min=760, arrival_std_min=120)
        rng = RngStreams(12).stream("trips")
        v = make_vehicle()
        day = Timestamp.from_iso("2036-01-07T00:00")
        for _ in range(2000):
            for trip in sample_daily_trips(v, day, pattern, rng):
                assert trip.arrival.minutes > trip.departure.minutes
                assert trip.departure.day_index == trip.arrival.day_index

    def test_energy_clamped_to_battery(self):
        pattern = DrivingPattern(trip_energy_mean_kwh=100, trip_energy_std_kwh=0)
        rng = RngStreams(13).stream("trips")
        v = make_vehicle()
        day = Timestamp.from_iso("2036-01-07T00:00")
        trips = sample_daily_trips(v, day, pattern, rng)
        assert trips[0].energy_kwh == pytest.approx(0.9 * LEAF.battery_kwh)


def test_vehicle_invariants():
    with pytest.raises(ValueError):
        Vehicle(id=1, household_id=1, model=LEAF, soc_kwh=41.0)
    v = Vehicle(id=1, household_id=1, model=LEAF, soc_kwh=10.0)
    assert v.desired_target_kwh == LEAF.battery_kwh
    assert v.remaining_kwh == pytest.approx(30.0)
