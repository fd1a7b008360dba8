"""Deterministic discrete-time engine.

One run is strictly single-threaded: fixed phase order per tick
(trip events, baseload, dispatch on decision boundaries, charging
physics, load recording), agents stepped in ascending household id.
Identical (spec, inputs) reproduce identical outputs bit for bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import strategies as strat
from .fleet import (SOC_EPS, AdoptionCurve, AdoptionEvent, DrivingPattern, EvModel,
                    TripEvent, Vehicle, apply_trip_energy, sample_adoptions,
                    sample_daily_trips, validate_catalog)
from .grid import LoadSeries, OverloadEvent, Transformer, detect_overloads, hourly_max
from .kpi import KpiReport, YearLedger, assemble_report
from .rng import RngStreams
from .tariffs import (Co2IntensitySeries, CoverageError, DistributionTariff,
                      SpotPriceSeries)
from .timebase import (MINUTES_PER_DAY, SimulationSpan, Timestamp,
                       year_start_minutes)

log = logging.getLogger(__name__)


@dataclass
class HouseholdBaseload:
    """Hourly per-household consumption, kW (== kWh per hour)."""

    start: Timestamp
    household_ids: list[int]
    matrix: np.ndarray            # shape (households, hours)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.start.minutes % 60 != 0:
            raise ValueError("baseload must start on an hour boundary")
        if self.matrix.shape[0] != len(self.household_ids):
            raise ValueError("baseload rows must match household count")
        if (self.matrix < 0).any():
            raise ValueError("baseload must be non-negative")

    @property
    def end(self) -> Timestamp:
        return Timestamp(self.start.minutes + 60 * self.matrix.shape[1])

    def slice_hours(self, span: SimulationSpan) -> np.ndarray:
        if self.start.minutes > span.start.minutes or self.end.minutes < span.end.minutes:
            raise CoverageError(
                f"baseload covers [{self.start.isoformat()}, {self.end.isoformat()})"
                f" but span is [{span.start.isoformat()}, {span.end.isoformat()})")
        lo = (span.start.minutes - self.start.minutes) // 60
        return self.matrix[:, lo:lo + span.n_hours]


@dataclass
class ScenarioData:
    """Immutable inputs shared by all experiments of a run set."""

    household_ids: list[int]
    transformer: Transformer
    baseload: HouseholdBaseload
    spot: SpotPriceSeries
    co2: Co2IntensitySeries
    tariffs: dict[str, DistributionTariff]
    catalog: list[EvModel]
    adoption_curve: AdoptionCurve
    driving: DrivingPattern
    addons_dkk_per_kwh: float = 0.0
    overload_unit: str = "hours"

    def __post_init__(self):
        validate_catalog(self.catalog)
        if self.adoption_curve.final_value > len(self.household_ids):
            raise ValueError("adoption curve exceeds household count")


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    strategy: str
    span: SimulationSpan
    tariff_mode: str = "fixed"
    seed: int = 0
    decision_interval_min: int | None = None
    baseline_id: str | None = None

    def __post_init__(self):
        if self.strategy not in strat.STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {self.strategy!r}; "
                             f"valid: {', '.join(strat.STRATEGY_NAMES)}")
        interval = self.interval
        if interval <= 0 or interval % self.span.tick_minutes != 0:
            raise ValueError("decision interval must be a positive multiple of the tick")

    @property
    def interval(self) -> int:
        if self.decision_interval_min is not None:
            return self.decision_interval_min
        return strat.DEFAULT_DECISION_INTERVAL_MIN[self.strategy]


@dataclass
class VehiclePlan:
    """One vehicle, when it joins the fleet, and its scripted trip list."""

    vehicle: Vehicle
    adoption: Timestamp
    trips: list[TripEvent]


@dataclass
class ChargeSession:
    vehicle_id: int
    plug_in: Timestamp
    unplug: Timestamp
    delivered_kwh: float


@dataclass
class VehicleSummary:
    vehicle_id: int
    household_id: int
    model: str
    initial_soc_kwh: float
    final_soc_kwh: float
    delivered_kwh: float
    trip_drain_kwh: float      # actual SoC drained by trips (floor-clamped)


@dataclass
class SimulationOutput:
    spec: ExperimentSpec
    load: LoadSeries                     # per tick, aggregate
    baseload: LoadSeries                 # per tick, households only
    hourly_max: LoadSeries
    overload_events: list[OverloadEvent]
    reports: list[KpiReport]
    sessions: list[ChargeSession]
    dissatisfactions: list[tuple[Timestamp, int]]
    vehicles: list[VehicleSummary]
    delivered_by_year: dict[int, dict[int, float]]   # year -> vehicle id -> kWh


# event kinds, processed in this order within one tick
_ADOPT, _DEPART, _ARRIVE = 0, 1, 2


def _dispatcher(spec: ExperimentSpec):
    name = spec.strategy
    if name == "traditional":
        return lambda reqs, budget: strat.dispatch_traditional(reqs, budget)
    if name == "fcfs":
        state = strat.FcfsState()
        return lambda reqs, budget: strat.dispatch_fcfs(state, reqs, budget)
    if name == "round_robin":
        state = strat.RoundRobinState()
        return lambda reqs, budget: strat.dispatch_round_robin(state, reqs, budget)
    if name == "equal_charge":
        return lambda reqs, budget: strat.dispatch_equal_charge(reqs, budget)
    if name == "edf":
        return lambda reqs, budget: strat.dispatch_edf(reqs, budget)
    raise AssertionError(name)


def build_fleet(spec: ExperimentSpec, data: ScenarioData,
                streams: RngStreams) -> list[VehiclePlan]:
    """Sample adoptions and daily trips for one experiment's span."""
    adoptions = sample_adoptions(data.adoption_curve, list(data.household_ids),
                                 data.catalog, streams.stream("adoption"))
    span = spec.span
    plans = []
    for ev in sorted(adoptions, key=lambda e: e.household_id):
        if ev.at.minutes >= span.end.minutes:
            continue
        vehicle = Vehicle(id=ev.household_id, household_id=ev.household_id,
                          model=ev.model, soc_kwh=ev.model.battery_kwh)
        start = max(ev.at.minutes, span.start.minutes)
        rng = streams.stream(f"trips/{ev.household_id}")
        trips: list[TripEvent] = []
        first_day = start // MINUTES_PER_DAY + (1 if start % MINUTES_PER_DAY else 0)
        for day in range(first_day, span.end.minutes // MINUTES_PER_DAY):
            day_start = Timestamp(day * MINUTES_PER_DAY)
            for trip in sample_daily_trips(vehicle, day_start, data.driving, rng):
                if trip.departure.minutes >= start and \
                        trip.arrival.minutes < span.end.minutes:
                    trips.append(trip)
        plans.append(VehiclePlan(vehicle, Timestamp(start), trips))
    return plans


def run_experiment(spec: ExperimentSpec, data: ScenarioData) -> SimulationOutput:
    """Build the stochastic fleet from the seed and simulate the span."""
    streams = RngStreams(spec.seed)
    plans = build_fleet(spec, data, streams)
    return simulate(spec, data, plans)


def simulate(spec: ExperimentSpec, data: ScenarioData,
             plans: list[VehiclePlan],
             check_invariants: bool = False) -> SimulationOutput:
    """Deterministic core loop over the span with a prepared fleet."""
    span = spec.span
    dt = span.tick_minutes
    n_ticks = span.n_ticks
    n_hours = span.n_hours
    interval = spec.interval
    tr = data.transformer
    budget_cap = tr.capacity_kw - tr.buffer_kw

    tariff = data.tariffs.get(spec.tariff_mode)
    if tariff is None:
        raise ValueError(f"scenario has no {spec.tariff_mode!r} tariff")

    # hourly context arrays over the span
    base_matrix = data.baseload.slice_hours(span)        # (households, hours)
    spot_h = data.spot.slice_hours(span)
    co2_h = data.co2.slice_hours(span)
    tariff_h = tariff.hourly_rates(span)
    price_h = spot_h + tariff_h + data.addons_dkk_per_kwh
    base_total_min = np.repeat(base_matrix.sum(axis=0), 60 // dt)

    year_of_hour = np.empty(n_hours, dtype=int)
    for y in span.years():
        lo = max(0, (year_start_minutes(y) - span.start.minutes) // 60)
        hi = min(n_hours, (year_start_minutes(y + 1) - span.start.minutes) // 60)
        year_of_hour[lo:hi] = y

    if span.start.minutes % 60 or span.end.minutes % 60:
        raise ValueError("span must start and end on hour boundaries")

    vehicles: dict[int, Vehicle] = {p.vehicle.id: p.vehicle for p in plans}
    adoption_of = {p.vehicle.id: p.adoption for p in plans}
    initial_soc = {vid: v.soc_kwh for vid, v in vehicles.items()}
    first_departure = {p.vehicle.id: (p.trips[0].departure.minutes if p.trips
                                      else span.end.minutes) for p in plans}

    # flatten the fleet plan into a single sorted event list
    events: list[tuple[int, int, int, TripEvent | None]] = []
    next_departure: dict[tuple[int, int], int] = {}
    for p in plans:
        vid = p.vehicle.id
        events.append((p.adoption.minutes, _ADOPT, vid, None))
        for k, trip in enumerate(p.trips):
            events.append((trip.departure.minutes, _DEPART, vid, None))
            events.append((trip.arrival.minutes, _ARRIVE, vid, trip))
            nxt = p.trips[k + 1].departure.minutes if k + 1 < len(p.trips) \
                else span.end.minutes
            next_departure[(vid, trip.arrival.minutes)] = nxt
    events.sort(key=lambda e: (e[0], e[1], e[2]))

    dispatch = _dispatcher(spec)

    load = np.empty(n_ticks)
    grants: dict[int, float] = {}
    requesting: set[int] = set()
    req_cache: dict[int, strat.ChargeRequest] = {}
    session_start: dict[int, int] = {}
    session_kwh: dict[int, float] = {}
    hour_kwh: dict[int, float] = {}
    trip_drain: dict[int, float] = {vid: 0.0 for vid in vehicles}
    delivered_total_v: dict[int, float] = {vid: 0.0 for vid in vehicles}

    sessions: list[ChargeSession] = []
    dissatisfactions: list[tuple[Timestamp, int]] = []
    ledgers: dict[int, YearLedger] = {y: YearLedger(year=y) for y in span.years()}
    delivered_by_year: dict[int, dict[int, float]] = {y: {} for y in span.years()}

    def open_session(vid: int, minute: int) -> None:
        session_start[vid] = minute
        session_kwh[vid] = 0.0

    def close_session(vid: int, minute: int) -> None:
        sessions.append(ChargeSession(vid, Timestamp(session_start.pop(vid)),
                                      Timestamp(minute), session_kwh.pop(vid)))

    def refresh_request(vid: int, v: Vehicle) -> None:
        req_cache[vid] = strat.ChargeRequest(
            vehicle_id=vid, max_rate_kw=v.model.max_rate_kw,
            remaining_kwh=v.remaining_kwh, arrival=v.arrival,
            planned_departure=v.planned_departure)

    per_hour = 60 // dt
    ev_ptr = 0
    n_events = len(events)
    start_min = span.start.minutes

    for i in range(n_ticks):
        m = start_min + i * dt

        # phase 1: adoptions, departures, arrivals
        while ev_ptr < n_events and events[ev_ptr][0] < m + dt:
            _, kind, vid, payload = events[ev_ptr]
            ev_ptr += 1
            v = vehicles[vid]
            if kind == _ADOPT:
                v.location = "home"
                v.plugged = True
                v.arrival = Timestamp(m)
                v.planned_departure = Timestamp(first_departure[vid])
                open_session(vid, m)
                if not v.satisfied:
                    refresh_request(vid, v)
                    requesting.add(vid)
            elif kind == _DEPART:
                if v.plugged:
                    if not v.satisfied:
                        ledgers[Timestamp(m).year].dissatisfaction_count += 1
                        dissatisfactions.append((Timestamp(m), vid))
                    close_session(vid, m)
                v.plugged = False
                v.location = "away"
                grants.pop(vid, None)
                requesting.discard(vid)
                req_cache.pop(vid, None)
            else:   # _ARRIVE
                soc_before = v.soc_kwh
                apply_trip_energy(v, payload)
                trip_drain[vid] += soc_before - v.soc_kwh
                v.planned_departure = Timestamp(next_departure[(vid, payload.arrival.minutes)])
                open_session(vid, m)
                if not v.satisfied:
                    refresh_request(vid, v)
                    requesting.add(vid)

        # phase 2: baseload for this tick
        base_now = base_total_min[i]

        # phase 3: dispatch on decision boundaries only (hold-last otherwise)
        if m % interval == 0:
            budget = max(0.0, budget_cap - base_now)
            reqs = [req_cache[vid] for vid in sorted(requesting)]
            grants = dict(dispatch(reqs, budget))

        # phase 4: charging physics for one tick; fixed id order keeps the
        # float sum independent of the dispatcher's dict ordering
        delivered_sum = 0.0
        released = None
        for vid in sorted(grants):
            g = grants[vid]
            v = vehicles[vid]
            delivered = g * dt / 60.0
            headroom = v.desired_target_kwh - v.soc_kwh
            if delivered >= headroom:
                delivered = headroom
                if released is None:
                    released = [vid]
                else:
                    released.append(vid)
                requesting.discard(vid)
            if delivered > 0.0:
                v.soc_kwh += delivered
                delivered_sum += delivered
                hour_kwh[vid] = hour_kwh.get(vid, 0.0) + delivered
                session_kwh[vid] += delivered
        if released:
            for vid in released:
                del grants[vid]

        # phase 5: load recording (average power over the tick)
        load[i] = base_now + delivered_sum * 60.0 / dt

        if check_invariants:
            for v in vehicles.values():
                assert -SOC_EPS <= v.soc_kwh <= v.model.battery_kwh + SOC_EPS

        # hour closed: book the hour's charging at this hour's prices
        if (i + 1) % per_hour == 0 and hour_kwh:
            h = i // per_hour
            year = int(year_of_hour[h])
            led = ledgers[year]
            dby = delivered_by_year[year]
            p_tot, p_tar, p_co2 = price_h[h], tariff_h[h], co2_h[h]
            for vid, kwh in hour_kwh.items():
                led.charging_kwh[vid] = led.charging_kwh.get(vid, 0.0) + kwh
                led.charging_cost[vid] = led.charging_cost.get(vid, 0.0) + kwh * p_tot
                led.charging_tariff[vid] = led.charging_tariff.get(vid, 0.0) + kwh * p_tar
                led.charging_co2[vid] = led.charging_co2.get(vid, 0.0) + kwh * p_co2
                dby[vid] = dby.get(vid, 0.0) + kwh
                delivered_total_v[vid] += kwh
            hour_kwh.clear()

    end_min = span.end.minutes
    for vid in sorted(session_start):
        sessions.append(ChargeSession(vid, Timestamp(session_start[vid]),
                                      Timestamp(end_min), session_kwh[vid]))

    # per-year post-processing: overloads, hourly maxima, baseload billing
    load_series = LoadSeries(span.start, dt, load)
    base_series = LoadSeries(span.start, dt, base_total_min.copy())
    hmax = hourly_max(load_series)
    all_events: list[OverloadEvent] = []
    hh_ids = data.household_ids
    for y in span.years():
        y0 = max(span.start.minutes, year_start_minutes(y))
        y1 = min(span.end.minutes, year_start_minutes(y + 1))
        led = ledgers[y]
        year_slice = load_series.slice_minutes(y0, y1) if dt == 1 else None
        if year_slice is not None:
            evts = detect_overloads(year_slice, tr)
            led.overload_events = evts
            led.overload_minutes = sum(e.duration_minutes for e in evts)
            over_hours: set[int] = set()
            for e in evts:
                first = e.start.minutes // 60
                last = (e.start.minutes + e.duration_minutes - 1) // 60
                over_hours.update(range(first, last + 1))
            led.overload_hours = len(over_hours)
            all_events.extend(evts)
        h0 = (y0 - span.start.minutes) // 60
        h1 = (y1 - span.start.minutes) // 60
        led.hourly_max_load = hmax.values[h0:h1]

        prices = price_h[h0:h1]
        tarfs = tariff_h[h0:h1]
        co2s = co2_h[h0:h1]
        block = base_matrix[:, h0:h1]
        cost = block @ prices
        tar = block @ tarfs
        co2 = block @ co2s
        for row, hid in enumerate(hh_ids):
            led.baseload_cost[hid] = float(cost[row])
            led.baseload_tariff[hid] = float(tar[row])
            led.baseload_co2[hid] = float(co2[row])
        led.ev_households = sorted(
            vid for vid, at in adoption_of.items() if at.minutes < y1)

    reports = [assemble_report(ledgers[y], data.overload_unit) for y in span.years()]

    summaries = [VehicleSummary(
        vehicle_id=vid, household_id=vehicles[vid].household_id,
        model=vehicles[vid].model.name,
        initial_soc_kwh=initial_soc[vid], final_soc_kwh=vehicles[vid].soc_kwh,
        delivered_kwh=delivered_total_v[vid], trip_drain_kwh=trip_drain[vid])
        for vid in sorted(vehicles)]

    return SimulationOutput(
        spec=spec, load=load_series, baseload=base_series, hourly_max=hmax,
        overload_events=all_events, reports=reports, sessions=sessions,
        dissatisfactions=dissatisfactions, vehicles=summaries,
        delivered_by_year=delivered_by_year)
