"""EV catalog, per-vehicle state, stochastic adoption and daily driving."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .timebase import MINUTES_PER_DAY, Timestamp, year_start_minutes

log = logging.getLogger(__name__)

SOC_EPS = 1e-6


@dataclass(frozen=True)
class EvModel:
    name: str
    battery_kwh: float
    max_rate_kw: float
    market_share: float

    def __post_init__(self):
        if self.battery_kwh <= 0 or self.max_rate_kw <= 0:
            raise ValueError(f"{self.name}: battery and rate must be positive")
        if not (0 <= self.market_share <= 1):
            raise ValueError(f"{self.name}: market share out of [0, 1]")


def validate_catalog(models: list[EvModel]) -> None:
    total = sum(m.market_share for m in models)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"market shares sum to {total}, expected 1")


@dataclass
class Vehicle:
    """One EV and its charging-relevant state."""

    id: int
    household_id: int
    model: EvModel
    soc_kwh: float
    location: str = "home"          # "home" | "away"
    plugged: bool = False
    arrival: Timestamp | None = None
    planned_departure: Timestamp | None = None
    desired_target_kwh: float = 0.0

    def __post_init__(self):
        if self.desired_target_kwh == 0.0:
            self.desired_target_kwh = self.model.battery_kwh
        if not (0 <= self.soc_kwh <= self.model.battery_kwh + SOC_EPS):
            raise ValueError("state of charge out of battery bounds")
        if self.desired_target_kwh > self.model.battery_kwh + SOC_EPS:
            raise ValueError("target above battery capacity")

    @property
    def remaining_kwh(self) -> float:
        return max(0.0, self.desired_target_kwh - self.soc_kwh)

    @property
    def satisfied(self) -> bool:
        return self.soc_kwh >= self.desired_target_kwh - SOC_EPS


@dataclass(frozen=True)
class TripEvent:
    departure: Timestamp
    arrival: Timestamp
    energy_kwh: float


@dataclass
class AdoptionCurve:
    """Cumulative adopters per year, interpreted with piecewise-constant
    annual intensity equal to the yearly increments."""

    breakpoints: list[tuple[int, int]]   # (year, cumulative adopters)

    def __post_init__(self):
        if not self.breakpoints:
            raise ValueError("empty adoption curve")
        self.breakpoints = sorted(self.breakpoints)
        prev = -1
        for _, cum in self.breakpoints:
            if cum < prev:
                raise ValueError("adoption curve must be non-decreasing")
            prev = cum

    @property
    def final_value(self) -> int:
        return self.breakpoints[-1][1]

    @property
    def final_year(self) -> int:
        return self.breakpoints[-1][0]

    def yearly_increments(self) -> list[tuple[int, int]]:
        """(year, new adopters that year) for every year on the curve."""
        out = []
        prev_cum = 0
        prev_year = None
        for year, cum in self.breakpoints:
            if prev_year is not None:
                # linear fill over any gap between listed years
                span = year - prev_year
                step = (cum - prev_cum) / span
                acc = prev_cum
                for k in range(span):
                    nxt = prev_cum + step * (k + 1)
                    out.append((prev_year + 1 + k, round(nxt) - round(acc)))
                    acc = nxt
            else:
                out.append((year, cum))
            prev_year, prev_cum = year, cum
        return out


@dataclass
class DrivingPattern:
    """Daily one-trip driving model; all times are minutes into the day."""

    departure_mean_min: float = 450.0    # 07:30
    departure_std_min: float = 60.0
    arrival_mean_min: float = 990.0      # 16:30
    arrival_std_min: float = 90.0
    trip_energy_mean_kwh: float = 8.0
    trip_energy_std_kwh: float = 3.0
    weekday_trip_prob: float = 1.0
    weekend_trip_prob: float = 0.5


@dataclass(frozen=True)
class AdoptionEvent:
    household_id: int
    at: Timestamp
    model: EvModel


def sample_adoptions(curve: AdoptionCurve, household_ids: list[int],
                     catalog: list[EvModel],
                     rng: np.random.Generator) -> list[AdoptionEvent]:
    """Draw adoption times as an inhomogeneous Poisson process.

    Intensity is piecewise-constant per year at the curve's annual
    increment, capped so cumulative adoptions never exceed the curve's
    final value; any shortfall is filled at the curve's end so full
    adoption is reached. Each household adopts at most once.
    """
    cap = min(curve.final_value, len(household_ids))
    order = list(household_ids)
    rng.shuffle(order)
    shares = np.array([m.market_share for m in catalog])
    shares = shares / shares.sum()

    events: list[AdoptionEvent] = []

    def adopt(minute: int) -> None:
        hid = order[len(events)]
        model = catalog[int(rng.choice(len(catalog), p=shares))]
        events.append(AdoptionEvent(hid, Timestamp(minute), model))

    for year, increment in curve.yearly_increments():
        if increment <= 0 or len(events) >= cap:
            continue
        y0 = year_start_minutes(year)
        y1 = year_start_minutes(year + 1)
        n = int(rng.poisson(increment))
        n = min(n, cap - len(events))
        minutes = np.sort(rng.integers(y0, y1, size=n))
        for m in minutes:
            adopt(int(m))

    # force full adoption by curve end (cap already limits the total)
    end_minute = year_start_minutes(curve.final_year + 1) - 1
    while len(events) < cap:
        adopt(end_minute)
    return events


def sample_daily_trips(v: Vehicle, day_start: Timestamp, pattern: DrivingPattern,
                       rng: np.random.Generator) -> list[TripEvent]:
    """Zero or one home-away-home trip for the given calendar day."""
    weekend = day_start.weekday >= 5
    prob = pattern.weekend_trip_prob if weekend else pattern.weekday_trip_prob
    if rng.random() >= prob:
        return []

    dep = int(round(rng.normal(pattern.departure_mean_min, pattern.departure_std_min)))
    dep = min(max(dep, 0), MINUTES_PER_DAY - 2)
    arr = int(round(rng.normal(pattern.arrival_mean_min, pattern.arrival_std_min)))
    tries = 0
    while arr <= dep and tries < 50:
        arr = int(round(rng.normal(pattern.arrival_mean_min, pattern.arrival_std_min)))
        tries += 1
    if arr <= dep:
        arr = dep + 1
    arr = min(arr, MINUTES_PER_DAY - 1)

    energy = float(rng.normal(pattern.trip_energy_mean_kwh, pattern.trip_energy_std_kwh))
    energy = max(0.0, energy)
    if energy > v.model.battery_kwh:
        log.warning("trip energy %.1f kWh above %s battery, clamped",
                    energy, v.model.name)
        energy = 0.9 * v.model.battery_kwh

    base = day_start.minutes
    return [TripEvent(Timestamp(base + dep), Timestamp(base + arr), energy)]


def apply_trip_energy(v: Vehicle, trip: TripEvent) -> None:
    """Book a completed trip: drain SoC (floored at 0) and plug in at home."""
    new_soc = v.soc_kwh - trip.energy_kwh
    if new_soc < 0:
        log.warning("vehicle %d ran out of charge on trip (soc %.2f, trip %.2f)",
                    v.id, v.soc_kwh, trip.energy_kwh)
        new_soc = 0.0
    v.soc_kwh = new_soc
    v.location = "home"
    v.plugged = True
    v.arrival = trip.arrival


def charge_step(v: Vehicle, granted_kw: float, dt_minutes: float) -> float:
    """Advance charging physics one tick; returns energy actually delivered.

    Delivery is clamped at the desired target, so the grant auto-releases
    once the target is reached.
    """
    if granted_kw < 0 or granted_kw > v.model.max_rate_kw + 1e-9:
        raise ValueError("grant outside [0, max rate]")
    delivered = min(granted_kw * dt_minutes / 60.0, v.remaining_kwh)
    v.soc_kwh += delivered
    return delivered


def record_departure_satisfaction(v: Vehicle) -> bool:
    """True when the vehicle leaves with its desired charge reached."""
    return v.soc_kwh >= v.desired_target_kwh - SOC_EPS
