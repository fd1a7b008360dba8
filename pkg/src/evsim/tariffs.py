"""Hourly spot prices, distribution tariffs (fixed or time-of-use) and CO2 intensity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .timebase import SimulationSpan, Timestamp


class CoverageError(ValueError):
    """A price/intensity series does not cover the requested time."""


@dataclass
class HourlySeries:
    """One value per clock hour from `start`; base for spot and CO2 series."""

    start: Timestamp
    values: np.ndarray

    def __post_init__(self):
        if self.start.minutes % 60 != 0:
            raise ValueError("hourly series must start on an hour boundary")
        self.values = np.asarray(self.values, dtype=float)
        if not np.isfinite(self.values).all():
            raise ValueError("series contains non-finite values")

    @property
    def end(self) -> Timestamp:
        return Timestamp(self.start.minutes + 60 * len(self.values))

    def covers(self, span: SimulationSpan) -> bool:
        return self.start.minutes <= span.start.minutes and \
            self.end.minutes >= span.end.minutes

    def at(self, t: Timestamp) -> float:
        idx = (t.minutes - self.start.minutes) // 60
        if idx < 0 or idx >= len(self.values):
            raise CoverageError(
                f"series covers [{self.start.isoformat()}, {self.end.isoformat()}),"
                f" requested {t.isoformat()}")
        return float(self.values[idx])

    def slice_hours(self, span: SimulationSpan) -> np.ndarray:
        """Hourly values over the span (must be covered)."""
        if not self.covers(span):
            raise CoverageError(
                f"series [{self.start.isoformat()}, {self.end.isoformat()})"
                f" does not cover span [{span.start.isoformat()},"
                f" {span.end.isoformat()})")
        lo = (span.start.minutes - self.start.minutes) // 60
        return self.values[lo:lo + span.n_hours]


class SpotPriceSeries(HourlySeries):
    """Hourly electricity spot price, DKK/kWh; negative prices allowed."""


class Co2IntensitySeries(HourlySeries):
    """Hourly grid emission intensity, kg CO2 per kWh."""

    def __post_init__(self):
        super().__post_init__()
        if (self.values < 0).any():
            raise ValueError("CO2 intensity must be non-negative")


@dataclass(frozen=True)
class TouBand:
    season: str          # "all", "summer" or "winter"
    start_hour: int      # inclusive
    end_hour: int        # exclusive, 1..24
    dkk_per_kwh: float


# Danish-style season split, override via scenario config
DEFAULT_SUMMER_MONTHS = (4, 5, 6, 7, 8, 9)


@dataclass
class DistributionTariff:
    """Distribution grid tariff: a flat rate or hour-of-day (and season) bands."""

    mode: str                               # "fixed" | "time_of_use"
    fixed_dkk_per_kwh: float = 0.0
    bands: list[TouBand] = field(default_factory=list)
    summer_months: tuple[int, ...] = DEFAULT_SUMMER_MONTHS

    def __post_init__(self):
        if self.mode not in ("fixed", "time_of_use"):
            raise ValueError(f"unknown tariff mode {self.mode!r}")
        if self.mode == "fixed":
            if self.fixed_dkk_per_kwh < 0:
                raise ValueError("fixed tariff must be non-negative")
            return
        if not self.bands:
            raise ValueError("time-of-use tariff needs at least one band")
        seasons = {b.season for b in self.bands}
        if seasons == {"all"}:
            check = ["all"]
        elif seasons == {"summer", "winter"}:
            check = ["summer", "winter"]
        else:
            raise ValueError("bands must use season 'all' or both 'summer' and 'winter'")
        for season in check:
            covered = [0] * 24
            for b in self.bands:
                if b.season != season:
                    continue
                if not (0 <= b.start_hour < b.end_hour <= 24):
                    raise ValueError(f"bad band hours {b.start_hour}..{b.end_hour}")
                if b.dkk_per_kwh < 0:
                    raise ValueError("tariff rates must be non-negative")
                for h in range(b.start_hour, b.end_hour):
                    covered[h] += 1
            # every hour exactly once per season
            if any(c != 1 for c in covered):
                raise ValueError(
                    f"season {season!r} bands do not partition the 24 hours")

    def rate_at(self, t: Timestamp) -> float:
        if self.mode == "fixed":
            return self.fixed_dkk_per_kwh
        season_now = "summer" if t.month in self.summer_months else "winter"
        hour = t.hour
        for b in self.bands:
            if b.season in ("all", season_now) and b.start_hour <= hour < b.end_hour:
                return b.dkk_per_kwh
        raise AssertionError("validated bands must cover every hour")

    def hourly_rates(self, span: SimulationSpan) -> np.ndarray:
        """Vectorised per-hour rates over a span (used by the engine)."""
        if self.mode == "fixed":
            return np.full(span.n_hours, self.fixed_dkk_per_kwh)
        out = np.empty(span.n_hours)
        for i in range(span.n_hours):
            out[i] = self.rate_at(Timestamp(span.start.minutes + i * 60))
        return out


@dataclass(frozen=True)
class PriceQuote:
    """Per-kWh price decomposition at one point in time."""

    spot: float
    tariff: float
    addons: float

    @property
    def total(self) -> float:
        return self.spot + self.tariff + self.addons


def quote_at(t: Timestamp, spot: SpotPriceSeries, tariff: DistributionTariff,
             addons_dkk_per_kwh: float = 0.0) -> PriceQuote:
    """Price components for the hour containing t (constant within the hour)."""
    return PriceQuote(spot.at(t), tariff.rate_at(t), addons_dkk_per_kwh)


def cost_of_energy(kwh: float, q: PriceQuote) -> float:
    if kwh < 0 or not math.isfinite(kwh):
        raise ValueError("energy must be a non-negative finite amount")
    return kwh * q.total


def co2_of_energy(kwh: float, intensity_kg_per_kwh: float) -> float:
    if kwh < 0:
        raise ValueError("energy must be non-negative")
    return kwh * intensity_kg_per_kwh
