"""Simulation clock: minute-resolution timestamps and run spans."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import lru_cache

EPOCH = datetime(2000, 1, 1)

MINUTES_PER_DAY = 24 * 60


@dataclass(frozen=True, order=True)
class Timestamp:
    """A point in simulated time, stored as whole minutes since 2000-01-01."""

    minutes: int

    def __post_init__(self):
        if self.minutes < 0:
            raise ValueError(f"timestamp before epoch: {self.minutes}")

    @classmethod
    def from_datetime(cls, dt: datetime) -> "Timestamp":
        delta = dt - EPOCH
        total = delta.days * MINUTES_PER_DAY + delta.seconds // 60
        return cls(total)

    @classmethod
    def from_iso(cls, text: str) -> "Timestamp":
        return cls.from_datetime(datetime.fromisoformat(text))

    def to_datetime(self) -> datetime:
        return EPOCH + timedelta(minutes=self.minutes)

    def isoformat(self) -> str:
        return self.to_datetime().isoformat(timespec="minutes")

    @property
    def year(self) -> int:
        return self.to_datetime().year

    @property
    def month(self) -> int:
        return self.to_datetime().month

    @property
    def day(self) -> int:
        return self.to_datetime().day

    @property
    def hour(self) -> int:
        return (self.minutes // 60) % 24

    @property
    def minute_of_hour(self) -> int:
        return self.minutes % 60

    @property
    def weekday(self) -> int:
        """Monday == 0, per datetime convention."""
        return self.to_datetime().weekday()

    @property
    def day_index(self) -> int:
        """Whole days since epoch."""
        return self.minutes // MINUTES_PER_DAY

    def __add__(self, minutes: int) -> "Timestamp":
        return Timestamp(self.minutes + minutes)

    def __sub__(self, other: "Timestamp") -> int:
        return self.minutes - other.minutes


@lru_cache(maxsize=None)
def year_start_minutes(year: int) -> int:
    return Timestamp.from_datetime(datetime(year, 1, 1)).minutes


def year_of_minutes(minutes: int) -> int:
    """Calendar year containing an epoch-minute value."""
    return (EPOCH + timedelta(minutes=minutes)).year


@dataclass(frozen=True)
class SimulationSpan:
    """Half-open simulation window [start, end) with its tick resolution."""

    start: Timestamp
    end: Timestamp
    tick_minutes: int = 1

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("span start must precede end")
        if self.tick_minutes <= 0:
            raise ValueError("tick must be positive")
        if 60 % self.tick_minutes != 0:
            raise ValueError("tick must divide 60 so hours aggregate exactly")
        if (self.end.minutes - self.start.minutes) % self.tick_minutes != 0:
            raise ValueError("span length must be a whole number of ticks")

    @property
    def n_ticks(self) -> int:
        return (self.end.minutes - self.start.minutes) // self.tick_minutes

    @property
    def n_hours(self) -> int:
        return (self.end.minutes - self.start.minutes) // 60

    @property
    def n_days(self) -> int:
        return (self.end.minutes - self.start.minutes) // MINUTES_PER_DAY

    def years(self) -> list[int]:
        """Calendar years touched by the span, in order."""
        last_minute = self.end.minutes - 1
        return list(range(year_of_minutes(self.start.minutes),
                          year_of_minutes(last_minute) + 1))

    def contains(self, t: Timestamp) -> bool:
        return self.start.minutes <= t.minutes < self.end.minutes
