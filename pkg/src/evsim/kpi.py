"""Per-year key performance indicators and baseline comparison tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .grid import LoadSeries, OverloadEvent


class UndefinedKpiError(ValueError):
    """Raised when a KPI has no defined value (e.g. no energy charged)."""


@dataclass
class KpiReport:
    year: int
    overload_count: int
    avg_charging_cost_dkk_per_kwh: float | None
    avg_total_bill_dkk: float | None
    avg_total_co2_kg: float | None
    dissatisfaction_count: int
    load_factor: float
    dso_revenue_dkk: float


@dataclass(frozen=True)
class ComparisonRow:
    metric: str
    value: float | None
    baseline: float | None
    pct_difference: float | None    # None when not applicable


def round_half_away(x: float, decimals: int = 2) -> float:
    """Round half away from zero, the convention used in reported figures."""
    q = Decimal(10) ** -decimals
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def pct_difference(value: float, baseline: float) -> float | None:
    """(value - baseline) / baseline in percent, 2 decimals; None for zero base."""
    if baseline == 0:
        return None
    return round_half_away((value - baseline) / baseline * 100.0, 2)


def load_factor(series) -> float:
    """Mean load divided by peak load; scale invariant."""
    values = series.values if isinstance(series, LoadSeries) else np.asarray(series, float)
    if len(values) == 0:
        raise UndefinedKpiError("load factor of empty series")
    peak = float(values.max())
    if peak <= 0:
        raise UndefinedKpiError("load factor undefined for all-zero load")
    return float(values.mean()) / peak


def avg_charging_cost(delivered_kwh, cost_dkk) -> float:
    """Energy-weighted average price actually paid for charging, DKK/kWh."""
    total_kwh = float(np.sum(delivered_kwh))
    if total_kwh <= 0:
        raise UndefinedKpiError("no energy charged")
    return float(np.sum(cost_dkk)) / total_kwh


def dso_revenue(consumption_kwh: np.ndarray, tariff_rates: np.ndarray) -> float:
    """Distribution-tariff income over all households and hours.

    consumption_kwh: (households, hours) including EV charging;
    tariff_rates: per-hour DKK/kWh. Spot price and addons are excluded.
    """
    consumption_kwh = np.asarray(consumption_kwh, float)
    return float((consumption_kwh * np.asarray(tariff_rates, float)).sum())


_METRICS = [
    ("overload_count", "overload_count"),
    ("avg_charging_cost_dkk_per_kwh", "avg_charging_cost_dkk_per_kwh"),
    ("avg_total_bill_dkk", "avg_total_bill_dkk"),
    ("avg_total_co2_kg", "avg_total_co2_kg"),
    ("dissatisfaction_count", "dissatisfaction_count"),
    ("load_factor", "load_factor"),
    ("dso_revenue_dkk", "dso_revenue_dkk"),
]


def compare_reports(a: KpiReport, b: KpiReport) -> list[ComparisonRow]:
    """Per-metric percentage difference of report `a` against baseline `b`."""
    if a.year != b.year:
        raise ValueError(f"comparing different years: {a.year} vs {b.year}")
    rows = []
    for name, attr in _METRICS:
        va, vb = getattr(a, attr), getattr(b, attr)
        if va is not None and vb == 0 and va == 0:
            rows.append(ComparisonRow(name, 0.0, 0.0, 0.0))
        elif va is None or vb is None or vb == 0:
            rows.append(ComparisonRow(name, va, vb, None))
        else:
            rows.append(ComparisonRow(name, float(va), float(vb),
                                      pct_difference(float(va), float(vb))))
    return rows


@dataclass
class YearLedger:
    """Everything the engine records about one calendar year of one run."""

    year: int
    hourly_max_load: np.ndarray = field(default_factory=lambda: np.empty(0))
    overload_events: list[OverloadEvent] = field(default_factory=list)
    overload_minutes: int = 0
    overload_hours: int = 0
    # per-household totals for the year, keyed by household id
    baseload_cost: dict[int, float] = field(default_factory=dict)
    baseload_tariff: dict[int, float] = field(default_factory=dict)
    baseload_co2: dict[int, float] = field(default_factory=dict)
    charging_kwh: dict[int, float] = field(default_factory=dict)
    charging_cost: dict[int, float] = field(default_factory=dict)
    charging_tariff: dict[int, float] = field(default_factory=dict)
    charging_co2: dict[int, float] = field(default_factory=dict)
    ev_households: list[int] = field(default_factory=list)
    dissatisfaction_count: int = 0


def assemble_report(ledger: YearLedger, overload_unit: str = "hours") -> KpiReport:
    """Fold one year's ledger into the seven headline indicators.

    Per-user averages divide by the number of EV-owning households at
    year end; a year without any charged energy reports the per-user
    metrics as not-applicable (None).
    """
    if overload_unit == "hours":
        overloads = ledger.overload_hours
    elif overload_unit == "events":
        overloads = len(ledger.overload_events)
    elif overload_unit == "minutes":
        overloads = ledger.overload_minutes
    else:
        raise ValueError(f"unknown overload unit {overload_unit!r}")

    total_kwh = sum(ledger.charging_kwh.values())
    if total_kwh > 0:
        avg_cost = sum(ledger.charging_cost.values()) / total_kwh
    else:
        avg_cost = None

    ev_hh = ledger.ev_households
    if ev_hh:
        bills = [ledger.baseload_cost.get(h, 0.0) + ledger.charging_cost.get(h, 0.0)
                 for h in ev_hh]
        co2s = [ledger.baseload_co2.get(h, 0.0) + ledger.charging_co2.get(h, 0.0)
                for h in ev_hh]
        avg_bill = float(np.mean(bills))
        avg_co2 = float(np.mean(co2s))
    else:
        avg_bill = None
        avg_co2 = None

    revenue = sum(ledger.baseload_tariff.values()) + sum(ledger.charging_tariff.values())

    return KpiReport(
        year=ledger.year,
        overload_count=overloads,
        avg_charging_cost_dkk_per_kwh=avg_cost,
        avg_total_bill_dkk=avg_bill,
        avg_total_co2_kg=avg_co2,
        dissatisfaction_count=ledger.dissatisfaction_count,
        load_factor=load_factor(ledger.hourly_max_load),
        dso_revenue_dkk=revenue,
    )
