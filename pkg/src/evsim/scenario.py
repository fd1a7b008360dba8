"""Scenario files: flat key=value config with sections, CSV ingestion, validation.

Every dataset invariant (coverage, monotone timestamps, market-share sums,
adoption-curve totals) is checked eagerly at load so runs fail fast.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import ExperimentSpec, HouseholdBaseload, ScenarioData
from .fleet import AdoptionCurve, DrivingPattern, EvModel, validate_catalog
from .grid import Transformer
from .rng import RngStreams
from .synth import (SyntheticBaseloadSpec, SyntheticCo2Spec, SyntheticPriceSpec,
                    generate_baseload, generate_co2, generate_spot)
from .tariffs import (Co2IntensitySeries, DistributionTariff, SpotPriceSeries,
                      TouBand)
from .timebase import SimulationSpan, Timestamp

DEFAULT_CATALOG_FILE = Path(__file__).parent / "data" / "default_catalog.csv"
DEFAULT_CURVE_FILE = Path(__file__).parent / "data" / "default_adoption_curve.csv"


class ScenarioError(ValueError):
    """A scenario file or referenced dataset violates an invariant."""

    def __init__(self, file: str, where: str, message: str):
        self.file = file
        self.where = where
        super().__init__(f"{file}: [{where}] {message}")


def _read_rows(path: Path, expected_header: list[str]) -> list[tuple[int, list[str]]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = [(i + 1, row) for i, row in enumerate(reader) if row]
    except OSError as exc:
        raise ScenarioError(str(path), "file", str(exc)) from exc
    if not rows or [c.strip() for c in rows[0][1]] != expected_header:
        raise ScenarioError(str(path), "line 1",
                            f"expected header {','.join(expected_header)}")
    return rows[1:]


def read_hourly_series_csv(path: Path, value_column: str) -> tuple[Timestamp, np.ndarray]:
    """`timestamp_iso8601,<value>` with strict hourly steps, no gaps or dups."""
    rows = _read_rows(path, ["timestamp_iso8601", value_column])
    if not rows:
        raise ScenarioError(str(path), "body", "series is empty")
    minutes = []
    values = []
    for line, row in rows:
        try:
            minutes.append(Timestamp.from_iso(row[0]).minutes)
            values.append(float(row[1]))
        except ValueError as exc:
            raise ScenarioError(str(path), f"line {line}", str(exc)) from exc
    start = minutes[0]
    for k, m in enumerate(minutes):
        if m != start + 60 * k:
            raise ScenarioError(str(path), f"line {rows[k][0]}",
                                "gap or duplicate timestamp (hourly steps required)")
    return Timestamp(start), np.array(values)


def read_baseload_csv(path: Path, household_ids: list[int]) -> HouseholdBaseload:
    """Long-form per-household hourly load: timestamp_iso8601,household_id,load_kw."""
    rows = _read_rows(path, ["timestamp_iso8601", "household_id", "load_kw"])
    series: dict[int, list[tuple[int, float]]] = {hid: [] for hid in household_ids}
    for line, row in rows:
        try:
            m = Timestamp.from_iso(row[0]).minutes
            hid = int(row[1])
            kw = float(row[2])
        except ValueError as exc:
            raise ScenarioError(str(path), f"line {line}", str(exc)) from exc
        if hid not in series:
            raise ScenarioError(str(path), f"line {line}",
                                f"unknown household id {hid}")
        series[hid].append((m, kw))
    lengths = {len(v) for v in series.values()}
    if len(lengths) != 1:
        raise ScenarioError(str(path), "body",
                            "households have differing series lengths")
    n = lengths.pop()
    if n == 0:
        raise ScenarioError(str(path), "body", "baseload is empty")
    start = series[household_ids[0]][0][0]
    matrix = np.empty((len(household_ids), n))
    for row_i, hid in enumerate(household_ids):
        for k, (m, kw) in enumerate(series[hid]):
            if m != start + 60 * k:
                raise ScenarioError(str(path), f"household {hid}",
                                    "gap or duplicate timestamp")
            matrix[row_i, k] = kw
    return HouseholdBaseload(Timestamp(start), list(household_ids), matrix)


def read_catalog_csv(path: Path) -> list[EvModel]:
    rows = _read_rows(path, ["name", "battery_kwh", "max_rate_kw", "market_share"])
    models = []
    for line, row in rows:
        try:
            models.append(EvModel(row[0].strip(), float(row[1]), float(row[2]),
                                  float(row[3])))
        except ValueError as exc:
            raise ScenarioError(str(path), f"line {line}", str(exc)) from exc
    try:
        validate_catalog(models)
    except ValueError as exc:
        raise ScenarioError(str(path), "body", str(exc)) from exc
    return models


def read_adoption_curve_csv(path: Path) -> AdoptionCurve:
    rows = _read_rows(path, ["year", "cumulative_adopters"])
    points = []
    for line, row in rows:
        try:
            points.append((int(row[0]), int(row[1])))
        except ValueError as exc:
            raise ScenarioError(str(path), f"line {line}", str(exc)) from exc
    try:
        return AdoptionCurve(points)
    except ValueError as exc:
        raise ScenarioError(str(path), "body", str(exc)) from exc


def read_tou_tariff_csv(path: Path) -> list[TouBand]:
    rows = _read_rows(path, ["season", "start_hour", "end_hour", "dkk_per_kwh"])
    bands = []
    for line, row in rows:
        try:
            bands.append(TouBand(row[0].strip(), int(row[1]), int(row[2]),
                                 float(row[3])))
        except ValueError as exc:
            raise ScenarioError(str(path), f"line {line}", str(exc)) from exc
    return bands


@dataclass
class Scenario:
    """A fully validated scenario: immutable inputs plus the experiment list."""

    path: Path
    data: ScenarioData
    span: SimulationSpan
    seed: int
    experiments: list[ExperimentSpec]
    content_hash: str
    synthetic_sources: dict[str, object] = field(default_factory=dict)

    def experiment(self, exp_id: str) -> ExperimentSpec:
        for e in self.experiments:
            if e.id == exp_id:
                return e
        raise KeyError(exp_id)


def _get(cfg, section: str, key: str, path: str, cast=str, default=None):
    if not cfg.has_section(section) and default is not None:
        return default
    try:
        raw = cfg.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is not None:
            return default
        raise ScenarioError(path, f"{section}.{key}", "missing required key")
    try:
        return cast(raw)
    except ValueError as exc:
        raise ScenarioError(path, f"{section}.{key}", f"bad value {raw!r}: {exc}")


def _resolve(base: Path, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base.parent / p


def load_scenario(path: str | Path, seed_override: int | None = None) -> Scenario:
    """Parse and eagerly validate a scenario file and everything it references."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(str(path), "file", str(exc)) from exc
    content_hash = hashlib.sha256(text.encode()).hexdigest()

    cfg = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cfg.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(str(path), "syntax", str(exc)) from exc

    sp = str(path)
    households = _get(cfg, "scenario", "households", sp, int)
    if households <= 0:
        raise ScenarioError(sp, "scenario.households", "must be positive")
    household_ids = list(range(1, households + 1))
    seed = _get(cfg, "scenario", "seed", sp, int, default=0)
    if seed_override is not None:
        seed = seed_override
    tick = _get(cfg, "scenario", "tick_minutes", sp, int, default=1)
    span = SimulationSpan(
        Timestamp.from_iso(_get(cfg, "scenario", "span_start", sp)),
        Timestamp.from_iso(_get(cfg, "scenario", "span_end", sp)),
        tick)

    transformer = Transformer(
        capacity_kw=_get(cfg, "transformer", "capacity_kw", sp, float),
        buffer_kw=_get(cfg, "transformer", "buffer_kw", sp, float, default=0.0))

    streams = RngStreams(seed)
    synthetic_sources: dict[str, object] = {}

    def source_of(section: str) -> str:
        src = _get(cfg, section, "source", sp, str, default="synthetic").strip()
        has_path = cfg.has_option(section, "path")
        if src == "csv" and not has_path:
            raise ScenarioError(sp, f"{section}.path", "csv source needs a path")
        if src == "synthetic" and has_path:
            raise ScenarioError(sp, section,
                                "exactly one of synthetic spec or path allowed")
        if src not in ("csv", "synthetic"):
            raise ScenarioError(sp, f"{section}.source", f"unknown source {src!r}")
        return src

    # baseload
    if source_of("baseload") == "csv":
        baseload = read_baseload_csv(_resolve(path, cfg.get("baseload", "path")),
                                     household_ids)
    else:
        bl_spec = SyntheticBaseloadSpec(
            mean_daily_kwh=_get(cfg, "baseload", "mean_daily_kwh", sp, float, 10.0),
            morning_peak_weight=_get(cfg, "baseload", "morning_peak_weight", sp, float, 0.8),
            evening_peak_weight=_get(cfg, "baseload", "evening_peak_weight", sp, float, 2.2),
            weekend_factor=_get(cfg, "baseload", "weekend_factor", sp, float, 1.1),
            noise_std=_get(cfg, "baseload", "noise_std", sp, float, 0.1))
        baseload = generate_baseload(bl_spec, household_ids, span, streams)
        synthetic_sources["baseload"] = bl_spec

    # spot prices
    if source_of("spot") == "csv":
        start, values = read_hourly_series_csv(
            _resolve(path, cfg.get("spot", "path")), "dkk_per_kwh")
        spot = SpotPriceSeries(start, values)
    else:
        spot_spec = SyntheticPriceSpec(
            mean_dkk_per_kwh=_get(cfg, "spot", "mean_dkk_per_kwh", sp, float, 1.0),
            diurnal_amplitude=_get(cfg, "spot", "diurnal_amplitude", sp, float, 0.3),
            noise_std=_get(cfg, "spot", "noise_std", sp, float, 0.05))
        spot = generate_spot(spot_spec, span, streams)
        synthetic_sources["spot"] = spot_spec

    # co2 intensity
    if source_of("co2") == "csv":
        start, values = read_hourly_series_csv(
            _resolve(path, cfg.get("co2", "path")), "kg_per_kwh")
        co2 = Co2IntensitySeries(start, values)
    else:
        co2_spec = SyntheticCo2Spec(
            mean_kg_per_kwh=_get(cfg, "co2", "mean_kg_per_kwh", sp, float, 0.15),
            diurnal_amplitude=_get(cfg, "co2", "diurnal_amplitude", sp, float, 0.05),
            noise_std=_get(cfg, "co2", "noise_std", sp, float, 0.01))
        co2 = generate_co2(co2_spec, span, streams)
        synthetic_sources["co2"] = co2_spec

    # tariffs
    tariffs: dict[str, DistributionTariff] = {}
    fixed_rate = _get(cfg, "tariff", "fixed_dkk_per_kwh", sp, float, default=0.30)
    try:
        tariffs["fixed"] = DistributionTariff("fixed", fixed_dkk_per_kwh=fixed_rate)
        if cfg.has_option("tariff", "tou_path"):
            bands = read_tou_tariff_csv(_resolve(path, cfg.get("tariff", "tou_path")))
            tariffs["time_of_use"] = DistributionTariff("time_of_use", bands=bands)
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(sp, "tariff", str(exc)) from exc
    addons = _get(cfg, "tariff", "addons_dkk_per_kwh", sp, float, default=0.0)

    catalog_path = _resolve(path, cfg.get("catalog", "path")) \
        if cfg.has_option("catalog", "path") else DEFAULT_CATALOG_FILE
    catalog = read_catalog_csv(catalog_path)

    curve_path = _resolve(path, cfg.get("adoption", "path")) \
        if cfg.has_option("adoption", "path") else DEFAULT_CURVE_FILE
    curve = read_adoption_curve_csv(curve_path)
    if curve.final_value > households:
        raise ScenarioError(str(curve_path), "body",
                            f"curve reaches {curve.final_value} adopters"
                            f" but the scenario has {households} households")

    driving = DrivingPattern(
        departure_mean_min=_parse_time_of_day(
            _get(cfg, "driving", "departure_mean", sp, str, "07:30"), sp),
        departure_std_min=_get(cfg, "driving", "departure_std_min", sp, float, 60.0),
        arrival_mean_min=_parse_time_of_day(
            _get(cfg, "driving", "arrival_mean", sp, str, "16:30"), sp),
        arrival_std_min=_get(cfg, "driving", "arrival_std_min", sp, float, 90.0),
        trip_energy_mean_kwh=_get(cfg, "driving", "trip_energy_mean_kwh", sp, float, 8.0),
        trip_energy_std_kwh=_get(cfg, "driving", "trip_energy_std_kwh", sp, float, 3.0),
        weekday_trip_prob=_get(cfg, "driving", "weekday_trip_prob", sp, float, 1.0),
        weekend_trip_prob=_get(cfg, "driving", "weekend_trip_prob", sp, float, 0.5))

    overload_unit = _get(cfg, "kpi", "overload_unit", sp, str, default="hours").strip()
    if overload_unit not in ("hours", "events", "minutes"):
        raise ScenarioError(sp, "kpi.overload_unit",
                            f"must be hours, events or minutes, got {overload_unit!r}")

    data = ScenarioData(
        household_ids=household_ids, transformer=transformer, baseload=baseload,
        spot=spot, co2=co2, tariffs=tariffs, catalog=catalog,
        adoption_curve=curve, driving=driving, addons_dkk_per_kwh=addons,
        overload_unit=overload_unit)

    experiments = _parse_experiments(cfg, sp, span, seed)
    for e in experiments:
        if e.span.start.minutes < span.start.minutes or \
                e.span.end.minutes > span.end.minutes:
            raise ScenarioError(sp, f"experiment.{e.id}",
                                "experiment span must lie within the scenario span")
        if e.tariff_mode not in tariffs:
            raise ScenarioError(sp, f"experiment.{e.id}",
                                f"scenario defines no {e.tariff_mode!r} tariff"
                                " (add tariff.tou_path for time_of_use)")

    return Scenario(path=path, data=data, span=span, seed=seed,
                    experiments=experiments, content_hash=content_hash,
                    synthetic_sources=synthetic_sources)


def _parse_time_of_day(text: str, path: str) -> float:
    try:
        hh, mm = text.strip().split(":")
        minute = int(hh) * 60 + int(mm)
    except ValueError as exc:
        raise ScenarioError(path, "driving", f"bad time of day {text!r}") from exc
    if not (0 <= minute < 24 * 60):
        raise ScenarioError(path, "driving", f"time of day out of range: {text!r}")
    return float(minute)


def _parse_experiments(cfg, path: str, default_span: SimulationSpan,
                       seed: int) -> list[ExperimentSpec]:
    exp_sections = [s for s in cfg.sections() if s.startswith("experiment.")]
    specs: list[ExperimentSpec] = []
    if not exp_sections:
        # one experiment per strategy over the scenario span, traditional baseline
        from .strategies import STRATEGY_NAMES
        for name in STRATEGY_NAMES:
            baseline = None if name == "traditional" else "traditional"
            specs.append(ExperimentSpec(id=name, strategy=name, span=default_span,
                                        seed=seed, baseline_id=baseline))
        return specs

    for section in exp_sections:
        exp_id = section.split(".", 1)[1]
        strategy = _get(cfg, section, "strategy", path)
        span = default_span
        if cfg.has_option(section, "span_start") or cfg.has_option(section, "span_end"):
            span = SimulationSpan(
                Timestamp.from_iso(_get(cfg, section, "span_start", path)),
                Timestamp.from_iso(_get(cfg, section, "span_end", path)),
                default_span.tick_minutes)
        interval = _get(cfg, section, "decision_interval_min", path, int, default=0)
        try:
            specs.append(ExperimentSpec(
                id=exp_id, strategy=strategy.strip(), span=span,
                tariff_mode=_get(cfg, section, "tariff_mode", path, str,
                                 default="fixed").strip(),
                seed=_get(cfg, section, "seed", path, int, default=seed),
                decision_interval_min=interval or None,
                baseline_id=_get(cfg, section, "baseline", path, str,
                                 default="").strip() or None))
        except ValueError as exc:
            raise ScenarioError(path, section, str(exc)) from exc

    ids = [e.id for e in specs]
    if len(ids) != len(set(ids)):
        raise ScenarioError(path, "experiments", "duplicate experiment ids")
    for e in specs:
        if e.baseline_id is not None and e.baseline_id not in ids:
            raise ScenarioError(path, f"experiment.{e.id}",
                                f"unknown baseline {e.baseline_id!r}")
        if e.tariff_mode not in ("fixed", "time_of_use"):
            raise ScenarioError(path, f"experiment.{e.id}",
                                f"unknown tariff mode {e.tariff_mode!r}")
    return specs
