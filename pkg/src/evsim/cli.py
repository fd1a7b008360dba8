"""Command-line entry point: run, validate, gen-synthetic, compare.

Exit codes: 0 ok, 1 validation error, 2 runtime error.
EVSIM_SEED overrides the scenario seed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import outputs
from .engine import SimulationOutput, run_experiment
from .kpi import pct_difference
from .scenario import Scenario, ScenarioError, load_scenario

log = logging.getLogger("evsim")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evsim",
                                description="EV home-charging grid simulator")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenario experiments")
    run.add_argument("scenario")
    run.add_argument("--experiment", action="append", default=None,
                     metavar="ID", help="run only these experiment ids")
    run.add_argument("--out", default="out", metavar="DIR")
    run.add_argument("--parallel", type=int, default=1, metavar="N")

    val = sub.add_parser("validate", help="validate a scenario file")
    val.add_argument("scenario")

    gen = sub.add_parser("gen-synthetic",
                         help="write the scenario's synthetic datasets as CSV")
    gen.add_argument("scenario")
    gen.add_argument("--out", required=True, metavar="DIR")

    cmp_ = sub.add_parser("compare", help="percentage-difference table of two KPI CSVs")
    cmp_.add_argument("kpi_a")
    cmp_.add_argument("kpi_b")
    return p


def _seed_override() -> int | None:
    raw = os.environ.get("EVSIM_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ScenarioError("EVSIM_SEED", "env", f"not an integer: {raw!r}")


def _load(path: str) -> Scenario:
    return load_scenario(path, seed_override=_seed_override())


def _run_one(scenario_path: str, exp_id: str) -> SimulationOutput:
    scn = _load(scenario_path)
    return run_experiment(scn.experiment(exp_id), scn.data)


def cmd_run(args) -> int:
    scn = _load(args.scenario)
    specs = scn.experiments
    if args.experiment:
        unknown = [e for e in args.experiment if all(s.id != e for s in specs)]
        if unknown:
            known = ", ".join(s.id for s in specs)
            raise ScenarioError(args.scenario, "experiments",
                                f"unknown experiment(s) {unknown}; available: {known}")
        specs = [s for s in specs if s.id in args.experiment]
        # baselines referenced by selected experiments must run too
        needed = {s.baseline_id for s in specs if s.baseline_id}
        specs += [s for s in scn.experiments
                  if s.id in needed and all(x.id != s.id for x in specs)]

    results: dict[str, SimulationOutput] = {}
    failures: dict[str, Exception] = {}
    if args.parallel > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            futures = {s.id: pool.submit(_run_one, args.scenario, s.id)
                       for s in specs}
        for exp_id, fut in futures.items():
            try:
                results[exp_id] = fut.result()
            except Exception as exc:   # one failure must not sink the rest
                failures[exp_id] = exc
    else:
        for s in specs:
            try:
                results[s.id] = run_experiment(s, scn.data)
            except Exception as exc:
                failures[s.id] = exc

    out_root = Path(args.out)
    for s in specs:
        if s.id not in results:
            continue
        baseline = results.get(s.baseline_id) if s.baseline_id else None
        outputs.write_all(out_root / s.id, results[s.id], scn.content_hash,
                          scn.data.transformer.capacity_kw, baseline)
        print(f"{s.id}: ok -> {out_root / s.id}")

    for exp_id, exc in failures.items():
        print(f"{exp_id}: FAILED: {exc}", file=sys.stderr)
    return EXIT_RUNTIME if failures else EXIT_OK


def cmd_validate(args) -> int:
    scn = _load(args.scenario)
    print(f"{args.scenario}: valid "
          f"({len(scn.data.household_ids)} households, "
          f"{len(scn.experiments)} experiments, seed {scn.seed})")
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    scn = _load(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs.write_baseload_csv(out / "baseload.csv", scn.data.baseload)
    outputs.write_hourly_csv(out / "spot.csv", scn.data.spot.start,
                             scn.data.spot.values, "dkk_per_kwh")
    outputs.write_hourly_csv(out / "co2.csv", scn.data.co2.start,
                             scn.data.co2.values, "kg_per_kwh")
    print(f"wrote baseload.csv, spot.csv, co2.csv to {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    rows_a = outputs.read_kpi_csv(Path(args.kpi_a))
    rows_b = outputs.read_kpi_csv(Path(args.kpi_b))
    by_year_b = {r["year"]: r for r in rows_b}
    print("year,metric,value,baseline,pct_difference")
    metrics = ["overload_count", "avg_charging_cost", "avg_total_bill",
               "avg_total_co2", "dissatisfaction", "load_factor", "dso_revenue"]
    for ra in rows_a:
        rb = by_year_b.get(ra["year"])
        if rb is None:
            continue
        for m in metrics:
            try:
                va, vb = float(ra[m]), float(rb[m])
            except ValueError:
                print(f"{ra['year']},{m},{ra[m]},{rb[m]},na")
                continue
            pct = 0.0 if va == vb == 0 else pct_difference(va, vb)
            pct_s = "na" if pct is None else f"{pct:.2f}"
            print(f"{ra['year']},{m},{ra[m]},{rb[m]},{pct_s}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("EVSIM_LOG", "WARNING"))
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "validate": cmd_validate,
                "gen-synthetic": cmd_gen_synthetic, "compare": cmd_compare}
    try:
        return handlers[args.command](args)
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        log.exception("runtime failure")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
