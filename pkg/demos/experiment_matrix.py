"""
Running a strategy x tariff experiment matrix
=============================================

Drives the command-line entry points programmatically: validates the
neighborhood scenario, runs its ten experiments in parallel, and prints the
percentage-difference table of one run against the baseline.
"""

from pathlib import Path

from evsim.cli import main

here = Path(__file__).parent
scenario = here / "neighborhood.ini"
out = Path("demo_output") / "matrix"

# equivalent to: evsim validate demos/neighborhood.ini
assert main(["validate", str(scenario)]) == 0

# equivalent to: evsim run demos/neighborhood.ini --out ... --parallel 4
assert main(["run", str(scenario), "--out", str(out), "--parallel", "4"]) == 0

# equivalent to: evsim compare <kpi.csv> <kpi.csv>
print("\nround robin under time-of-use vs the traditional/fixed baseline:")
main(["compare", str(out / "rr_tou" / "kpi.csv"),
      str(out / "trad_fixed" / "kpi.csv")])
