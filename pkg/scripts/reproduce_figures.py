"""Regenerate the phase-diagram and incentive-collapse tables.

Writes results/phase.csv and results/collapse.csv, then prints where the
collapse threshold falls for a few effort specifications.
"""

import argparse
import json
import math
from pathlib import Path

from truthcoupling import cli
from truthcoupling.incentives import LogFamily, PowerFamily, collapse_pressure

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default=str(ROOT / "results"))
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for name in ("phase", "collapse"):
        cfg = json.loads((ROOT / "configs" / f"{name}.json").read_text())
        text = cli.run(name, cfg)
        (outdir / f"{name}.csv").write_text(text)
        print(f"{name}: {len(text.splitlines()) - 1} rows -> {outdir / (name + '.csv')}")

    print("\ncollapse pressure Lambda* = gamma / (gamma - f'(0))")
    for family, gamma in [
        (LogFamily(1, 1), 3.0),
        (LogFamily(21, 1), 22.0),
        (LogFamily(1, 1), 1.0),
        (PowerFamily(1, 0.5), 100.0),
    ]:
        lam = collapse_pressure(family, gamma)
        shown = "inf" if math.isinf(lam) else f"{lam:.4g}"
        print(f"  {family!r:40s} gamma={gamma:<6g} Lambda*={shown}")


if __name__ == "__main__":
    main()
