"""Elastic transmittance map beyond the RWA, or the transmittance-minimum trace (--trace)."""
import argparse
import sys

import numpy as np

from wqed.io import write_table
from wqed.models import WaveguideSpec
from wqed.sweeps import SweepAborted, SweepPlan, resonance_trace, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g-max", type=float, default=0.4)
    ap.add_argument("--g-points", type=int, default=9)
    ap.add_argument("--omega-points", type=int, default=101)
    ap.add_argument("--region", type=int, default=7)
    ap.add_argument("--cutoff", type=int, default=4)
    ap.add_argument("--rwa", action="store_true")
    ap.add_argument("--trace", action="store_true")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()
    lo, hi = WaveguideSpec().band
    omegas = tuple(np.linspace(lo, hi, args.omega_points + 2)[1:-1])
    plan = SweepPlan(method="matching", g_values=tuple(np.linspace(0, args.g_max, args.g_points)),
                     omega_values=() if args.trace else omegas, rwa=args.rwa,
                     region_size=args.region, excitation_cutoff=1 if args.rwa else args.cutoff,
                     delta_source="renormalized", workers=args.workers)
    try:
        table = resonance_trace(plan) if args.trace else run_sweep(plan)
    except SweepAborted as exc:
        exc.table.truncated = True
        write_table(exc.table, args.out, stream=sys.stdout)
        sys.exit(f"{exc}; use a larger --region")
    write_table(table, args.out, stream=sys.stdout)


if __name__ == "__main__":
    main()
