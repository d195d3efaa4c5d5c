"""Inelastic transmittance and its (1 - T - R)/2 proxy on a coupling x frequency grid."""
import argparse
import sys

import numpy as np

from wqed.io import write_table
from wqed.models import WaveguideSpec
from wqed.sweeps import SweepAborted, SweepPlan, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g-min", type=float, default=0.1)
    ap.add_argument("--g-max", type=float, default=0.5)
    ap.add_argument("--g-points", type=int, default=9)
    ap.add_argument("--omega-points", type=int, default=101)
    ap.add_argument("--region", type=int, default=9)
    ap.add_argument("--cutoff", type=int, default=4)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()
    lo, hi = WaveguideSpec().band
    plan = SweepPlan(method="matching", rwa=False, delta_source="renormalized",
                     g_values=tuple(np.linspace(args.g_min, args.g_max, args.g_points)),
                     omega_values=tuple(np.linspace(lo, hi, args.omega_points + 2)[1:-1]),
                     region_size=args.region, excitation_cutoff=args.cutoff, workers=args.workers,
                     columns=("g", "omega", "T", "R", "inelastic_T", "inelastic_R", "inelastic_proxy",
                              "omega_min_inelastic", "flux_error"))
    try:
        table = run_sweep(plan)
    except SweepAborted as exc:
        exc.table.truncated = True
        write_table(exc.table, args.out, stream=sys.stdout)
        sys.exit(f"{exc}; use a larger --region")
    write_table(table, args.out, stream=sys.stdout)


if __name__ == "__main__":
    main()
