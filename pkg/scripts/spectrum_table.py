"""Lowest levels of three cavities plus a dipole: full model vs two-level truncations."""
import argparse
import sys

import numpy as np

from wqed.io import write_table
from wqed.matter import DipoleSpec
from wqed.models import WaveguideSpec
from wqed.sweeps import SweepPlan, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g-max", type=float, default=0.5)
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--cutoff", type=int, default=6)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()
    plan = SweepPlan(method="spectrum", g_values=tuple(np.linspace(0, args.g_max, args.points)),
                     n_levels_out=args.levels)
    table = run_sweep(plan, DipoleSpec(), WaveguideSpec(n_cavities=3, photon_cutoff=args.cutoff))
    write_table(table, args.out, stream=sys.stdout)


if __name__ == "__main__":
    main()
