"""Dipole-gauge gap and polaron-renormalised gap versus coupling."""
import argparse
import sys

import numpy as np

from wqed.io import Table, write_table
from wqed.matter import DipoleSpec, renormalized_gap
from wqed.models import WaveguideSpec, spin_boson_model
from wqed.polaron import solve_polaron
from wqed.rwa_scattering import resonance_rwa


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g-max", type=float, default=0.6)
    ap.add_argument("--points", type=int, default=31)
    ap.add_argument("--n-modes", type=int, default=2001)
    ap.add_argument("--out")
    args = ap.parse_args()
    w = WaveguideSpec()
    gs = np.linspace(0, args.g_max, args.points)
    table = Table("gap_vs_coupling", ["g", "delta_prime", "delta_r", "omega_res_rwa", "lambda_c"],
                  params={"n_modes": args.n_modes})
    for g, dp, lam in renormalized_gap(DipoleSpec(), gs):
        sol = solve_polaron(spin_boson_model(w, dp, g, n_modes=args.n_modes))
        table.append({"g": g, "delta_prime": dp, "delta_r": sol.delta_r,
                      "omega_res_rwa": resonance_rwa(dp, g), "lambda_c": lam})
    write_table(table, args.out, stream=sys.stdout)


if __name__ == "__main__":
    main()
