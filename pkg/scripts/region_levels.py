"""Lowest eigenenergies of the dipole plus a few central cavities, with photon content."""
import argparse
import sys

import numpy as np

from wqed.io import Table, write_table
from wqed.matching import build_scatterer
from wqed.models import WaveguideSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--region", type=int, default=5)
    ap.add_argument("--cutoff", type=int, default=5)
    ap.add_argument("--levels", type=int, default=12)
    ap.add_argument("--g-max", type=float, default=0.6)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--out")
    args = ap.parse_args()
    w = WaveguideSpec(n_cavities=args.region + 4)
    table = Table("region_levels", ["g", "level_index", "E_minus_E0", "photon_number",
                                    "excitation_parity", "localized"],
                  params={"region_size": args.region, "excitation_cutoff": args.cutoff})
    for g in np.linspace(0, args.g_max, args.points):
        scat = build_scatterer(w, 1.0, g, args.region, args.cutoff, check_edge=False)
        for i in range(min(args.levels, len(scat.energies))):
            table.append({"g": float(g), "level_index": i,
                          "E_minus_E0": float(scat.energies[i] - scat.energies[0]),
                          "photon_number": float(scat.photon_number[i]),
                          "excitation_parity": int(scat.excitation_parity[i]),
                          "localized": scat.is_localized(i)})
    write_table(table, args.out, stream=sys.stdout)


if __name__ == "__main__":
    main()
