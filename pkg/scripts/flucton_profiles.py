"""Flucton paths u_fl(tau) and fluctuation potentials W(tau) for the quartic
profile u**2/2 + u**4 (unit mass), one file per observation point u0.

    python3 scripts/flucton_profiles.py --out results/flucton
"""

import argparse
import csv
from fractions import Fraction
from pathlib import Path

from semiclassical_aho.flucton import flucton_action, flucton_path, fluctuation_profile
from semiclassical_aho.potential import POLYNOMIAL, make_potential


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--u0", type=float, nargs="+", default=[0.5, 1.0, 2.0, 3.0])
    ap.add_argument("--tmax", type=float, default=5.0)
    ap.add_argument("--samples", type=int, default=201)
    ap.add_argument("--out", default="results/flucton")
    args = ap.parse_args()

    pot = make_potential(POLYNOMIAL, {2: Fraction(1, 2), 4: 1}, mass_convention="unit")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for u0 in args.u0:
        path = flucton_path(pot, u0, args.tmax, args.samples)
        prof = fluctuation_profile(path)
        name = out / f"path_u0_{u0:g}.csv"
        with open(name, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "u_fl", "W"])
            w.writerows(zip(path.tau, path.u, prof.W))
        s = flucton_action(pot, u0).reduced
        print(f"u0 = {u0:g}: one-arm action {s:.12f}, W(0) = {prof.W[0]:.6f} -> {name}")


if __name__ == "__main__":
    main()
