"""Ground and low excited levels of u**2 + u**4 from three routes: optimized
trial functions, the spectral basis and Prufer shooting.

    python3 scripts/compare_table.py --g 0.1 1 10 --states 0,0 0,1 1,0
"""

import argparse
import time

from semiclassical_aho.approximant import optimize_params
from semiclassical_aho.cli import parse_state
from semiclassical_aho.potential import quartic_aho
from semiclassical_aho.reference_solver import eigensolve_spectral, shoot_level


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    ap.add_argument("--states", nargs="+", default=["0,0", "0,1", "1,0", "1,1", "2,0", "2,1"])
    args = ap.parse_args()

    print(f"{'g':>6} {'n':>2} {'p':>2} {'E_var':>20} {'E_spectral':>20} {'E_shooting':>20} "
          f"{'rel_err':>9} {'sec':>6}")
    for g in args.g:
        spec = eigensolve_spectral(quartic_aho(g), k_max=5).energies
        for state in args.states:
            n, p = parse_state(state)
            k = 2 * n + p
            t0 = time.perf_counter()
            res = optimize_params(n, p, g)
            shot = shoot_level(quartic_aho(g), k).energy
            rel = abs(res.E_var - spec[k]) / spec[k]
            print(f"{g:6g} {n:2d} {p:2d} {res.E_var:20.14f} {spec[k]:20.14f} {shot:20.14f} "
                  f"{rel:9.1e} {time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
