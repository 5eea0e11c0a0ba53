"""Exact perturbative coefficients of the quartic ground state and their
large-order growth against the known asymptotic law, which in these units
(H = -d2 + x**2 + lam**2 x**4) reads

    eps_{2n} ~ (-1)**(n+1) 2 sqrt(6) / pi**1.5 * (3/2)**n * Gamma(n + 1/2) * (1 - 95/(72 n)).

    python3 scripts/bender_wu_table.py --order 60
"""

import argparse
import math

from semiclassical_aho.potential import quartic_aho
from semiclassical_aho.riccati_bloch import rb_ground_series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=60, help="highest power of lambda (even)")
    args = ap.parse_args()

    s = rb_ground_series(quartic_aho(), args.order)
    print(f"{'n':>4} {'eps_2n':>26} {'ratio to law':>14}")
    for n in range(1, args.order // 2 + 1):
        e = s.eps[2 * n]
        law = ((-1) ** (n + 1) * 2 * math.sqrt(6) / math.pi**1.5 * 1.5**n * math.gamma(n + 0.5)
               * (1 - 95 / (72 * n)))
        print(f"{n:4d} {float(e):26.16e} {float(e) / law:14.10f}")


if __name__ == "__main__":
    main()
