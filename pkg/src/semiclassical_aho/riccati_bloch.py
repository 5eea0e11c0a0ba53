"""Ground-state perturbation theory for the Riccati-Bloch equation.

In the quantum coordinate v the logarithmic derivative Y(v) of the ground
state and the reduced energy eps = E/hbar obey

    Y' - Y**2 = eps - V̂(lam v)/lam**2,    V̂(lam v)/lam**2 = sum_k c_k lam**(k-2) v**k.

Expanding Y = sum lam**n Y_n(v) and eps = sum lam**n eps_n gives, for n >= 1,

    Y_n' - 2 v Y_n = eps_n - c_{n+2} v**(n+2) + sum_{k=1}^{n-1} Y_k Y_{n-k},

which is solved in polynomials of degree n + 1 from the top coefficient down.
The v**0 equation is the solvability condition fixing eps_n.  Everything is
done in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import series as ps
from .errors import NotNormalized, Overflow
from .potential import Potential

DEFAULT_ORDER = 30
DEFAULT_BIT_BUDGET = 100_000


@dataclass(frozen=True)
class RBSeries:
    order: int
    eps: tuple[Fraction, ...]
    Y: tuple[tuple[Fraction, ...], ...]  # Y[n][j] = coefficient of v**j in Y_n

    def Y_poly(self, n: int) -> tuple[Fraction, ...]:
        return self.Y[n]

    def Y_value(self, n: int, v: float) -> float:
        return float(ps.evaluate([float(c) for c in self.Y[n]], v))

    def band(self, n: int, m: int) -> Fraction:
        """Coefficient of v**(n+1-m) in Y_n (band m = 0 is the top degree)."""
        j = n + 1 - m
        return self.Y[n][j] if 0 <= j < len(self.Y[n]) else Fraction(0)

    def reexpand(self, lam: float, N: int | None = None) -> list[float]:
        """Taylor coefficients in v of sum_{n<=N} lam**n Y_n(v)."""
        N = self.order if N is None else N
        out = [0.0] * (N + 2)
        for n in range(N + 1):
            w = lam**n
            for j, c in enumerate(self.Y[n]):
                out[j] += w * float(c)
        return out


@dataclass(frozen=True)
class SmallVExpansion:
    alpha: float
    eps: float
    coeffs: tuple  # Taylor coefficients of Y about v = 0


@dataclass(frozen=True)
class PartialSum:
    value: float
    optimal_index: int  # index of the smallest term before the terms start growing
    optimal_value: float  # partial sum through optimal_index
    terms: tuple[float, ...]
    diverging: bool  # True when growth was detected within the requested order


def _check_budget(x: Fraction, budget: int) -> None:
    if max(x.numerator.bit_length(), x.denominator.bit_length()) > budget:
        raise Overflow(f"rational coefficient exceeds {budget} bits")


def rb_ground_series(pot: Potential, N: int = DEFAULT_ORDER,
                     bit_budget: int = DEFAULT_BIT_BUDGET) -> RBSeries:
    """Exact eps_0..eps_N and Y_0..Y_N for the ground state."""
    if N < 0:
        raise ValueError("order must be non-negative")
    if pot.c_exact(2) != 1:
        raise NotNormalized("perturbation theory needs c_2 = 1")
    one = Fraction(1)
    Y: list[list[Fraction]] = [[Fraction(0), one]]
    eps: list[Fraction] = [one]
    for n in range(1, N + 1):
        # right-hand side without eps_n, degrees 0..n+2
        rhs = [Fraction(0)] * (n + 3)
        rhs[n + 2] -= pot.c_exact(n + 2)
        for k in range(1, n):
            for i, a in enumerate(Y[k]):
                if a:
                    for j, b in enumerate(Y[n - k]):
                        rhs[i + j] += a * b
        y = [Fraction(0)] * (n + 3)
        y[n + 1] = -rhs[n + 2] / 2
        for m in range(n + 1, 0, -1):
            y[m - 1] = ((m + 1) * y[m + 1] - rhs[m]) / 2
        e = y[1] - rhs[0]
        _check_budget(e, bit_budget)
        eps.append(e)
        Y.append(y[: n + 2])
    return RBSeries(N, tuple(eps), tuple(tuple(p) for p in Y))


def rb_residual(series: RBSeries, pot: Potential) -> list[list[Fraction]]:
    """lam**k coefficient of Y' - Y**2 - eps + V̂(lam v)/lam**2 for k <= order.

    Each entry is a polynomial in v; an exact solution gives all zeros.
    """
    out = []
    for k in range(series.order + 1):
        poly = [Fraction(0)] * (k + 3)
        for j, c in enumerate(ps.deriv(series.Y[k])):
            poly[j] += c
        for i in range(k + 1):
            for a_idx, a in enumerate(series.Y[i]):
                for b_idx, b in enumerate(series.Y[k - i]):
                    poly[a_idx + b_idx] -= a * b
        poly[0] -= series.eps[k]
        poly[k + 2] += pot.c_exact(k + 2)
        out.append(poly)
    return out


def rb_small_v(pot: Potential, alpha, eps, N: int, lam=None) -> SmallVExpansion:
    """Taylor coefficients t_0..t_N of Y about v = 0 for given alpha = Y(0), eps.

    From (m+1) t_{m+1} = sum_{i+j=m} t_i t_j + eps [m=0] - c_m lam**(m-2).
    Exact when alpha, eps and lam are all Fractions.
    """
    if N < 3:
        raise ValueError("need at least N = 3 terms")
    lam = pot.lam if lam is None else lam
    exact = all(isinstance(x, (Fraction, int)) for x in (alpha, eps, lam))
    coef = pot.c_exact if exact else pot.c
    if exact:
        alpha, eps, lam = Fraction(alpha), Fraction(eps), Fraction(lam)
    else:
        alpha, eps, lam = float(alpha), float(eps), float(lam)
    t = [alpha]
    for m in range(N):
        s = sum(t[i] * t[m - i] for i in range(m + 1))
        if m == 0:
            s += eps
        if m >= 2:
            s -= coef(m) * lam ** (m - 2)
        t.append(s / (m + 1))
    return SmallVExpansion(alpha, eps, tuple(t))


def eps_partial_sum(series: RBSeries, lam: float, N: int | None = None) -> PartialSum:
    """sum_{n<=N} eps_n lam**n and the optimal-truncation point.

    Zero coefficients (e.g. odd orders of even potentials) are skipped when
    looking for the first growing term.
    """
    N = series.order if N is None else N
    if N > series.order:
        raise ValueError(f"series only known to order {series.order}")
    terms = tuple(float(series.eps[n]) * lam**n for n in range(N + 1))
    value = sum(terms)
    nonzero = [n for n in range(N + 1) if terms[n] != 0]
    opt, diverging = (nonzero[-1] if nonzero else 0), False
    for a, b in zip(nonzero, nonzero[1:]):
        if abs(terms[b]) > abs(terms[a]):
            opt, diverging = a, True
            break
    return PartialSum(value, opt, sum(terms[: opt + 1]), terms, diverging)


def eps_series_value(eps: Sequence[Fraction], lam: float) -> float:
    return sum(float(e) * lam**n for n, e in enumerate(eps))
