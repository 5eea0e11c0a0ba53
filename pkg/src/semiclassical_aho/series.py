"""Truncated power series on plain lists, generic over Fraction and float.

A series is a list ``a`` with ``a[i]`` the coefficient of ``t**i``.  All
operations truncate to an explicit length ``n``; nothing here knows about
physics.  Used exactly (Fraction) by the perturbative recursions and in
floating point as Taylor-mode automatic differentiation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def zeros(n: int, like=0):
    return [like * 0 for _ in range(n)]


def add(a: Sequence, b: Sequence, n: int | None = None) -> list:
    n = max(len(a), len(b)) if n is None else n
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def scale(a: Sequence, s) -> list:
    return [s * x for x in a]


def mul(a: Sequence, b: Sequence, n: int) -> list:
    out = [a[0] * 0 if a else 0] * n
    for i, ai in enumerate(a[:n]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n - i]):
            out[i + j] += ai * bj
    return out


def deriv(a: Sequence) -> list:
    return [k * a[k] for k in range(1, len(a))]


def inv(a: Sequence, n: int) -> list:
    """1/a truncated to n terms; requires a[0] != 0."""
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no inverse")
    out = [1.0 / a[0] if isinstance(a[0], float) else Fraction(1) / a[0]]
    for k in range(1, n):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out.append(-s * out[0])
    return out


def sqrt(a: Sequence, n: int, root0=None) -> list:
    """Square root with positive constant term ``root0`` (defaults to sqrt(a[0]))."""
    if root0 is None:
        if isinstance(a[0], Fraction):
            num, den = math.isqrt(a[0].numerator), math.isqrt(a[0].denominator)
            if Fraction(num, den) ** 2 != a[0]:
                raise ValueError("constant term is not a rational square; pass root0")
            root0 = Fraction(num, den)
        else:
            root0 = math.sqrt(a[0])
    if root0 == 0:
        raise ValueError("square root of a series vanishing at the origin")
    out = [root0]
    two_r = 2 * root0
    for k in range(1, n):
        s = a[k] if k < len(a) else 0
        s = s - sum(out[j] * out[k - j] for j in range(1, k))
        out.append(s / two_r)
    return out


def shift_poly(c: Sequence[float], x0: float, n: int) -> list:
    """Taylor coefficients of sum_k c_k (x0 + t)**k about t = 0, first n terms."""
    deg = len(c) - 1
    out = []
    for j in range(min(n, deg + 1)):
        out.append(sum(c[k] * math.comb(k, j) * x0 ** (k - j) for k in range(j, deg + 1)))
    return out + [0.0] * (n - len(out))


def sin_jet(x0: float, n: int, freq: float = 1.0) -> list:
    """Taylor coefficients of sin(freq * (x0 + t))."""
    s, c = math.sin(freq * x0), math.cos(freq * x0)
    cycle = [s, c, -s, -c]
    return [cycle[k % 4] * freq**k / math.factorial(k) for k in range(n)]


def evaluate(a: Sequence, t):
    """Horner evaluation of the truncated series at ``t``."""
    acc = 0
    for coef in reversed(a):
        acc = acc * t + coef
    return acc
