"""Semiclassical expansion of the Generalized Bloch equation.

In the classical coordinate u = g x the logarithmic derivative Z(u) = g y obeys

    lam**2 Z' - Z**2 = lam**2 eps(lam) - V̂(u).

With Z = sum lam**n Z_n and eps = sum lam**n eps_n:

    Z_0 = u sqrt(V̂/u**2),    Z_1 = 0,
    Z_n = (Z_{n-2}' - eps_{n-2} - sum_{k=1}^{n-1} Z_k Z_{n-k}) / (2 Z_0).

Writing Z_0 = u S(u) with S = sqrt(Q), Q = V̂/u**2 > 0, fixes the branch:
Z_0 has the sign of u, which keeps the ground state normalizable on both
sides.  Higher Z_n are evaluated pointwise by propagating truncated Taylor
series (jets) through the recursion, i.e. forward-mode automatic
differentiation of arbitrary order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from . import series as ps
from .errors import (
    CutoffRequired,
    MissingEps,
    NonPolynomial,
    NotNormalized,
    OriginSingularity,
    QuadratureFailure,
)
from .potential import POLYNOMIAL, SINE_GORDON, Potential


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def z0(pot: Potential, u):
    """Leading term Z_0(u) = sign(u) sqrt(V̂(u))."""
    u = np.asarray(u, dtype=float)
    if pot.kind == SINE_GORDON:
        out = np.sin(u)
    else:
        out = u * np.sqrt(pot.ratio(u))
    return out if out.ndim else float(out)


def z2(pot: Potential, u, eps0: float = 1.0):
    """One-loop term Z_2 = (log sqrt V̂)'/2 - eps0 / (2 Z_0), written without
    the 1/u cancellation so it stays accurate near the origin."""
    u = np.asarray(u, dtype=float)
    if pot.kind == SINE_GORDON:
        if eps0 == 1.0:
            out = -0.5 * np.tan(u / 2)
        else:
            out = 0.5 / np.tan(u) - eps0 / (2 * np.sin(u))
        return out if out.ndim else float(out)
    q = pot.ratio(u)
    dq = pot.ratio(u, 1)
    s = np.sqrt(q)
    c = pot.ratio_coeffs().copy()
    c[0] -= eps0**2
    # (Q - eps0**2)/u with the constant term handled separately
    tail = np.polynomial.polynomial.polyval(u, c[1:]) if len(c) > 1 else 0.0 * u
    with np.errstate(divide="ignore", invalid="ignore"):
        head = np.where(c[0] == 0, 0.0, c[0] / u)
        out = (head + tail) / (2 * s * (s + eps0)) + dq / (4 * q)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

def _z0_jet(pot: Potential, u: float, n: int) -> list[float]:
    if pot.kind == SINE_GORDON:
        return ps.sin_jet(u, n)
    q = ps.shift_poly(list(pot.ratio_coeffs()), u, n)
    if q[0] <= 0:
        raise OriginSingularity(f"V̂/u^2 vanishes at u = {u}")
    return ps.mul([u, 1.0], ps.sqrt(q, n), n)


def z_jets(pot: Potential, eps: Sequence[float], N: int, u: float, extra: int = 1) -> list[list[float]]:
    """Taylor coefficients of Z_0..Z_N about a point u != 0.

    Z_n keeps ``extra + 1`` coefficients at least, so value and first
    derivative are always available.
    """
    length = N // 2 + 1 + extra
    zs = [_z0_jet(pot, u, length)]
    zs.append([0.0] * (length - 1))
    inv2z0 = ps.inv(ps.scale(zs[0], 2.0), length)
    for n in range(2, N + 1):
        num = ps.deriv(zs[n - 2])
        num[0] -= eps[n - 2]
        ln = len(num)
        for k in range(1, n):
            num = ps.add(num, ps.scale(ps.mul(zs[k], zs[n - k], ln), -1.0), ln)
        zs.append(ps.mul(num, inv2z0, ln))
    return zs


# ---------------------------------------------------------------------------
# exact expansion about the origin
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OriginSeries:
    """Exact Taylor coefficients of Z_n about u = 0 and the energies that
    regularity at the origin forces."""

    eps: tuple[Fraction, ...]
    Z: tuple[tuple[Fraction, ...], ...]

    def coefficient(self, n: int, j: int) -> Fraction:
        z = self.Z[n]
        return z[j] if j < len(z) else Fraction(0)


def gb_origin_series(pot: Potential, N: int, depth: int = 4) -> OriginSeries:
    """Regular solution of the Z_n recursion as exact power series at u = 0.

    Division by 2 Z_0 = 2 u S(u) needs the numerator to vanish at u = 0; that
    condition fixes eps_{n-2}, giving an energy expansion independent of the
    Riccati-Bloch route.  ``depth`` is the number of coefficients kept in Z_N.
    """
    if pot.c_exact(2) != 1:
        raise NotNormalized("origin expansion needs c_2 = 1")
    # each step n -> n + 2 costs two coefficients (one derivative, one 1/u)
    d0 = depth + N + 3
    q = [pot.c_exact(k + 2) for k in range(d0)]
    s = ps.sqrt(q, d0, root0=Fraction(1))
    inv2s = ps.inv(ps.scale(s, 2), d0)
    zs = [[Fraction(0)] + s[: d0 - 1], [Fraction(0)] * (d0 - 1)]
    eps: list[Fraction] = []
    for n in range(2, N + 3):
        num = ps.deriv(zs[n - 2])
        ln = len(num)
        for k in range(1, n):
            num = ps.add(num, ps.scale(ps.mul(zs[k], zs[n - k], ln), -1), ln)
        eps.append(num[0])
        num = num[1:]  # constant removed by eps_{n-2}; divide by u
        zs.append(ps.mul(num, inv2s, len(num)))
    return OriginSeries(tuple(eps[: N + 1]), tuple(tuple(z) for z in zs[: N + 1]))


# ---------------------------------------------------------------------------
# GB series container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GBSeries:
    pot: Potential
    order: int
    eps_in: tuple
    _origin: OriginSeries | None = field(default=None, repr=False, compare=False)

    @property
    def eps_float(self) -> list[float]:
        return [float(e) for e in self.eps_in]

    def jets(self, u: float, extra: int = 1) -> list[list[float]]:
        if u == 0:
            raise OriginSingularity("jets are taken at u != 0; use terms() at the origin")
        return z_jets(self.pot, self.eps_float, self.order, float(u), extra)

    def terms(self, u: float) -> np.ndarray:
        """Values Z_0(u)..Z_N(u)."""
        if u == 0:
            if self._origin is None:
                raise OriginSingularity("terms with poles at u = 0 (c_2 != 1 or non-regular eps)")
            return np.array([float(self._origin.coefficient(n, 0)) for n in range(self.order + 1)])
        return np.array([z[0] for z in self.jets(u)])

    def z(self, n: int, u):
        """Z_n at one point or an array of points."""
        u = np.asarray(u, dtype=float)
        out = np.array([self.terms(x)[n] for x in u.ravel()]).reshape(u.shape)
        return out if out.ndim else float(out)

    def value(self, u: float, lam: float) -> float:
        t = self.terms(u)
        return float(sum(t[n] * lam**n for n in range(len(t))))

    def residuals(self, u: float) -> np.ndarray:
        """Order-by-order residual of the GB equation at u, using exact jet
        derivatives; entry k is the lam**k coefficient (k = 0..N)."""
        zs = self.jets(u, extra=2)
        vals = [z[0] for z in zs]
        ders = [z[1] for z in zs]
        out = []
        for k in range(self.order + 1):
            r = -sum(vals[i] * vals[k - i] for i in range(k + 1))
            if k == 0:
                r += float(self.pot.eval(u))
            if k >= 2:
                r += ders[k - 2] - self.eps_float[k - 2]
            out.append(r)
        return np.array(out)


def gb_series(pot: Potential, eps: Sequence, N: int) -> GBSeries:
    """Semiclassical terms Z_0..Z_N for the energy coefficients ``eps``.

    Needs eps_0..eps_{N-2}.  For pure-power profiles, where no expansion in
    lam exists, pass eps = [eps_0] and N <= 2.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    if N >= 2 and len(eps) < N - 1:
        raise MissingEps(f"order {N} needs eps_0..eps_{N - 2}, got {len(eps)} values")
    origin = None
    if pot.c_exact(2) == 1 and N >= 0:
        ref = gb_origin_series(pot, N)
        if all(abs(float(a) - float(b)) <= 1e-12 * max(1.0, abs(float(b)))
               for a, b in zip(eps, ref.eps[: max(N - 1, 0)])):
            origin = ref
    return GBSeries(pot, N, tuple(eps), origin)


# ---------------------------------------------------------------------------
# one-loop determinant integral
# ---------------------------------------------------------------------------

def _regular(pot: Potential, eps0: float) -> bool:
    return pot.c_exact(2) == 1 and eps0 == 1.0


def _inv_sqrt_minus_pole(pot: Potential, u: float) -> float:
    """1/sqrt(V̂(u)) - 1/u for u > 0 and c_2 = 1, without cancellation."""
    if pot.kind == SINE_GORDON:
        return (u - math.sin(u)) / (u * math.sin(u))
    q = float(pot.ratio(u))
    s = math.sqrt(q)
    c = pot.ratio_coeffs()
    tail = float(np.polynomial.polynomial.polyval(u, c[1:])) if len(c) > 1 else 0.0
    return -tail / (s * (1.0 + s))


def _quad(f, a, b):
    val, err = quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400)
    if not math.isfinite(val):
        raise QuadratureFailure("non-finite quadrature result")
    return val, err


def det_log_routes(pot: Potential, eps0: float, u: float, u_min: float | None = None):
    """Both sides of  int Z_2 du = (1/4) log V̂ - (eps0/2) int du / sqrt(V̂).

    Returns (direct, closed) where ``direct`` integrates Z_2 itself and
    ``closed`` evaluates the right-hand side with its own quadrature.  On the
    regular branch (c_2 = 1, eps0 = 1) the lower limit is 0 and the divergent
    logs are paired analytically; otherwise ``u_min`` is the lower limit.
    """
    if not u > 0:
        raise ValueError("u must be positive")
    if _regular(pot, eps0):
        direct, _ = _quad(lambda t: z2(pot, t, 1.0), 0.0, u)
        if pot.kind == SINE_GORDON:
            log_v = 2 * math.log(math.sin(u))
        else:
            log_v = math.log(float(pot.eval(u)))
        tail, _ = _quad(lambda t: _inv_sqrt_minus_pole(pot, t), 0.0, u)
        closed = 0.25 * log_v - 0.5 * math.log(u) - 0.5 * tail
        return direct, closed
    if u_min is None or not u_min > 0:
        raise CutoffRequired("Z_2 has a pole at u = 0 here; supply u_min > 0")
    direct, _ = _quad(lambda t: z2(pot, t, eps0), u_min, u)
    inv_sqrt, _ = _quad(lambda t: 1.0 / math.sqrt(float(pot.eval(t))), u_min, u)
    closed = 0.25 * math.log(float(pot.eval(u)) / float(pot.eval(u_min))) - 0.5 * eps0 * inv_sqrt
    return direct, closed


def det_log(pot: Potential, eps0: float, u: float, u_min: float | None = None,
            check_tol: float = 1e-9) -> float:
    """int_0^u Z_2 du' (or from ``u_min`` when the origin pole does not cancel).

    The value comes from direct quadrature of Z_2 and is cross-checked against
    the closed-form side of the identity.
    """
    direct, closed = det_log_routes(pot, eps0, u, u_min)
    if abs(direct - closed) > check_tol * max(1.0, abs(direct)):
        raise QuadratureFailure(f"determinant routes disagree: {direct!r} vs {closed!r}")
    return direct


# ---------------------------------------------------------------------------
# large-u asymptotics
# ---------------------------------------------------------------------------

Poly2 = dict  # {(a, b): coeff} for lam**(2a) * eps**b


def _padd(x: Poly2, y: Poly2, s: float = 1.0) -> Poly2:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0.0) + s * v
    return out


def _pmul(x: Poly2, y: Poly2) -> Poly2:
    out: Poly2 = {}
    for (a1, b1), v1 in x.items():
        for (a2, b2), v2 in y.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0.0) + v1 * v2
    return out


def _peval(x: Poly2, lam: float, eps: float) -> float:
    return float(sum(v * lam ** (2 * a) * eps**b for (a, b), v in x.items()))


def _depends(x: Poly2, axis: int) -> bool:
    scale = max((abs(v) for v in x.values()), default=0.0)
    tol = 1e-13 * max(scale, 1e-300)
    return any(abs(v) > tol for k, v in x.items() if k[axis] > 0)


@dataclass(frozen=True)
class AsymptoticTable:
    """Z(u) ~ sum_j z_j u**j, j = p, p-1, ..., for |u| -> infinity."""

    p: int
    sign: int
    lam: float
    eps: float
    powers: tuple[int, ...]
    polys: tuple  # each z_j as polynomial in (lam**2, eps)
    coefficients: tuple[float, ...]
    lam_free: tuple[bool, ...]
    eps_free: tuple[bool, ...]

    def coefficient(self, j: int) -> float:
        return self.coefficients[self.powers.index(j)]

    def at(self, lam: float, eps: float) -> tuple[float, ...]:
        return tuple(_peval(x, lam, eps) for x in self.polys)

    def evaluate(self, u: float, lowest: int | None = None) -> float:
        return sum(c * u**j for j, c in zip(self.powers, self.coefficients)
                   if lowest is None or j >= lowest)

    def rows(self):
        for j, c, lf, ef in zip(self.powers, self.coefficients, self.lam_free, self.eps_free):
            yield j, c, lf, ef


def asymptotic_branch(pot: Potential, u: float) -> int:
    """Sign of the leading coefficient that keeps the ground state normalizable."""
    return -1 if (pot.p % 2 == 0 and u < 0) else 1


def large_u_series(pot: Potential, depth: int, eps: float, lam: float, sign: int = 1) -> AsymptoticTable:
    """Descending-power solution of the GB equation by coefficient matching.

    At power u**m the equation reads
        lam**2 (m+1) z_{m+1} - sum_{i+k=m} z_i z_k = lam**2 eps [m=0] - c_m,
    solved for z_j (m = p + j) from j = p downwards.  Each z_j is carried as a
    polynomial in (lam**2, eps) so the dependence flags are exact structure,
    not numerical sensitivity.
    """
    if pot.kind != POLYNOMIAL:
        raise NonPolynomial("asymptotic table needs a polynomial profile")
    p = pot.p
    if depth < 2 * p + 1:
        raise ValueError(f"depth must be at least 2p + 1 = {2 * p + 1}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    z: dict[int, Poly2] = {p: {(0, 0): sign * math.sqrt(pot.c(2 * p))}}
    two_zp = 2 * z[p][(0, 0)]
    for j in range(p - 1, p - depth, -1):
        m = p + j
        acc: Poly2 = {}
        if m + 1 <= p:
            acc = _padd(acc, {(a + 1, b): (m + 1) * v for (a, b), v in z[m + 1].items()})
        for i in range(j + 1, p):
            k = m - i
            if j < k < p:
                acc = _padd(acc, _pmul(z[i], z[k]), -1.0)
        if m == 0:
            acc = _padd(acc, {(1, 1): 1.0}, -1.0)
        if 0 <= m <= 2 * p:
            acc = _padd(acc, {(0, 0): pot.c(m)})
        z[j] = {k: v / two_zp for k, v in acc.items() if v != 0.0}
    powers = tuple(range(p, p - depth, -1))
    polys = tuple(z[j] for j in powers)
    return AsymptoticTable(
        p=p,
        sign=sign,
        lam=lam,
        eps=eps,
        powers=powers,
        polys=polys,
        coefficients=tuple(_peval(x, lam, eps) for x in polys),
        lam_free=tuple(not _depends(x, 0) for x in polys),
        eps_free=tuple(not _depends(x, 1) for x in polys),
    )
