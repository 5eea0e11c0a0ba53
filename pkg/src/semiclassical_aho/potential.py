"""Anharmonic-oscillator potentials V(x) = V̂(g x) / g**2 and their frames.

The profile V̂(u) is either a finite polynomial ``sum_k c_k u**k`` (k = 2..2p)
or the sine-Gordon profile ``sin(u)**2``.  Three coordinates are used
throughout the package:

* physical ``x``,
* quantum ``v = x / sqrt(hbar)``,
* classical ``u = g x = lam v`` with the effective coupling
  ``lam = sqrt(hbar) * g``.

Mass conventions: ``"half"`` (m = 1/2, H = -hbar**2 d2/dx2 + V) is used by the
Riccati-type equations and the eigensolvers; ``"unit"`` (m = 1) is the natural
one for Euclidean paths.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from .errors import (
    DegenerateMinima,
    EmptyCoefficients,
    NegativeProfile,
    NonConfining,
    PotentialError,
)

Number = Union[int, float, Fraction, str]

POLYNOMIAL = "polynomial"
SINE_GORDON = "sine_gordon"
MASSES = {"half": 0.5, "unit": 1.0}


def to_fraction(value: Number) -> Fraction:
    """Exact rational from an int, Fraction, ``"num/den"`` string or float.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(repr(float(value)))


def sine_gordon_coefficient(k: int) -> Fraction:
    """Taylor coefficient of u**k in sin(u)**2 = (1 - cos 2u) / 2."""
    if k < 2 or k % 2:
        return Fraction(0)
    j = k // 2
    return Fraction((-1) ** (j + 1) * 2 ** (k - 1), math.factorial(k))


@dataclass(frozen=True)
class Potential:
    kind: str
    exact: tuple[Fraction, ...]  # exact c_0..c_{2p}; empty for sine-Gordon
    g: float = 1.0
    hbar: float = 1.0
    mass_convention: str = "half"
    coeffs: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.exact))

    # -- derived parameters -------------------------------------------------
    @property
    def lam(self) -> float:
        """Effective coupling sqrt(hbar) * g."""
        return math.sqrt(self.hbar) * self.g

    @property
    def mass(self) -> float:
        return MASSES[self.mass_convention]

    @property
    def degree(self) -> int | None:
        return len(self.exact) - 1 if self.kind == POLYNOMIAL else None

    @property
    def p(self) -> int | None:
        return self.degree // 2 if self.kind == POLYNOMIAL else None

    @property
    def is_even(self) -> bool:
        if self.kind == SINE_GORDON:
            return True
        return all(c == 0 for c in self.exact[1::2])

    @property
    def lowest_power(self) -> int:
        if self.kind == SINE_GORDON:
            return 2
        return next(k for k, c in enumerate(self.exact) if c != 0)

    @property
    def is_normalized(self) -> bool:
        return self.c_exact(2) == 1

    def c_exact(self, k: int) -> Fraction:
        """Exact coefficient of u**k in V̂ (zero beyond the degree)."""
        if self.kind == SINE_GORDON:
            return sine_gordon_coefficient(k)
        if 0 <= k < len(self.exact):
            return self.exact[k]
        return Fraction(0)

    def c(self, k: int) -> float:
        return float(self.c_exact(k))

    def ratio_coeffs(self) -> np.ndarray:
        """Coefficients of Q(u) = V̂(u) / u**2 (polynomial kind)."""
        return np.asarray(self.coeffs[2:], dtype=float)

    # -- evaluation ---------------------------------------------------------
    def eval(self, u, order: int = 0):
        """V̂ or one of its first three derivatives at ``u``."""
        if order not in (0, 1, 2, 3):
            raise ValueError("derivative order must be 0..3")
        u = np.asarray(u, dtype=float)
        if self.kind == SINE_GORDON:
            s2 = np.sin(2 * u)
            out = [np.sin(u) ** 2, s2, 2 * np.cos(2 * u), -4 * s2][order]
        else:
            c = np.asarray(self.coeffs, dtype=float)
            if order:
                c = npoly.polyder(c, order)
            out = npoly.polyval(u, c)
        return out if out.ndim else float(out)

    def ratio(self, u, order: int = 0):
        """Q(u) = V̂(u)/u**2 (order 0) or Q'(u) (order 1), regular at u = 0."""
        u = np.asarray(u, dtype=float)
        if self.kind == SINE_GORDON:
            s = np.sinc(u / np.pi)
            if order == 0:
                out = s**2
            else:
                safe = np.where(u == 0, 1.0, u)
                ds = np.where(u == 0, 0.0, (np.cos(u) - s) / safe)
                out = 2 * s * ds
        else:
            c = self.ratio_coeffs()
            if order:
                c = npoly.polyder(c, order)
            out = npoly.polyval(u, c)
        return out if out.ndim else float(out)

    def physical(self, x):
        """V(x) = V̂(g x)/g**2, well defined at g = 0."""
        x = np.asarray(x, dtype=float)
        if self.kind == SINE_GORDON:
            out = x**2 if self.g == 0 else np.sin(self.g * x) ** 2 / self.g**2
        else:
            c = [ck * self.g ** (k - 2) if k >= 2 else 0.0 for k, ck in enumerate(self.coeffs)]
            out = npoly.polyval(x, c)
        return out if out.ndim else float(out)

    def physical_coeffs(self) -> list[float]:
        """Coefficients of V(x) = sum_k c_k g**(k-2) x**k."""
        if self.kind != POLYNOMIAL:
            raise PotentialError("only polynomial profiles have finite coefficients")
        return [ck * self.g ** (k - 2) if k >= 2 else 0.0 for k, ck in enumerate(self.coeffs)]

    # -- frames -------------------------------------------------------------
    def convert(self, value, src: "Frame", dst: "Frame"):
        return convert(self, value, src, dst)

    # -- derived potentials -------------------------------------------------
    def with_params(self, **changes) -> "Potential":
        fields = dict(kind=self.kind, exact=self.exact, g=self.g, hbar=self.hbar,
                      mass_convention=self.mass_convention)
        fields.update(changes)
        return Potential(**fields)

    def to_half_mass(self) -> "Potential":
        """Equivalent profile in the m = 1/2 convention.

        H = -hbar**2/(2m) d2 + V equals (1/2m) * (-hbar**2 d2 + 2m V), so the
        profile is scaled by 2m and energies by 2m as well.
        """
        if self.mass_convention == "half":
            return self
        if self.kind != POLYNOMIAL:
            raise PotentialError("mass conversion requires a polynomial profile")
        scale = to_fraction(2 * self.mass)
        return self.with_params(exact=tuple(c * scale for c in self.exact), mass_convention="half")

    # -- serialization ------------------------------------------------------
    def to_dict(self, exact: bool = False) -> dict:
        out = {"kind": self.kind, "g": self.g, "hbar": self.hbar, "mass": self.mass_convention}
        if self.kind == POLYNOMIAL:
            out["coeffs"] = {
                str(k): (f"{c.numerator}/{c.denominator}" if exact else float(c))
                for k, c in enumerate(self.exact) if c != 0
            }
        return out

    def to_json(self, exact: bool = False) -> str:
        return json.dumps(self.to_dict(exact), sort_keys=True)


class Frame(enum.Enum):
    PHYSICAL = "physical-x"
    QUANTUM = "quantum-v"
    CLASSICAL = "classical-u"


def convert(pot: Potential, value, src: Frame, dst: Frame):
    """Move a coordinate between frames: x = sqrt(hbar) v, u = g x = lam v."""
    value = np.asarray(value, dtype=float)
    if src == dst:
        return value
    # scale of each frame relative to x
    to_x = {Frame.PHYSICAL: 1.0, Frame.QUANTUM: math.sqrt(pot.hbar)}
    if Frame.CLASSICAL in (src, dst):
        if pot.g == 0:
            raise PotentialError("classical frame undefined at g = 0")
        to_x[Frame.CLASSICAL] = 1.0 / pot.g
    return value * to_x[src] / to_x[dst]


def make_potential(
    kind: str = POLYNOMIAL,
    coeffs: Sequence[Number] | Mapping[int, Number] | None = None,
    g: float = 1.0,
    hbar: float = 1.0,
    mass_convention: str = "half",
) -> Potential:
    """Validated potential.

    ``coeffs`` is either a mapping ``{degree: c}`` or a list starting at the
    quadratic coefficient, ``[c_2, c_3, ...]``.
    """
    kind = kind.replace("-", "_").lower()
    if kind not in (POLYNOMIAL, SINE_GORDON):
        raise PotentialError(f"unknown potential kind {kind!r}")
    if mass_convention not in MASSES:
        raise PotentialError(f"unknown mass convention {mass_convention!r}")
    if not (g >= 0) or not math.isfinite(g):
        raise PotentialError("coupling g must be finite and >= 0")
    if not (hbar > 0) or not math.isfinite(hbar):
        raise PotentialError("hbar must be positive")
    if kind == SINE_GORDON:
        return Potential(SINE_GORDON, (), float(g), float(hbar), mass_convention)

    if not coeffs:
        raise EmptyCoefficients("polynomial potential needs coefficients")
    if isinstance(coeffs, Mapping):
        table = {int(k): to_fraction(v) for k, v in coeffs.items()}
    else:
        table = {k + 2: to_fraction(v) for k, v in enumerate(coeffs)}
    if any(k < 0 for k in table):
        raise PotentialError("negative powers are not allowed")
    if any(table.get(k, 0) != 0 for k in (0, 1)):
        raise PotentialError("constant and linear terms must vanish (minimum at u = 0)")
    table = {k: c for k, c in table.items() if c != 0}
    if not table:
        raise EmptyCoefficients("all coefficients vanish")
    top = max(table)
    if top % 2 or table[top] <= 0:
        raise NonConfining(f"leading term c_{top} u^{top} does not confine")
    low = min(table)
    if low % 2 or table[low] <= 0:
        raise NegativeProfile(f"lowest term c_{low} u^{low} is negative on one side of u = 0")
    exact = tuple(table.get(k, Fraction(0)) for k in range(top + 1))
    pot = Potential(POLYNOMIAL, exact, float(g), float(hbar), mass_convention)
    _check_single_minimum(pot)
    return pot


def _check_single_minimum(pot: Potential) -> None:
    """Reject profiles that dip below zero or touch zero away from the origin.

    Works on R(u) = V̂(u)/u**m with m the lowest power, which is positive at
    u = 0; a second zero of V̂ is a zero of R.  Local minima of R found by dense
    sampling are polished with a bounded scalar minimizer.
    """
    m = pot.lowest_power
    c = np.asarray(pot.coeffs[m:], dtype=float)
    if len(c) == 1:
        return
    # every real critical point of R lies within the Cauchy bound of R'
    dc = npoly.polyder(c)
    bound = 1.0 + np.max(np.abs(dc[:-1])) / abs(dc[-1]) if len(dc) > 1 else 1.0
    grid = np.linspace(-bound, bound, 20001)
    vals = npoly.polyval(grid, c)
    scale = np.max(np.abs(c))
    idx = np.where((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    for i in idx:
        res = minimize_scalar(lambda t: npoly.polyval(t, c), bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": 1e-14})
        rmin = min(float(res.fun), float(vals[i]))
        if rmin < -1e-12 * scale:
            raise NegativeProfile(f"profile is negative near u = {res.x:.6g}")
        if rmin <= 1e-12 * scale:
            raise DegenerateMinima(f"second global minimum near u = {res.x:.6g}")


def quartic_aho(g: float = 1.0, hbar: float = 1.0) -> Potential:
    """V̂ = u**2 + u**4, the standard quartic anharmonic oscillator."""
    return make_potential(POLYNOMIAL, {2: 1, 4: 1}, g=g, hbar=hbar)


def potential_from_dict(data: Mapping) -> Potential:
    coeffs = data.get("coeffs")
    if isinstance(coeffs, Mapping):
        coeffs = {int(k): v for k, v in coeffs.items()}
    return make_potential(
        kind=data.get("kind", POLYNOMIAL),
        coeffs=coeffs,
        g=float(data.get("g", 1.0)),
        hbar=float(data.get("hbar", 1.0)),
        mass_convention=data.get("mass", "half"),
    )


def potential_from_json(text: str) -> Potential:
    return potential_from_dict(json.loads(text))


def load_potential(path) -> Potential:
    with open(path) as fh:
        return potential_from_json(fh.read())
