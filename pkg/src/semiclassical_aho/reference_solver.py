"""High-accuracy eigenvalues of H = -hbar**2/(2m) d2/dx2 + V̂(g x)/g**2.

Two independent methods:

* ``eigensolve_spectral`` diagonalizes H in scaled Hermite functions with
  matrix elements of x**k built from the ladder algebra, doubling the basis
  until the requested levels stop moving;
* ``eigensolve_shooting`` integrates the modified Prüfer angle inward from
  both classically forbidden ends and matches at the origin.  The angle
  mismatch is monotone in E and its winding counts nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp
from scipy.linalg import eigh
from scipy.optimize import brentq, minimize_scalar

from .errors import BracketFailure, NoConvergence, NonPolynomial
from .potential import POLYNOMIAL, Potential


def _physical_coeffs(pot: Potential, g: float) -> np.ndarray:
    if pot.kind != POLYNOMIAL:
        raise NonPolynomial("reference solvers need a polynomial profile")
    return np.array([ck * g ** (k - 2) if k >= 2 else 0.0 for k, ck in enumerate(pot.coeffs)])


# ---------------------------------------------------------------------------
# spectral method
# ---------------------------------------------------------------------------

def _position_matrix(n: int) -> np.ndarray:
    """X = (a + a^dagger)/sqrt(2) in the first n Hermite functions."""
    off = np.sqrt(np.arange(1, n) / 2.0)
    return np.diag(off, 1) + np.diag(off, -1)


def _momentum_sq(n: int) -> np.ndarray:
    """P**2 = -d2/dX2 in the first n Hermite functions."""
    k = np.arange(n)
    off = -0.5 * np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0))
    return np.diag(k + 0.5) + np.diag(off, 2) + np.diag(off, -2)


def hamiltonian_matrix(coeffs: np.ndarray, kinetic: float, scale: float, n: int) -> np.ndarray:
    """H = kinetic * (-d2/dx2) + sum_k coeffs[k] x**k with x = scale * X.

    Powers of X are formed in a basis enlarged by the polynomial degree and
    then truncated, so every retained matrix element is exact.
    """
    deg = len(coeffs) - 1
    big = n + deg
    X = _position_matrix(big) * scale
    H = kinetic / scale**2 * _momentum_sq(big)
    Xk = np.eye(big)
    for k in range(1, deg + 1):
        Xk = Xk @ X
        if coeffs[k] != 0.0:
            H = H + coeffs[k] * Xk
    H = H[:n, :n]
    return 0.5 * (H + H.T)


def optimal_scale(coeffs: np.ndarray, kinetic: float, levels: int, n: int = 24) -> float:
    """Hermite length scale minimizing the sum of the lowest levels in a
    small basis (a coarse variational choice)."""

    def cost(log_s):
        H = hamiltonian_matrix(coeffs, kinetic, math.exp(log_s), n)
        return float(np.sum(eigh(H, eigvals_only=True, subset_by_index=[0, levels - 1])))

    # harmonic length as centre of the search
    c2 = coeffs[2] if len(coeffs) > 2 and coeffs[2] > 0 else 1.0
    centre = 0.25 * math.log(kinetic / c2)
    res = minimize_scalar(cost, bounds=(centre - 6.0, centre + 2.0), method="bounded",
                          options={"xatol": 1e-3})
    return math.exp(res.x)


@dataclass
class SpectrumResult:
    energies: np.ndarray
    basis_size: int
    history: list = field(default_factory=list)  # (basis size, energies)
    method: str = "spectral-basis"
    scale: float = 1.0
    vectors: np.ndarray | None = None
    drift: float = 0.0

    def wavefunction(self, k: int, x):
        """Normalized eigenfunction k at x (spectral results only).

        Sign fixed so psi_k > 0 just right of its largest node.
        """
        if self.vectors is None:
            raise ValueError("no eigenvectors stored")
        x = np.asarray(x, dtype=float)
        X = x / self.scale
        c = self.vectors[:, k]
        # Hermite functions by the stable three-term recurrence
        h_prev = np.zeros_like(X)
        h = np.pi**-0.25 * np.exp(-X**2 / 2)
        acc = c[0] * h
        for n in range(1, len(c)):
            h_next = math.sqrt(2.0 / n) * X * h - math.sqrt((n - 1) / n) * h_prev
            h_prev, h = h, h_next
            acc = acc + c[n] * h
        return acc / math.sqrt(self.scale)


def eigensolve_spectral(pot: Potential, g: float | None = None, hbar: float | None = None,
                        k_max: int = 0, basis_size: int | None = None, tol: float = 1e-12,
                        max_size: int = 1024, keep_vectors: bool = False) -> SpectrumResult:
    """Lowest k_max + 1 eigenvalues, basis doubled until the relative drift
    of every requested level is below ``tol``."""
    g = pot.g if g is None else g
    hbar = pot.hbar if hbar is None else hbar
    coeffs = _physical_coeffs(pot, g)
    kinetic = hbar**2 / (2.0 * pot.mass)
    levels = k_max + 1
    n = basis_size or max(4 * levels, 32)
    if n < 4 * levels:
        raise ValueError("basis_size must be at least 4 * (k_max + 1)")
    scale = optimal_scale(coeffs, kinetic, levels)
    history = []
    prev = None
    while True:
        H = hamiltonian_matrix(coeffs, kinetic, scale, n)
        if keep_vectors:
            vals, vecs = eigh(H, subset_by_index=[0, levels - 1])
        else:
            vals, vecs = eigh(H, eigvals_only=True, subset_by_index=[0, levels - 1]), None
        history.append((n, vals.copy()))
        if prev is not None:
            drift = float(np.max(np.abs(vals - prev) / np.abs(vals)))
            if drift < tol:
                return SpectrumResult(vals, n, history, "spectral-basis", scale, vecs, drift)
        prev = vals
        n *= 2
        if n > max_size:
            raise NoConvergence(f"spectral basis exceeded {max_size} functions")


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShootingResult:
    energy: float
    nodes: int
    bracket: tuple[float, float]
    domain: tuple[float, float]


class _Shooter:
    """Prüfer-angle integration for -K psi'' + V psi = E psi.

    psi = r sin(theta), psi' = s r cos(theta) with a fixed scale s gives
    theta' = s cos**2 - (q/s) sin**2, q = (V - E)/K.
    """

    def __init__(self, coeffs: np.ndarray, kinetic: float):
        self.c = coeffs
        self.K = kinetic
        self.dc = npoly.polyder(coeffs)

    def V(self, x):
        return npoly.polyval(x, self.c)

    def edge(self, E: float, direction: int, margin: float = 45.0) -> float:
        """Point deep in the forbidden region where the WKB exponent measured
        from the turning point reaches ``margin``."""
        x, step = 0.0, 0.05
        while self.V(x) <= E:
            x += direction * step
            step *= 1.2
        acc = 0.0
        h = 1e-3 * max(1.0, abs(x))
        while acc < margin:
            q = (self.V(x) - E) / self.K
            acc += math.sqrt(max(q, 0.0)) * h
            x += direction * h
            h *= 1.02
        return x

    def theta(self, E: float, x_start: float, x_end: float, s: float, left: bool) -> float:
        q0 = (self.V(x_start) - E) / self.K
        kappa = math.sqrt(q0)
        th0 = math.atan2(s, kappa) if left else math.pi - math.atan2(s, kappa)

        def rhs(x, y):
            q = (self.V(x) - E) / self.K
            sn, cs = math.sin(y[0]), math.cos(y[0])
            return [s * cs * cs - q / s * sn * sn]

        sol = solve_ivp(rhs, (x_start, x_end), [th0], method="DOP853", rtol=1e-13, atol=1e-13)
        if not sol.success:
            raise BracketFailure(sol.message)
        return float(sol.y[0, -1])

    def mismatch(self, E: float, k: int, domain, x_m: float = 0.0) -> float:
        s = math.sqrt(max(E - self.V(x_m), 1.0) / self.K)
        th_l = self.theta(E, domain[0], x_m, s, left=True)
        th_r = self.theta(E, domain[1], x_m, s, left=False)
        return th_l - th_r - k * math.pi

    def nodes(self, E: float, domain) -> int:
        """Node count from the two arms matched at an off-centre point.

        On the left arm the angle crosses multiples of pi only upwards; on
        the right arm (integrated leftwards) only downwards.  The asymmetric
        point keeps symmetric nodes off the matching point.
        """
        x_c = 0.3183 * domain[1]
        s = math.sqrt(max(E - self.V(x_c), 1.0) / self.K)
        th_l = self.theta(E, domain[0], x_c, s, left=True)
        th_r = self.theta(E, domain[1], x_c, s, left=False)
        right = 0
        while th_r < -right * math.pi:
            right += 1
        return math.floor(th_l / math.pi) + right


def shoot_level(pot: Potential, k: int, g: float | None = None, hbar: float | None = None,
                tol: float = 1e-12) -> ShootingResult:
    """Eigenvalue k by bisection-safe root finding on the Prüfer mismatch."""
    if tol < 1e-12:
        raise ValueError("tol below 1e-12 is not supported in double precision")
    g = pot.g if g is None else g
    hbar = pot.hbar if hbar is None else hbar
    sh = _Shooter(_physical_coeffs(pot, g), hbar**2 / (2.0 * pot.mass))
    e_lo = 0.0
    # harmonic-like first guess for the upper end, doubled until it brackets
    c2 = sh.c[2] if len(sh.c) > 2 else 0.0
    e_hi = max((2 * k + 1) * math.sqrt(max(c2, 1e-3) * sh.K), 1e-2) * 1.5
    for _ in range(80):
        domain = (sh.edge(e_hi, -1), sh.edge(e_hi, 1))
        if sh.mismatch(e_hi, k, domain) > 0:
            break
        e_lo = e_hi
        e_hi *= 2.0
    else:
        raise BracketFailure(f"could not bracket level {k}")
    if sh.mismatch(e_lo, k, domain) >= 0:
        raise BracketFailure(f"lower end does not bracket level {k}")
    f = lambda E: sh.mismatch(E, k, domain)
    E = brentq(f, e_lo, e_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    nodes = sh.nodes(E, domain)
    if nodes != k:
        raise BracketFailure(f"node count {nodes} does not certify level {k}")
    return ShootingResult(E, nodes, (e_lo, e_hi), domain)


def eigensolve_shooting(pot: Potential, g: float | None = None, hbar: float | None = None,
                        k: int = 0, tol: float = 1e-12) -> float:
    return shoot_level(pot, k, g, hbar, tol).energy
