"""Matched small/large-distance trial functions and their variational energies.

For the quartic oscillator V = x**2 + g**2 x**4 (hbar = 1, m = 1/2) the trial
function for the state with quantum numbers (n, p) is

    Psi = x**p P(x**2) (B**2 + g**2 x**2)**(-1/4) (B + R)**(-(2n + p + 1/2))
          * exp(-(A + (B**2 + 3) x**2/6 + g**2 x**4/3)/R + A/B),
    R = sqrt(B**2 + g**2 x**2).

The exponent is evaluated through the identity A/B - A/R = a x**2/(B R (B + R))
with a = A g**2, and the optimizer works in (a, log B).  This keeps g -> 0
regular: at g = 0 the exponent is -((B**2 + 3)/(6B) - a/(2 B**3)) x**2.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from .errors import (InconsistentConstraints, NonPositiveB, NoConvergence, QuadratureFailure,
                     SingularGram)
from .potential import POLYNOMIAL, Potential

TAIL = 1e-18
QUAD_TOL = 1e-13


@dataclass(frozen=True)
class Approximant:
    n: int
    p: int
    g: float
    A: float
    B: float
    poly: tuple[float, ...] = (1.0,)  # P(t) = sum poly[j] t**j, t = x**2
    a: float | None = None  # A g**2, authoritative when given (needed at g = 0)

    @property
    def k(self) -> int:
        return 2 * self.n + self.p

    @property
    def a_eff(self) -> float:
        return self.A * self.g**2 if self.a is None else self.a

    # -- log of the envelope exp(-Phi) and its derivative ------------------
    def phi(self, x):
        """Phi(x) with Psi = x**p P(x**2) exp(-Phi), shifted so Phi(0) = 0."""
        x = np.asarray(x, dtype=float)
        g2, B = self.g**2, self.B
        x2 = x * x
        R = np.sqrt(B * B + g2 * x2)
        kap = self.k + 0.5
        return (0.25 * np.log1p(g2 * x2 / (B * B))
                + kap * np.log((B + R) / (2 * B))
                - self.a_eff * x2 / (B * R * (B + R))
                + ((B * B + 3) * x2 / 6 + g2 * x2 * x2 / 3) / R)

    def dphi(self, x):
        x = np.asarray(x, dtype=float)
        g2, B, a = self.g**2, self.B, self.a_eff
        x2 = x * x
        R = np.sqrt(B * B + g2 * x2)
        Rp = g2 * x / R
        kap = self.k + 0.5
        N = (B * B + 3) * x2 / 6 + g2 * x2 * x2 / 3
        Np = (B * B + 3) * x / 3 + 4 * g2 * x2 * x / 3
        return (0.5 * g2 * x / (R * R)
                + kap * Rp / (B + R)
                - a * (2 * x / (B * R * (B + R)) - x2 * Rp * (B + 2 * R) / (B * R * R * (B + R) ** 2))
                + Np / R - N * Rp / (R * R))

    def prefactor(self, x):
        """x**p P(x**2) and its derivative."""
        x = np.asarray(x, dtype=float)
        t = x * x
        P = np.polynomial.polynomial.polyval(t, self.poly)
        dP = np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self.poly))
        f = x**self.p * P
        df = (self.p * x ** (self.p - 1) if self.p else 0.0) * P + x**self.p * 2 * x * dP
        return f, df

    def __call__(self, x):
        f, _ = self.prefactor(x)
        return f * np.exp(-self.phi(x))

    def full_value(self, x):
        """Psi with the constant factors B**(-1/2) (2B)**(-(k + 1/2)) restored."""
        return self(x) * self.B**-0.5 * (2 * self.B) ** -(self.k + 0.5)

    def derivative(self, x):
        f, df = self.prefactor(x)
        return (df - f * self.dphi(x)) * np.exp(-self.phi(x))

    def potential(self, x):
        x2 = np.asarray(x, dtype=float) ** 2
        return x2 + self.g**2 * x2 * x2


def build_approximant(n: int, p: int, g: float, A: float | None = None, B: float = 1.0,
                      poly=(1.0,), a: float | None = None) -> Approximant:
    """Trial function for state (n, p).  Give either A or a = A g**2."""
    if not B > 0:
        raise NonPositiveB(f"B must be positive, got {B}")
    if p not in (0, 1) or n < 0:
        raise ValueError("need n >= 0 and p in {0, 1}")
    if A is None and a is None:
        raise ValueError("give A or a")
    if A is None:
        g2 = float(g) ** 2
        A = a / g2 if g2 != 0 else math.copysign(math.inf, a) if a else 0.0
    return Approximant(n, p, float(g), float(A), float(B), tuple(float(c) for c in poly), a)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _log_weight(psi: Approximant, x):
    f, _ = psi.prefactor(x)
    with np.errstate(divide="ignore"):
        return 2 * (np.log(np.abs(f)) - psi.phi(x))


def integration_domain(psi: Approximant) -> tuple[float, float]:
    """Half-line cutoff L where Psi**2 has fallen below TAIL times its peak,
    and the position of the peak."""
    L = 4.0
    while True:
        xs = np.linspace(0.0, L, 4001)
        lw = _log_weight(psi, xs)
        i = int(np.nanargmax(lw))
        peak = lw[i]
        below = np.nonzero((lw < peak + math.log(TAIL)) & (xs > xs[i]))[0]
        if below.size:
            return float(xs[below[0]]), float(xs[i])
        L *= 2.0
        if L > 1e6:
            raise QuadratureFailure("trial function is not normalizable")


def _integrate(fun, L: float, peak: float, tol: float = QUAD_TOL) -> tuple[float, float]:
    pts = [peak] if 0 < peak < L else None
    val, err = quad(fun, 0.0, L, epsabs=0.0, epsrel=tol, limit=400, points=pts)
    return val, err


@dataclass
class VariationalResult:
    E_var: float
    A: float
    B: float
    a: float
    quad_error: float
    psi: Approximant
    trace: list = field(default_factory=list)  # (a, B, E) per evaluation
    converged: bool = True
    n_evals: int = 0
    elapsed: float = 0.0


def _scaled(psi: Approximant, L: float, peak: float):
    """Integrands with the envelope normalized by its peak to avoid overflow."""
    shift = float(_log_weight(psi, np.array([peak]))[0]) / 2 if peak > 0 else 0.0

    def psi_s(x):
        f, _ = psi.prefactor(x)
        return f * np.exp(-psi.phi(x) - shift)

    def dpsi_s(x):
        f, df = psi.prefactor(x)
        return (df - f * psi.dphi(x)) * np.exp(-psi.phi(x) - shift)

    return psi_s, dpsi_s


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _gauss_nodes(L: float, panels: int):
    edges = np.linspace(0.0, L, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return x, w


def _energy_fixed(psi: Approximant, L: float, peak: float, panels: int = 24) -> tuple[float, float]:
    x, w = _gauss_nodes(L, panels)
    psi_s, dpsi_s = _scaled(psi, L, peak)
    f, d = psi_s(x), dpsi_s(x)
    return float(w @ (d * d + psi.potential(x) * f * f)), float(w @ (f * f))


def energy_fast(psi: Approximant, panels: int = 24) -> float:
    """<H> with a fixed composite Gauss-Legendre rule (used inside optimizers)."""
    L, peak = integration_domain(psi)
    num, den = _energy_fixed(psi, L, peak, panels)
    return num / den


def variational_energy(psi: Approximant, tol: float = QUAD_TOL,
                       method: str = "adaptive") -> VariationalResult:
    """<H> = int (Psi'**2 + V Psi**2) / int Psi**2 over the half line (even integrands).

    ``method="adaptive"`` uses scipy's QUADPACK with its error estimate;
    ``"gauss"`` uses the fixed rule and estimates the error by panel doubling.
    """
    L, peak = integration_domain(psi)
    if method == "gauss":
        n1, d1 = _energy_fixed(psi, L, peak, 24)
        n2, d2 = _energy_fixed(psi, L, peak, 48)
        E = n2 / d2
        return VariationalResult(E, psi.A, psi.B, psi.a_eff, abs(E - n1 / d1), psi)
    psi_s, dpsi_s = _scaled(psi, L, peak)
    num, e1 = _integrate(lambda x: float(dpsi_s(x) ** 2 + psi.potential(x) * psi_s(x) ** 2), L, peak, tol)
    den, e2 = _integrate(lambda x: float(psi_s(x) ** 2), L, peak, tol)
    if not (den > 0 and math.isfinite(num)):
        raise QuadratureFailure("non-finite energy integrals")
    E = num / den
    err = abs(E) * (e1 / abs(num) + e2 / den)
    return VariationalResult(E, psi.A, psi.B, psi.a_eff, err, psi)


# ---------------------------------------------------------------------------
# orthogonalization and optimization
# ---------------------------------------------------------------------------

def _overlap_grid(states: list[Approximant], target: Approximant, panels: int = 48):
    L = max(integration_domain(s)[0] for s in states + [target])
    return _gauss_nodes(L, panels)


def orthogonalize(states: list[Approximant], target: Approximant) -> tuple[float, ...]:
    """Coefficients of P (leading coefficient 1) making ``target`` orthogonal
    to every lower state of the same parity.  Opposite parity is orthogonal
    by symmetry and skipped."""
    same = [s for s in states if s.p == target.p]
    n = target.n
    if n == 0:
        return (1.0,)
    if len(same) < n:
        raise SingularGram(f"need {n} lower states of parity {target.p}, got {len(same)}")
    same = sorted(same, key=lambda s: s.n)[:n]
    x, w = _overlap_grid(same, target)
    base = replace(target, poly=(1.0,))
    env_t = base(x)  # x**p exp(-Phi)
    t = x * x
    M = np.empty((n, n + 1))
    for i, s in enumerate(same):
        ps = s(x)
        ps = ps / np.max(np.abs(ps))
        for j in range(n + 1):
            M[i, j] = w @ (ps * env_t * t**j)
    M /= np.max(np.abs(M), axis=1, keepdims=True)
    try:
        c = np.linalg.solve(M[:, :n], -M[:, n])
    except np.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
    if np.linalg.cond(M[:, :n]) > 1e13:
        raise SingularGram("Gram system is numerically singular")
    return tuple(float(v) for v in c) + (1.0,)


def poly_roots_positive(poly) -> bool:
    """True if P(t) has only real positive roots (the nodes of the state in x**2)."""
    roots = np.polynomial.polynomial.polyroots(poly)
    return bool(np.all(np.abs(roots.imag) < 1e-9 * (1 + np.abs(roots.real))) and np.all(roots.real > 0))


def initial_a(B: float, g: float, k: int) -> float:
    """a making the x**2 term of the exponent equal 1/2 (harmonic small-x limit)."""
    return 2 * B**3 * ((B * B + 3) / (6 * B) + (1.5 + k) * g * g / (4 * B * B) - 0.5)


def optimize_params(n: int, p: int, g: float, lower: list[Approximant] | None = None,
                    starts: int = 5, tol: float = 1e-12, max_evals: int = 4000) -> VariationalResult:
    """Minimize <H> over (a, log B) with Nelder-Mead from ``starts`` initial B
    spread geometrically over [0.5, 5 (1 + g)**(2/3)].

    For n >= 1, ``lower`` must hold the optimized states (l, p) with l < n;
    P is re-orthogonalized to them at every evaluation.  When not given they
    are optimized recursively.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    t0 = time.perf_counter()
    if n > 0 and lower is None:
        lower = []
        for l in range(n):
            lower.append(optimize_params(l, p, g, lower=list(lower), starts=starts, tol=tol).psi)
    lower = lower or []
    k = 2 * n + p
    trace: list[tuple[float, float, float]] = []

    def make(v):
        return build_approximant(n, p, g, B=math.exp(v[1]), a=v[0])

    def energy(v):
        psi = make(v)
        if n > 0:
            psi = replace(psi, poly=orthogonalize(lower, psi))
        try:
            E = energy_fast(psi)
        except QuadratureFailure:
            E = math.inf
        trace.append((float(v[0]), math.exp(v[1]), E))
        return E

    best = None
    converged = True
    for B in np.geomspace(0.5, 5 * (1 + g) ** (2 / 3), starts):
        res = minimize(energy, [initial_a(B, g, k), math.log(B)], method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=tol, maxfev=max_evals))
        converged &= bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    psi = make(best.x)
    if n > 0:
        psi = replace(psi, poly=orthogonalize(lower, psi))
    result = variational_energy(psi)
    result.trace = trace
    result.converged = converged
    result.n_evals = len(trace)
    result.elapsed = time.perf_counter() - t0
    if not math.isfinite(result.E_var):
        raise NoConvergence("optimizer found no finite energy")
    return result


# ---------------------------------------------------------------------------
# generic polynomial profiles
# ---------------------------------------------------------------------------
#
# Psi = P(x) * prefactor(x) * exp(-(A + N(x))/sqrt(D(x)) + A/sqrt(D(0)))
# N = sum_{k=2}^{2p} alpha_k x**k,  D = sum_{k=0}^{2p-2} beta_k x**k,
# with the gauge beta_{2p-2} = c_{2p} g**(2p-2).  Everything is in the frame
# hbar = 1, m = 1/2 with g replaced by lam; energies are rescaled on output.

def _canonical(pot: Potential) -> tuple[Potential, float]:
    """(profile with hbar = 1, m = 1/2, g = lam; factor turning its energies
    into energies of ``pot``)."""
    half = pot.to_half_mass()
    factor = pot.hbar / (2 * pot.mass)
    return half.with_params(g=pot.lam, hbar=1.0), factor


def _inv_sqrt_series(d: np.ndarray, n: int) -> np.ndarray:
    """Coefficients of (1 + sum_{i>=1} d_i w**i)**(-1/2) in w."""
    s = np.zeros(n)
    s[0] = 1.0
    # f = (1 + delta)**(-1/2) satisfies 2 (1 + delta) f' = -delta' f
    for k in range(1, n):
        acc = 0.0
        for i in range(1, min(k, len(d) - 1) + 1):
            acc -= d[i] * s[k - i] * (2 * (k - i) + i) / 2.0
        s[k] = acc / k
    return s


@dataclass(frozen=True)
class ConstraintSet:
    p: int
    g: float
    even: bool
    targets: dict  # power of x -> exact growing phase coefficient
    solved: tuple[int, ...]  # alpha indices fixed by the constraints
    free: tuple[str, ...]  # remaining parameter names
    free_count: int  # rank of the phase Jacobian with respect to ``free``

    @property
    def n_constraints(self) -> int:
        return len(self.targets)


def _phase_targets(pot: Potential) -> dict:
    """Growing phase coefficients T_m of x**m (m = 1..p+1) for x > 0.

    phi = int y dx with y = Z(g x)/g at hbar = 1, so z_j u**j integrates to
    z_j g**(j-1) x**(j+1)/(j+1).  Only the lam-free, eps-free z_p..z_0 enter.
    """
    from .generalized_bloch import large_u_series

    p, g = pot.p, pot.g
    table = large_u_series(pot, 2 * p + 1, eps=1.0, lam=1.0, sign=1)
    out = {}
    for j in range(p, -1, -1):
        idx = table.powers.index(j)
        assert table.lam_free[idx] and table.eps_free[idx]
        out[j + 1] = table.coefficient(j) * g ** (j - 1) / (j + 1)
    return out


def _param_names(p: int, even: bool) -> tuple[list[int], list[int]]:
    alphas = [k for k in range(2, 2 * p + 1) if not (even and k % 2)]
    betas = [k for k in range(0, 2 * p - 2) if not (even and k % 2)]
    return alphas, betas


def _solve_alpha(pot: Potential, targets: dict, beta: dict, alpha: dict, even: bool) -> dict:
    """Fix the top alpha_k so the growing coefficients of N/sqrt(D) hit the targets."""
    p, g = pot.p, pot.g
    top = pot.c(2 * p) * g ** (2 * p - 2)
    d = np.array([1.0] + [beta.get(2 * p - 2 - i, 0.0) / top for i in range(1, 2 * p - 1)])
    s = _inv_sqrt_series(d, p + 1)
    alpha = dict(alpha)
    for j in range(p + 1):
        m = p + 1 - j
        k = 2 * p - j
        known = sum(alpha.get(2 * p - i, 0.0) * s[j - i] for i in range(j))
        want = targets.get(m, 0.0) * math.sqrt(top)
        if k < 2 or (even and k % 2):
            if abs(want - known) > 1e-12 * max(1.0, abs(want)):
                raise InconsistentConstraints(f"no parameter can reproduce the x**{m} phase term")
            continue
        alpha[k] = want - known
    return alpha


@dataclass(frozen=True)
class MatchedApproximant:
    pot: Potential  # canonical frame
    k: int
    A: float
    alpha: dict
    beta: dict
    poly: tuple[float, ...] = (1.0,)  # P(x) in powers of x
    _pref: object = None  # spline of the one-loop log prefactor in x

    def N(self, x):
        return sum(c * x**k for k, c in self.alpha.items())

    def dN(self, x):
        return sum(k * c * x ** (k - 1) for k, c in self.alpha.items())

    def D(self, x):
        return sum(c * x**k for k, c in self.beta.items())

    def dD(self, x):
        return sum(k * c * x ** (k - 1) for k, c in self.beta.items() if k)

    def phase(self, x):
        x = np.asarray(x, dtype=float)
        D0 = self.beta[0]
        return (self.A + self.N(x)) / np.sqrt(self.D(x)) - self.A / math.sqrt(D0)

    def dphase(self, x):
        x = np.asarray(x, dtype=float)
        D = self.D(x)
        return self.dN(x) / np.sqrt(D) - 0.5 * (self.A + self.N(x)) * self.dD(x) / D**1.5

    def log_prefactor(self, x):
        if self._pref is None:
            return np.zeros_like(np.asarray(x, dtype=float)), np.zeros_like(np.asarray(x, dtype=float))
        spline = self._pref
        return spline(x), spline(x, 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lp, _ = self.log_prefactor(x)
        return np.polynomial.polynomial.polyval(x, self.poly) * np.exp(lp - self.phase(x))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        lp, dlp = self.log_prefactor(x)
        P = np.polynomial.polynomial.polyval(x, self.poly)
        dP = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(self.poly))
        return (dP + P * (dlp - self.dphase(x))) * np.exp(lp - self.phase(x))


def _one_loop_prefactor(pot: Potential, k: int, x_max: float, nodes: int = 400):
    """Spline of log prefactor = -int_0^{g x} Z_2 du - (k/2) log(1 + g**2 x**2).

    Z_2 is taken with eps0 = sqrt(c_2), where its origin pole cancels.
    """
    from scipy.interpolate import CubicHermiteSpline

    from .generalized_bloch import z2

    g = pot.g
    eps0 = math.sqrt(pot.c(2))
    x = np.linspace(0.0, x_max, nodes)
    u = g * x
    gx, gw = np.polynomial.legendre.leggauss(12)
    h = np.diff(u)
    mid = 0.5 * (u[1:] + u[:-1])
    pts = mid[:, None] + 0.5 * h[:, None] * gx[None, :]
    inc = (0.5 * h[:, None] * gw[None, :] * z2(pot, pts, eps0)).sum(axis=1)
    I = np.concatenate([[0.0], np.cumsum(inc)])
    val = -I - 0.5 * k * np.log1p(u * u)
    der = -g * z2(pot, u, eps0) - k * g * u / (1 + u * u)
    return CubicHermiteSpline(x, val, der)


def match_constraints(pot: Potential) -> ConstraintSet:
    """Impose the exact growing large-|x| phase terms on the generic ansatz.

    Constraints whose target and every contributing parameter vanish by
    parity are not counted.  The number of genuinely free parameters is the
    rank of the phase Jacobian over the unconstrained set.
    """
    if pot.kind != POLYNOMIAL:
        raise ValueError("constraint matching needs a polynomial profile")
    cpot, _ = _canonical(pot)
    p, g = cpot.p, cpot.g
    if g <= 0:
        raise ValueError("constraint matching needs g > 0")
    even = cpot.is_even
    targets = {m: t for m, t in _phase_targets(cpot).items() if not (even and (p + 1 - m) % 2)}
    alphas, betas = _param_names(p, even)
    solved = tuple(sorted((2 * p - j for j in range(p + 1)
                           if 2 * p - j >= 2 and not (even and j % 2)), reverse=True))
    free = ["A"] + [f"alpha_{k}" for k in alphas if k not in solved] + [f"beta_{k}" for k in betas]
    # numerical rank at a generic point
    x = np.linspace(0.3, 3.0, 40) / max(g, 1e-3)
    base = _generic_params(cpot, {})

    def phase_of(vec):
        params = dict(zip(free, vec))
        return _build_matched(cpot, 0, params).phase(x)

    v0 = np.array([base[name] for name in free])
    J = np.empty((len(x), len(free)))
    for i in range(len(free)):
        h = 1e-6 * max(1.0, abs(v0[i]))
        vp, vm = v0.copy(), v0.copy()
        vp[i] += h
        vm[i] -= h
        J[:, i] = (phase_of(vp) - phase_of(vm)) / (2 * h)
    rank = int(np.linalg.matrix_rank(J, tol=1e-8 * max(1.0, np.abs(J).max())))
    return ConstraintSet(p, g, even, targets, solved, tuple(free), rank)


def _generic_params(cpot: Potential, given: dict) -> dict:
    """Default parameter values: D from the profile itself, A = 0."""
    p, g = cpot.p, cpot.g
    even = cpot.is_even
    alphas, betas = _param_names(p, even)
    out = {"A": 0.0}
    for k in alphas:
        out[f"alpha_{k}"] = 0.0
    for k in betas:
        out[f"beta_{k}"] = cpot.c(k + 2) * g**k
    out.update(given)
    return out


def _build_matched(cpot: Potential, k: int, params: dict, poly=(1.0,), pref=None) -> MatchedApproximant:
    p, g = cpot.p, cpot.g
    even = cpot.is_even
    alphas, betas = _param_names(p, even)
    full = _generic_params(cpot, params)
    beta = {b: full[f"beta_{b}"] for b in betas}
    beta[2 * p - 2] = cpot.c(2 * p) * g ** (2 * p - 2)
    if beta.get(0, 0.0) <= 0:
        raise NonPositiveB("D(0) must be positive")
    alpha = {a: full[f"alpha_{a}"] for a in alphas}
    targets = _phase_targets(cpot)
    alpha = _solve_alpha(cpot, targets, beta, alpha, even)
    return MatchedApproximant(cpot, k, float(full["A"]), alpha, beta, tuple(poly), pref)


def build_matched_approximant(pot: Potential, k: int = 0, params: dict | None = None,
                              poly=None, prefactor: str = "one-loop") -> MatchedApproximant:
    """Generic matched trial function for state k of a polynomial profile.

    ``prefactor="one-loop"`` uses exp(-int Z_2) times (1 + g**2 x**2)**(-k/2)
    (for p >= 2 and c_2 > 0); ``"none"`` drops it.  ``poly`` defaults to x**k.
    """
    cpot, _ = _canonical(pot)
    if cpot.g <= 0:
        raise ValueError("generic approximant needs g > 0")
    poly = tuple(poly) if poly is not None else (0.0,) * k + (1.0,)
    psi = _build_matched(cpot, k, params or {}, poly)
    if prefactor == "one-loop" and cpot.p >= 2 and cpot.c(2) > 0:
        L = _matched_domain(psi)[0]
        psi = replace(psi, _pref=_one_loop_prefactor(cpot, k, 1.5 * L))
    elif prefactor not in ("one-loop", "none"):
        raise ValueError("prefactor must be 'one-loop' or 'none'")
    return psi


def _matched_domain(psi) -> tuple[float, float]:
    L = 2.0
    while True:
        xs = np.linspace(-L, L, 8001)
        with np.errstate(divide="ignore"):
            lw = 2 * (np.log(np.abs(np.polynomial.polynomial.polyval(xs, psi.poly))) - psi.phase(xs))
        i = int(np.nanargmax(lw))
        if lw[0] < lw[i] - 60 and lw[-1] < lw[i] - 60:
            return L, float(xs[i])
        L *= 2
        if L > 1e6:
            raise QuadratureFailure("trial function is not normalizable")


def matched_energy(pot: Potential, psi: MatchedApproximant, tol: float = 1e-11) -> VariationalResult:
    """<H> for a generic matched trial function on the whole line, in the
    units of ``pot``."""
    cpot, factor = _canonical(pot)
    L, peak = _matched_domain(psi)
    xs = np.linspace(-L, L, 8001)
    with np.errstate(divide="ignore"):
        lw = 2 * (np.log(np.abs(psi(xs))))
    shift = float(np.nanmax(lw)) / 2
    keep = xs[lw > np.nanmax(lw) + 2 * math.log(TAIL)]
    lo, hi = float(keep.min()), float(keep.max())

    def w(x):
        return psi(x) * math.exp(-shift), psi.derivative(x) * math.exp(-shift)

    def num_f(x):
        f, d = w(x)
        return float(d * d + cpot.physical(x) * f * f)

    num, e1 = quad(num_f, lo, hi, epsabs=0.0, epsrel=tol, limit=400)
    den, e2 = quad(lambda x: float(w(x)[0] ** 2), lo, hi, epsabs=0.0, epsrel=tol, limit=400)
    E = num / den
    err = abs(E) * (e1 / abs(num) + e2 / den)
    return VariationalResult(factor * E, psi.A, math.sqrt(psi.beta[0]), psi.A * cpot.g**2,
                             factor * err, psi)
