import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import quartic_z0_z2_taylor
from semiclassical_aho import generalized_bloch as gb
from semiclassical_aho.errors import (CutoffRequired, MissingEps, NonPolynomial, NotNormalized,
                                      OriginSingularity)
from semiclassical_aho.potential import POLYNOMIAL, make_potential, quartic_aho
from semiclassical_aho.riccati_bloch import rb_ground_series


def test_origin_taylor_matches_closed_forms():
    z0, z2 = quartic_z0_z2_taylor(8)
    s = gb.gb_origin_series(quartic_aho(), 2, depth=8)
    assert list(s.Z[0][:8]) == z0
    assert list(s.Z[2][:6]) == z2[:6]
    assert all(c == 0 for c in s.Z[1])


@pytest.mark.parametrize("coeffs", [
    {2: 1, 4: 1},
    {2: 1, 3: Fraction(1, 2), 4: 1},
    {2: 1, 4: Fraction(-1, 3), 6: 1},
])
def test_origin_energies_equal_rb(coeffs):
    pot = make_potential(POLYNOMIAL, coeffs)
    assert gb.gb_origin_series(pot, 8).eps[:7] == rb_ground_series(pot, 6).eps


def test_band_identity():
    """Coefficient of v**j in Y_n equals the u**j Taylor coefficient of Z_{n+1-j}."""
    pot = make_potential(POLYNOMIAL, {2: 1, 3: Fraction(2, 5), 4: 1})
    rb = rb_ground_series(pot, 6)
    org = gb.gb_origin_series(pot, 7, depth=10)
    for n in range(7):
        for j, c in enumerate(rb.Y[n]):
            if 0 <= n + 1 - j <= 7:
                assert c == org.coefficient(n + 1 - j, j), (n, j)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.15, 3.0), st.fractions(min_value=-1, max_value=1, max_denominator=7))
def test_residuals_vanish(u, c3):
    pot = make_potential(POLYNOMIAL, {2: 1, 3: c3 / 2, 4: 1})
    eps = [float(e) for e in rb_ground_series(pot, 4).eps]
    s = gb.gb_series(pot, eps, 6)
    r = s.residuals(u)
    assert np.max(np.abs(r)) < 1e-9 * max(1.0, float(pot.eval(u)))


def test_value_at_origin_and_errors():
    pot = quartic_aho()
    s = gb.gb_series(pot, [1.0, 0.0, 0.75], 4)
    assert s.terms(0.0)[0] == 0.0
    with pytest.raises(OriginSingularity):
        s.jets(0.0)
    bad = gb.gb_series(pot, [1.2], 2)
    with pytest.raises(OriginSingularity):
        bad.terms(0.0)
    with pytest.raises(MissingEps):
        gb.gb_series(pot, [1.0], 4)
    with pytest.raises(ValueError):
        gb.gb_series(pot, [1.0], -1)
    with pytest.raises(NotNormalized):
        gb.gb_origin_series(make_potential(POLYNOMIAL, {4: 1}), 2)


def test_z2_sine_gordon_branches():
    sg = make_potential("sine-gordon")
    u = np.linspace(0.1, 2.5, 9)
    np.testing.assert_allclose(gb.z2(sg, u), 0.5 / np.tan(u) - 0.5 / np.sin(u), atol=1e-14)
    np.testing.assert_allclose(gb.z2(sg, u, 0.8), 0.5 / np.tan(u) - 0.4 / np.sin(u), atol=1e-14)


def test_z2_near_origin_is_smooth():
    pot = quartic_aho()
    assert gb.z2(pot, 1e-9) == pytest.approx(0.75e-9, rel=1e-6)


@pytest.mark.parametrize("pot", [quartic_aho(), make_potential("sine-gordon"),
                                 make_potential(POLYNOMIAL, {2: 1, 3: Fraction(1, 2), 6: 1})])
def test_determinant_routes(pot):
    for u in (0.3, 1.0, 1.4):
        d, c = gb.det_log_routes(pot, 1.0, u)
        assert d == pytest.approx(c, abs=1e-11)


def test_determinant_needs_cutoff():
    q4 = make_potential(POLYNOMIAL, {4: 1})
    with pytest.raises(CutoffRequired):
        gb.det_log(q4, 1.0604, 2.0)
    d, c = gb.det_log_routes(q4, 1.0604, 2.0, u_min=0.5)
    assert d == pytest.approx(c, abs=1e-11)
    with pytest.raises(ValueError):
        gb.det_log(quartic_aho(), 1.0, 0.0)


def test_pure_power_closed_forms():
    q6 = make_potential(POLYNOMIAL, {6: 1})
    u = np.linspace(0.3, 2.0, 7)
    s = gb.gb_series(q6, [1.1], 2)
    np.testing.assert_allclose(s.z(0, u), u**3, rtol=1e-14)
    np.testing.assert_allclose(s.z(2, u), 1.5 / u - 0.55 / u**3, rtol=1e-12)


@pytest.mark.parametrize("coeffs", [{2: 1, 4: 1}, {2: 1, 3: Fraction(1, 3), 4: 1},
                                    {2: 1, 4: Fraction(1, 2), 5: Fraction(1, 5), 6: 1},
                                    {2: 1, 8: 2}])
def test_asymptotic_structure(coeffs):
    pot = make_potential(POLYNOMIAL, coeffs)
    p = pot.p
    t = gb.large_u_series(pot, 2 * p + 3, eps=1.3, lam=0.6)
    assert all(t.lam_free[: p + 1]) and not all(t.lam_free)
    assert all(t.eps_free[: 2 * p]) and not t.eps_free[2 * p]
    assert t.coefficient(p) == pytest.approx(math.sqrt(float(pot.c(2 * p))))


def test_asymptotic_quartic_values():
    t = gb.large_u_series(quartic_aho(), 5, eps=1.0, lam=0.5)
    # u sqrt(1 + u**2) = u**2 + 1/2 - u**-2/8 + ...; lam enters from u**-1 on
    assert t.coefficient(2) == 1.0 and t.coefficient(1) == 0.0 and t.coefficient(0) == 0.5
    assert t.coefficient(-1) == pytest.approx(0.25)
    assert t.at(0.0, 1.0)[4] == pytest.approx(-0.125)


def test_asymptotic_evaluation_tracks_z():
    pot = quartic_aho()
    lam, eps = 0.3, 1.0 + 0.75 * 0.09
    t = gb.large_u_series(pot, 9, eps=eps, lam=lam)
    s = gb.gb_series(pot, [1.0, 0.0, 0.75], 4)
    u = 30.0
    assert t.evaluate(u) == pytest.approx(s.value(u, lam), rel=1e-6)


def test_asymptotic_errors():
    with pytest.raises(NonPolynomial):
        gb.large_u_series(make_potential("sine-gordon"), 5, 1.0, 0.1)
    with pytest.raises(ValueError):
        gb.large_u_series(quartic_aho(), 2, 1.0, 0.1)
    with pytest.raises(ValueError):
        gb.large_u_series(quartic_aho(), 6, 1.0, 0.1, sign=0)
    assert gb.asymptotic_branch(quartic_aho(), -2.0) == -1
    assert gb.asymptotic_branch(make_potential(POLYNOMIAL, {2: 1, 3: 1, 6: 1}), -2.0) == 1


@pytest.mark.parametrize("p, a2", [(2, 1), (3, 4), (4, Fraction(9, 4))])
def test_pure_power_asymptotics(p, a2):
    """a**2 u**(2p): only u**p, u**-1 and u**(-p-2) survive down to u**(-p-2)."""
    pot = make_potential(POLYNOMIAL, {2 * p: a2})
    a, lam = math.sqrt(float(a2)), 0.7
    t = gb.large_u_series(pot, 2 * p + 3, eps=1.3, lam=lam)
    want = {p: a, -1: lam**2 * p / 2, -p - 2: -(lam**4) * p * (p + 2) / (8 * a)}
    for j in range(p, -p - 3, -1):
        if j == -p:
            continue  # energy enters here
        assert t.coefficient(j) == pytest.approx(want.get(j, 0.0), abs=1e-14), j
