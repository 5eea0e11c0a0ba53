import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiclassical_aho.errors import (DegenerateMinima, EmptyCoefficients, NegativeProfile,
                                      NonConfining, PotentialError)
from semiclassical_aho.potential import (POLYNOMIAL, SINE_GORDON, Frame, convert, make_potential,
                                         potential_from_dict, potential_from_json, quartic_aho)


def test_quartic_basics():
    pot = quartic_aho(0.5, 4.0)
    assert pot.degree == 4 and pot.p == 2 and pot.is_even and pot.is_normalized
    assert pot.lam == pytest.approx(1.0)
    assert pot.c_exact(4) == 1 and pot.c_exact(7) == 0


def test_list_and_mapping_inputs_agree():
    a = make_potential(POLYNOMIAL, [1, Fraction(1, 3), 2])
    b = make_potential(POLYNOMIAL, {2: 1, 3: "1/3", 4: 2})
    assert a.exact == b.exact


@pytest.mark.parametrize("coeffs, err", [
    ({}, EmptyCoefficients),
    ({2: 0}, EmptyCoefficients),
    ({2: 1, 3: 1}, NonConfining),
    ({2: 1, 4: -1}, NonConfining),
    ({2: -1, 4: 1}, NegativeProfile),
    ({3: 1, 4: 1}, NegativeProfile),
    ({2: 1, 4: -4, 6: 4}, DegenerateMinima),  # u^2 (1 - 2u^2)^2
    ({2: 1, 4: -5, 6: 4}, NegativeProfile),
    ({0: 1, 2: 1}, PotentialError),
])
def test_validation(coeffs, err):
    with pytest.raises(err):
        make_potential(POLYNOMIAL, coeffs)


def test_pure_power_is_allowed():
    pot = make_potential(POLYNOMIAL, {4: 1})
    assert pot.lowest_power == 4 and not pot.is_normalized


def test_sine_gordon_coefficients():
    sg = make_potential("sine-gordon")
    assert sg.kind == SINE_GORDON
    u = 0.3
    series = sum(float(sg.c_exact(k)) * u**k for k in range(40))
    assert series == pytest.approx(math.sin(u) ** 2, abs=1e-16)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_finite_differences(order):
    pot = make_potential(POLYNOMIAL, {2: 1, 3: Fraction(1, 2), 6: 1})
    u, h = 0.7, 1e-4
    fd = (float(pot.eval(u + h, order - 1)) - float(pot.eval(u - h, order - 1))) / (2 * h)
    assert float(pot.eval(u, order)) == pytest.approx(fd, rel=1e-7)


def test_physical_and_frames():
    pot = quartic_aho(0.3, 2.0)
    x = 1.7
    assert pot.physical(x) == pytest.approx(x**2 + 0.09 * x**4)
    v = convert(pot, x, Frame.PHYSICAL, Frame.QUANTUM)
    assert convert(pot, v, Frame.QUANTUM, Frame.CLASSICAL) == pytest.approx(0.3 * x)
    assert convert(pot, convert(pot, x, Frame.PHYSICAL, Frame.CLASSICAL), Frame.CLASSICAL, Frame.PHYSICAL) == pytest.approx(x)


def test_to_half_mass_scales_profile():
    pot = make_potential(POLYNOMIAL, {2: Fraction(1, 2), 4: 1}, mass_convention="unit")
    half = pot.to_half_mass()
    assert half.mass_convention == "half"
    assert half.exact[2] == 1 and half.exact[4] == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=20), min_size=1, max_size=4),
       st.floats(0.01, 5), st.floats(0.1, 4), st.booleans())
def test_json_round_trip(middle, g, hbar, exact):
    coeffs = {2: Fraction(1)}
    for k, c in enumerate(middle, start=3):
        coeffs[k] = c
    top = len(middle) + 3
    coeffs[top + (top % 2)] = Fraction(50)
    try:
        pot = make_potential(POLYNOMIAL, coeffs, g=g, hbar=hbar)
    except PotentialError:
        return
    back = potential_from_json(pot.to_json(exact=exact))
    if exact:
        assert back.exact == pot.exact
    else:
        np.testing.assert_allclose(back.coeffs, pot.coeffs, rtol=1e-15)
    assert back.g == pot.g and back.hbar == pot.hbar


def test_dict_format():
    d = json.loads(quartic_aho().to_json(exact=True))
    assert d["coeffs"] == {"2": "1/1", "4": "1/1"}
    assert potential_from_dict({"coeffs": {"2": 1.0, "4": 1.0}}).exact == quartic_aho().exact
