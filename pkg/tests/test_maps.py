"""Rational-family oracles: explicit formulas, symmetry, critical structure."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermanlab.maps import (INF, arnold_lift, blaschke, critical_points,
                            herman_family, preimages)

B_FIG = complex(-1.144208, -0.964454)
C_FIG = complex(-0.755700, -0.654917)


def test_32_matches_explicit_formula():
    # F_{3,2,b}(z) = b z^3 (4 - z) / (1 - 4z + 6z^2)
    m = herman_family(3, 2, B_FIG)
    rng = np.random.default_rng(1)
    for z in rng.standard_normal(20) + 1j * rng.standard_normal(20):
        expect = B_FIG * z ** 3 * (4 - z) / (1 - 4 * z + 6 * z ** 2)
        assert m.eval(z) == pytest.approx(expect, rel=1e-12)


def test_22_matches_explicit_formula():
    # F_{2,2,c}(z) = c z^2 (z - 3) / (1 - 3z)
    m = herman_family(2, 2, C_FIG)
    rng = np.random.default_rng(2)
    for z in rng.standard_normal(20) + 1j * rng.standard_normal(20):
        expect = C_FIG * z ** 2 * (z - 3) / (1 - 3 * z)
        assert m.eval(z) == pytest.approx(expect, rel=1e-12)


def test_value_at_one_is_parameter():
    for d0, dinf in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)]:
        m = herman_family(d0, dinf, B_FIG)
        assert m.eval(1.0) == pytest.approx(B_FIG, rel=1e-12)


def test_local_degrees_at_zero_and_infinity():
    for d0, dinf in [(2, 2), (3, 2), (2, 3)]:
        m = herman_family(d0, dinf, B_FIG)
        # vanishing order at 0 equals d0
        for k in range(d0):
            assert abs(m.deriv(0.0, order=k)) < 1e-12
        assert abs(m.deriv(0.0, order=d0)) > 1e-12
        # pole order at infinity equals dinf: f(z) ~ z^dinf for large z
        z = 1e6
        ratio = abs(m.eval(2 * z)) / abs(m.eval(z))
        assert ratio == pytest.approx(2 ** dinf, rel=1e-3)


def test_critical_point_at_one_has_multiplicity_m_minus_1():
    # local degree at z=1 is m = d0 + dinf - 1, i.e. f' vanishes to order m-1
    for d0, dinf in [(2, 2), (3, 2), (2, 3)]:
        mdeg = d0 + dinf - 1
        mp = herman_family(d0, dinf, B_FIG)
        for k in range(1, mdeg):
            assert abs(mp.deriv(1.0, order=k)) < 1e-9
        assert abs(mp.deriv(1.0, order=mdeg)) > 1e-9


def test_critical_points_budget_and_locations():
    m = herman_family(3, 2, B_FIG)
    cps = critical_points(m)
    assert sum(mult for _, mult in cps) == 2 * m.total_degree - 2
    pts = {round(p.real, 6) + 1j * round(p.imag, 6): mult
           for p, mult in cps if p is not INF}
    # z = 1 with multiplicity m-1 = 3; z = 0 with multiplicity d0-1 = 2
    assert pts.get(1.0 + 0j) == 3
    assert pts.get(0j) == 2


def test_inversion_symmetry_23_is_conjugate_32():
    # F_{2,3,1/b}(1/z) = 1 / F_{3,2,b}(z)
    m32 = herman_family(3, 2, B_FIG)
    m23 = herman_family(2, 3, 1 / B_FIG)
    rng = np.random.default_rng(3)
    for z in rng.standard_normal(20) + 1j * rng.standard_normal(20):
        assert m23.eval(1 / z) == pytest.approx(1 / m32.eval(z), rel=1e-10)


def test_blaschke_preserves_circle():
    m = blaschke(2, 0.6136486381292343)
    for t in np.linspace(0, 1, 37, endpoint=False):
        z = cmath.exp(2j * math.pi * t)
        assert abs(abs(m.eval(z)) - 1.0) < 1e-12


def test_infinity_chart_agrees_with_plane_chart():
    m = herman_family(3, 2, B_FIG)
    for z in [1e9, 1e9 + 1e9j, -5e8j]:
        direct = B_FIG * z ** 3 * (4 - z) / (1 - 4 * z + 6 * z ** 2)
        assert m.eval(z) == pytest.approx(direct, rel=1e-6)


def test_preimages_full_fiber():
    m = herman_family(3, 2, B_FIG)
    w = 0.3 + 0.2j
    pre = preimages(m, w)
    assert len(pre) + pre.missing == m.total_degree
    for r in pre:
        assert abs(m.eval(r) - w) < 1e-8 * (1 + abs(w))


def test_arnold_lift_critical_point():
    F = arnold_lift(0.61)
    assert F.deriv(0.5) == pytest.approx(0.0, abs=1e-15)
    # degree-one lift periodicity
    assert F(1.3) - F(0.3) == pytest.approx(1.0, abs=1e-12)
    # second-order (cubic-type) criticality: F' has a double zero at 1/2
    assert F.deriv(0.5 + 1e-4) == pytest.approx(0.0, abs=1e-6)


@given(st.integers(min_value=2, max_value=5), st.integers(min_value=2, max_value=5),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=3.0, allow_nan=False,
                          allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_family_defining_properties(d0, dinf, c):
    m = herman_family(d0, dinf, c)
    assert m.eval(1.0) == pytest.approx(c, rel=1e-9)
    # numerator valuation d0 at 0, denominator degree d0-1
    assert all(abs(x) < 1e-14 for x in m.num[:d0])
    assert len(m.den) == d0
