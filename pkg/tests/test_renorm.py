"""Commuting pairs, renormalization, and scaling diagnostics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hermanlab as hl
from hermanlab.cfrac import BRONZE_ALT, GOLDEN, SILVER, gauss
from hermanlab.renorm import (closest_return_displacements, commuting_pair,
                              renormalize, scaling_ratios, self_similarity,
                              translation_pair)


@pytest.mark.parametrize("cf,a1", [(GOLDEN, 1), (SILVER, 2), (BRONZE_ALT, 1)],
                         ids=["golden", "silver", "bronze-alt"])
def test_translation_pair_height_is_first_quotient(cf, a1):
    T = translation_pair(cf)
    assert T.height() == a1


@pytest.mark.parametrize("cf", [GOLDEN, SILVER], ids=["golden", "silver"])
def test_translation_pair_renormalizes_to_gauss_shift(cf):
    T = translation_pair(cf)
    R = renormalize(T)
    gth = gauss(cf).value_float()
    assert complex(R.f_minus(0j)).real == pytest.approx(gth, abs=1e-12)
    assert complex(R.f_plus(0j)).real == pytest.approx(-1.0, abs=1e-12)
    # two steps stay on the model family
    R2 = renormalize(R)
    assert complex(R2.f_minus(0j)).real == pytest.approx(
        gauss(gauss(cf)).value_float(), abs=1e-10)


def test_commuting_pair_endpoints_are_closest_returns(golden32):
    _, m = golden32
    lift = hl.log_lift(m, "golden")
    for n in (3, 5, 8):
        p = commuting_pair(m, "golden", n, lift=lift)
        # f_-(0) = c_{q_n} and f_+(0) = c_{q_{n-1}}, on opposite sides of 0
        assert p.endpoint_minus == p.f_minus(0j)
        assert p.endpoint_plus == p.f_plus(0j)
        assert p.endpoint_minus.real * p.endpoint_plus.real < 0
        assert abs(p.endpoint_minus) < abs(p.endpoint_plus)


def test_chi_golden_all_one(golden32):
    _, m = golden32
    lift = hl.log_lift(m, "golden")
    for n in range(2, 11):
        assert commuting_pair(m, "golden", n, lift=lift).height() == 1


def test_commutation_residual_small(golden32):
    _, m = golden32
    lift = hl.log_lift(m, "golden")
    for n in range(2, 13):
        p = commuting_pair(m, "golden", n, lift=lift)
        assert p.commutation_residual() < 1e-9 * abs(p.endpoint_minus)


def test_renormalize_map_backed_pair_matches_next_level(golden32):
    _, m = golden32
    lift = hl.log_lift(m, "golden")
    p4 = commuting_pair(m, "golden", 4, lift=lift)
    r = renormalize(p4)
    assert r.level == 5
    assert r.normalized
    assert complex(r.f_plus(0j)) == pytest.approx(-1.0, abs=1e-9)
    # rotation number shifts by the Gauss map: golden is a fixed point
    assert r.theta.quotients(4) == [1, 1, 1, 1]


def test_rescaling_normalizes_endpoint(blaschke3_silver):
    _, m = blaschke3_silver
    lift = hl.log_lift(m, "silver")
    p = commuting_pair(m, "silver", 5, lift=lift)
    r = renormalize(p)
    assert complex(r.f_plus(0j)) == pytest.approx(-1.0, abs=1e-9)


def test_product_identity_and_telescoping(golden32):
    _, m = golden32
    rep = scaling_ratios(m, "golden", 18, period=2)
    for n in sorted(rep.ratios):
        if n in rep.s and n + 1 in rep.s:
            lhs = rep.ratios[n]
            rhs = rep.s[n] * rep.s[n + 1]
            assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_closest_returns_match_trace(golden32, trace32_deep):
    _, m = golden32
    cq = closest_return_displacements(m, "golden", 14)
    tcq = trace32_deep.closest_returns(upto=14)
    for n in range(1, 15):
        assert cq[n] == pytest.approx(tcq[n], rel=1e-9)


def test_self_similarity_factor(golden32):
    _, m = golden32
    rep = self_similarity(m, "golden", period=2, N=18)
    assert abs(rep.mu) == pytest.approx(0.662, abs=0.01)
    assert abs(rep.mu.imag) < 0.01


def test_self_similarity_rejects_odd_period(golden32):
    _, m = golden32
    with pytest.raises(ValueError):
        self_similarity(m, "golden", period=3)


def test_convergence_report_degenerate_on_identical_maps(golden32):
    _, m = golden32
    slope, r2, pairs = hl.convergence_report(m, m, "golden", 12)
    assert slope == float("-inf")
    assert pairs == []


def test_scaling_ratios_chart_invariance(blaschke22_golden, arnold_golden):
    """s_n limits are chart-independent: the circle map and its lift agree."""
    _, m = blaschke22_golden
    lift = hl.circle_lift(m)
    rp = scaling_ratios(m, "golden", 12)          # plane chart at z=1
    rl = scaling_ratios(lift, "golden", 12, )     # real lift chart
    # |s_n| sequences converge to the same scaling constants
    for n in (9, 10, 11):
        assert abs(rp.s[n]) == pytest.approx(abs(complex(rl.s[n])), rel=0.2)


@given(st.integers(min_value=2, max_value=60))
@settings(max_examples=30, deadline=None)
def test_translation_heights_follow_cf(a):
    # T_theta with theta = [0; a, a, ...] has chi = a at every level
    cf = hl.ContinuedFraction.from_periodic([], [a])
    T = translation_pair(cf)
    assert T.height(max_steps=a + 5) == a
    R = renormalize(T)
    assert complex(R.f_minus(0j)).real == pytest.approx(cf.value_float(), abs=1e-9)
