"""Rotation numbers, circle lifts, and parameter tuning."""

import math
from fractions import Fraction

import pytest

import hermanlab as hl
from hermanlab.cfrac import GOLDEN, SILVER
from hermanlab.rotation import (CircleLift, rotation_number, sign_rho_vs_theta,
                                tune_arnold, tune_blaschke, verify_herman)


def rigid(theta):
    return CircleLift(lambda x: x + theta)


def test_rotation_number_of_rigid_rotation():
    th = GOLDEN.value_float()
    lo, hi = rotation_number(rigid(th), depth=30)
    assert float(lo) <= th <= float(hi)
    assert float(hi) - float(lo) < 1e-6


def test_rotation_number_detects_rational():
    lo, hi = rotation_number(rigid(0.25), depth=30)
    assert lo == hi == Fraction(1, 4)


def test_sign_rho_vs_theta():
    th = GOLDEN.value_float()
    assert sign_rho_vs_theta(rigid(th + 1e-6), GOLDEN) == 1
    assert sign_rho_vs_theta(rigid(th - 1e-6), GOLDEN) == -1
    # undecidable at depth for the exact value
    assert sign_rho_vs_theta(rigid(th), GOLDEN) == 0


def test_circle_lift_is_degree_one_monotone(blaschke22_golden):
    _, m = blaschke22_golden
    F = hl.circle_lift(m)
    assert F.check()


def test_tuned_blaschke_rotation_number(blaschke22_golden):
    res, m = blaschke22_golden
    F = hl.circle_lift(m)
    th = GOLDEN.value_float()
    lo, hi = rotation_number(F, depth=25)
    assert abs(0.5 * (float(lo) + float(hi)) - th) < 1e-4


def test_tune_arnold_bracket(arnold_golden):
    res, F = arnold_golden
    assert res.residual < 1e-8
    lo, hi = rotation_number(F, depth=25)
    assert abs(0.5 * (float(lo) + float(hi)) - GOLDEN.value_float()) < 1e-4


def test_tune_asymmetric_rejects_bad_ladder():
    with pytest.raises(Exception):
        # a hopeless seed far from any root must not silently "converge"
        hl.tune_asymmetric(3, 2, "golden", 10.0 + 10.0j, m=16)


def test_verify_herman_tuned_map(golden32):
    _, m = golden32
    rep = verify_herman(m, "golden", 12)
    assert rep["all"]


def test_verify_herman_rejects_untuned_map():
    m = hl.herman_family(3, 2, -1.0 - 1.0j)  # arbitrary untuned parameter
    rep = verify_herman(m, "golden", 10)
    assert not rep["all"]


def test_preset_seed_roundtrip():
    seed = hl.rotation.resolve_seed(3, 2, GOLDEN, "preset")
    assert abs(seed - complex(-1.144208, -0.964454)) < 1e-3
    with pytest.raises(KeyError):
        hl.rotation.resolve_seed(9, 9, GOLDEN, "preset")
