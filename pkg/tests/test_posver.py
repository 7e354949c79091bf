import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from repeatergates import posver
from repeatergates.posver import Geometry2D, GeometryError, three_verifier_verdict, two_verifier_verdict

positive = st.fractions(F(1, 20), F(20), max_denominator=40)


def test_honest_time_straight_line():
    g = Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0))
    assert posver.honest_time(g) == 1


def test_geometry_validation():
    with pytest.raises(GeometryError):
        Geometry2D(((0, 0), (0, 0)), (1, 0))
    with pytest.raises(GeometryError):
        Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0), attacker_nodes=((F(11, 20), 0),), delta=F(1, 10))
    with pytest.raises(GeometryError):
        posver.as_number(float("nan"))


def test_decimal_inputs_are_exact():
    assert posver.as_number(0.1) == F(1, 10)
    assert posver.as_number("3/7") == F(3, 7)


def test_midpoint_three_repeaters():
    v = two_verifier_verdict(Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0)), max_attacker_repeaters=3)
    assert v.secure and v.attacker_best_time == F(7, 6) and v.margin == F(1, 6)


def test_exclusion_radius_gap():
    g = Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0), attacker_nodes=((F(2, 5), 0), (F(3, 5), 0)), delta=F(1, 10))
    v = two_verifier_verdict(g, max_attacker_repeaters=None)
    assert v.secure and v.attacker_best_time == F(6, 5)


def test_unbounded_approximate_attacker():
    g = Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0))
    v = two_verifier_verdict(g, max_attacker_repeaters=None, exact_mode=False)
    assert not v.secure and v.status == "insecure-in-the-limit"


@settings(max_examples=40, deadline=None)
@given(positive, st.fractions(F(1, 10), F(9, 10), max_denominator=50))
def test_two_verifier_scale_invariance(k, x):
    g = Geometry2D(((0, 0), (1, 0)), (x, 0))
    a, b = two_verifier_verdict(g), two_verifier_verdict(g.scaled(k))
    assert b.secure == a.secure
    assert b.attacker_best_time == k * a.attacker_best_time
    assert b.honest_time == k * a.honest_time


@settings(max_examples=40, deadline=None)
@given(st.fractions(F(0), F(1, 5), max_denominator=100), st.fractions(F(0), F(1, 5), max_denominator=100))
def test_gap_grows_with_exclusion_radius(d1, d2):
    lo, hi = sorted((d1, d2))
    def attacker(delta):
        nodes = ((F(1, 2) - delta, 0), (F(1, 2) + delta, 0)) if delta else ()
        g = Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0), attacker_nodes=nodes, delta=delta)
        return two_verifier_verdict(g, max_attacker_repeaters=None).attacker_best_time
    if lo > 0:
        assert attacker(lo) <= attacker(hi)


def test_equilateral_centre():
    tri = ((0, 0), (1, 0), (F(1, 2), math.sqrt(3) / 2))
    v = three_verifier_verdict(Geometry2D(tri, (F(1, 2), math.sqrt(3) / 6)))
    assert v.secure and v.margin > 0
    assert float(v.honest_time) == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    assert v.details["equilateral_check"]


@settings(max_examples=30, deadline=None)
@given(positive)
def test_three_verifier_scale_invariance(k):
    tri = ((0, 0), (2, 0), (F(1, 2), F(3, 2)))
    g = Geometry2D(tri, (F(4, 5), F(1, 2)))
    a, b = three_verifier_verdict(g), three_verifier_verdict(g.scaled(k))
    assert a.secure == b.secure
    assert b.margin == pytest.approx(a.margin, abs=1e-12)
    assert float(b.honest_time) == pytest.approx(float(k) * float(a.honest_time), rel=1e-12)


def _apex_geometry(y):
    # the angle V1-P-V2 is 2*atan(1/y); V3 sits far away so it never binds
    return Geometry2D(((-1, 0), (1, 0), (0, 1000)), (0, y))


def test_angle_threshold_located_by_root_finding():
    margin = lambda y: three_verifier_verdict(_apex_geometry(y)).margin
    y_star = brentq(margin, 0.5, 3.0, xtol=1e-14)
    angle = 2 * math.atan(1 / y_star)
    assert angle == pytest.approx(posver.ANGLE_THRESHOLD, abs=1e-10)
    assert abs(posver.ANGLE_THRESHOLD - 2 * math.asin(2 / 3)) < 1e-10
    assert three_verifier_verdict(_apex_geometry(y_star * (1 - 1e-6))).secure
    assert not three_verifier_verdict(_apex_geometry(y_star * (1 + 1e-6))).secure


def test_prover_outside_triangle_rejected():
    with pytest.raises(GeometryError):
        three_verifier_verdict(Geometry2D(((0, 0), (1, 0), (0, 1)), (2, 2)))


def test_permutation_timing_contrast():
    classical, unitary = posver.permutation_contrast(1)
    assert classical == 1 and unitary == F(3, 2)
    assert posver.classical_permutation_time(0) == 2
