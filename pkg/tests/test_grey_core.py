import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greymap.grey_core import (
    GGN,
    IGN,
    GGNVector,
    GreyDomain,
    ggn_add,
    ggn_div,
    ggn_eq,
    ggn_from_intervals,
    ggn_inv,
    ggn_mul,
    ggn_pow,
    ggn_scalar_mul,
    ggn_sub,
    ign_add,
    ign_mul,
    metric_d,
    metric_d2,
)

reals = st.floats(-10, 10, allow_nan=False)
greys = st.floats(0, 5, allow_nan=False)
ggns = st.builds(GGN, reals, greys)


# --- construction ----------------------------------------------------------

def test_ggn_rejects_negative_or_nonfinite():
    with pytest.raises(ValueError):
        GGN(0.1, -0.01)
    with pytest.raises(ValueError):
        GGN(float("nan"), 0.0)
    with pytest.raises(ValueError):
        GGN(0.0, float("inf"))


def test_ign_and_domain_invariants():
    with pytest.raises(ValueError):
        IGN(1.0, 0.0)
    with pytest.raises(ValueError):
        GreyDomain(1.0, 1.0)
    assert GreyDomain(-1, 1).measure == 2.0


def test_single_interval_from_injected_weight():
    g = ggn_from_intervals([(0.99, 1.00)], domain=GreyDomain(-1, 1))
    assert g.kernel == pytest.approx(0.995, abs=1e-15)
    assert g.greyness == pytest.approx(0.005, abs=1e-15)


def test_symmetric_interval_uses_zero_kernel_rule():
    g = ggn_from_intervals([(-0.1, 0.1)])
    assert g.kernel == 0.0
    assert g.greyness == pytest.approx(0.1, abs=1e-15)


def test_degenerate_interval_is_crisp():
    g = ggn_from_intervals([(0.7, 0.7)])
    assert g == GGN(0.7, 0.0)


def test_union_of_two_intervals_hand_oracle():
    # midpoints -0.825 and 0.65, widths 0.15 and 0.5, mu = 2
    # kernel = -0.0875; greyness = (0.825*0.15 + 0.65*0.5) / 2 / 0.0875
    g = ggn_from_intervals([(-0.9, -0.75), (0.4, 0.9)])
    assert g.kernel == pytest.approx(-0.0875, abs=1e-15)
    assert g.greyness == pytest.approx(2.5642857142857142857, rel=1e-13)


def test_probability_weighted_kernel():
    g = ggn_from_intervals([(0.0, 0.2), (0.6, 0.8)], probs=[0.25, 0.75])
    assert g.kernel == pytest.approx(0.25 * 0.1 + 0.75 * 0.7)


@pytest.mark.parametrize(
    "intervals, probs",
    [([], None), ([(0, 0.1)], [0.5]), ([(0, 0.1), (0.2, 0.3)], [0.5, 0.6]),
     ([(0, 0.1), (0.2, 0.3)], [1.0, 0.0]), ([(0.5, 1.5)], None)],
)
def test_from_intervals_rejects_bad_input(intervals, probs):
    with pytest.raises(ValueError):
        ggn_from_intervals(intervals, probs=probs)


def test_point_values_inside_union():
    g = ggn_from_intervals([(-0.95, -0.89), -0.83, (-0.8, -0.75)])
    assert g.kernel == pytest.approx((-0.92 - 0.83 - 0.775) / 3)


@given(st.floats(-1, 1), st.floats(0, 1))
def test_single_interval_property(a, w):
    b = min(a + w, 1.0)
    g = ggn_from_intervals([(a, b)])
    assert g.kernel == 0.5 * (a + b)
    assert g.greyness == (b - a) / 2.0


# --- arithmetic ------------------------------------------------------------

def test_addition_weights_greyness_by_kernel_magnitude():
    assert ggn_eq(GGN(0.4, 0.1) + GGN(0.6, 0.2), GGN(1.0, 0.16))


def test_adding_zero_is_identity():
    g = GGN(0.37, 0.2)
    assert ggn_add(g, GGN(0.0, 0.0)) == g


def test_cancelling_kernels_keep_greyness():
    r = GGN(0.5, 0.1) + GGN(-0.5, 0.1)
    assert ggn_eq(r, GGN(0.0, 0.1))
    assert not ggn_eq(r, GGN(0.0, 0.0))


def test_two_zero_kernels_average_greyness():
    assert ggn_add(GGN(0, 0.2), GGN(0, 0.4)).greyness == pytest.approx(0.3)


def test_scalar_multiplication():
    assert ggn_eq(2 * GGN(0.3, 0.05), GGN(0.6, 0.05))
    assert ggn_scalar_mul(0, GGN(0.3, 0.05)) == GGN(0.0, 0.05)
    g = GGN(0.3, 0.05)
    assert ggn_scalar_mul(1, g) == g


def test_multiplication_takes_max_greyness():
    assert ggn_eq(GGN(0.5, 0.01) * GGN(0.8, 0.02), GGN(0.4, 0.02))
    g = GGN(0.42, 0.07)
    assert g * GGN(1.0, 0.0) == g
    assert ggn_mul(GGN(0, 0.3), GGN(0.7, 0.1)) == GGN(0.0, 0.3)


def test_division_inverse_power():
    assert ggn_eq(ggn_div(GGN(0.4, 0.1), GGN(0.8, 0.2)), GGN(0.5, 0.2))
    assert ggn_eq(ggn_inv(GGN(0.5, 0.3)), GGN(2.0, 0.3))
    assert ggn_eq(ggn_pow(GGN(0.5, 0.3), 3), GGN(0.125, 0.3))
    with pytest.raises(ZeroDivisionError, match="zero kernel"):
        ggn_inv(GGN(0.0, 0.1))
    with pytest.raises(ZeroDivisionError):
        GGN(1.0) / GGN(0.0, 0.2)


@given(ggns, ggns)
def test_sum_greyness_is_convex_combination(a, b):
    for r in (ggn_add(a, b), ggn_sub(a, b)):
        lo, hi = min(a.greyness, b.greyness), max(a.greyness, b.greyness)
        assert lo - 1e-12 <= r.greyness <= hi + 1e-12


@given(ggns, ggns.filter(lambda g: abs(g.kernel) > 1e-6), reals, st.integers(0, 4))
def test_product_greyness_rules(a, b, k, p):
    assert ggn_mul(a, b).greyness == max(a.greyness, b.greyness)
    assert ggn_div(a, b).greyness == max(a.greyness, b.greyness)
    assert ggn_scalar_mul(k, a).greyness == a.greyness
    assert ggn_pow(a, p).greyness == a.greyness


@given(reals, reals.filter(lambda x: abs(x) > 1e-6))
def test_crisp_numbers_follow_real_arithmetic(x, y):
    a, b = GGN(x), GGN(y)
    assert ggn_add(a, b) == GGN(x + y, 0.0)
    assert ggn_sub(a, b) == GGN(x - y, 0.0)
    assert ggn_mul(a, b) == GGN(x * y, 0.0)
    assert ggn_div(a, b) == GGN(x / y, 0.0)
    assert ggn_inv(b) == GGN(1 / y, 0.0)


# --- metrics ---------------------------------------------------------------

def test_metric_examples():
    g = GGN(0.3, 0.2)
    assert metric_d2(g, g) == 0.0
    assert metric_d2(GGN(3, 0), GGN(0, 0.4)) == pytest.approx(math.sqrt(9.16))
    x = GGNVector([3.0, 0.0], [0.0, 0.0])
    y = GGNVector([0.0, 0.0], [0.4, 0.0])
    assert metric_d(x, y) == pytest.approx(math.sqrt(9.16))
    assert metric_d(x, x) == 0.0


def test_metric_d_length_mismatch():
    with pytest.raises(ValueError):
        metric_d(GGNVector([1.0]), GGNVector([1.0, 2.0]))


@given(ggns, ggns, ggns)
def test_d2_axioms(a, b, c):
    d = metric_d2(a, b)
    assert d >= 0
    assert (d == 0) == (a == b)
    assert d == metric_d2(b, a)
    assert metric_d2(a, c) <= d + metric_d2(b, c) + 1e-12


@given(ggns, ggns)
def test_d_on_length_one_reduces_to_d2(a, b):
    assert metric_d([a], [b]) == pytest.approx(metric_d2(a, b), rel=1e-15, abs=1e-150)


# --- intervals -------------------------------------------------------------

def test_interval_arithmetic_examples():
    assert ign_add(IGN(1, 2), IGN(3, 4)) == IGN(4, 6)
    assert ign_mul(IGN(-1, 2), IGN(3, 4)) == IGN(-4, 8)
    assert ign_mul(IGN(0, 0), IGN(-3, 5)) == IGN(0, 0)


@given(reals, st.floats(0, 5), reals, st.floats(0, 5), st.floats(0, 1), st.floats(0, 1))
def test_interval_product_contains_pointwise_products(a, wa, b, wb, s, t):
    x, y = IGN(a, a + wa), IGN(b, b + wb)
    px = x.lower + s * (x.upper - x.lower)
    py = y.lower + t * (y.upper - y.lower)
    r = ign_mul(x, y)
    assert r.lower - 1e-9 <= px * py <= r.upper + 1e-9


def test_vector_is_immutable():
    v = GGNVector([0.1, 0.2], [0.0, 0.1])
    with pytest.raises(ValueError):
        v.kernels[0] = 5.0
    assert v[1] == GGN(0.2, 0.1)
    assert GGNVector.from_ggns(list(v)) == v
