import math

import numpy as np
import pytest

from oceanray.errors import InvalidArgumentError
from oceanray.profiles import (
    check_symbol_condition,
    make_betaplane,
    make_bump,
    make_signed_zonal,
    zeros_in,
)


class TestBump:
    def test_center_value(self):
        for a in (0.5, 1.0, -2.0):
            assert make_bump(0.0, 1.0, a).u1(0.0) == pytest.approx(a, abs=0.0)

    def test_compact_support_edges(self):
        p = make_bump(0.0, 1.0, 0.7)
        assert p.u1(1.0) == 0.0
        assert p.u1(-1.0) == 0.0
        assert p.du1(1.0) == 0.0
        # exactly zero well outside, not merely small
        assert p.u1(1.0000001) == 0.0
        assert p.d2u1(-5.0) == 0.0

    def test_second_derivative_at_center(self):
        # series: exp(1 - 1/(1-s^2)) ~ 1 - s^2 near 0, so u1'' ~ -2 a / w^2
        p = make_bump(0.0, 0.4, 0.5)
        assert p.d2u1(0.0) == pytest.approx(-6.25, rel=1e-12)
        h = 1e-5
        fd = (p.u1(h) - 2 * p.u1(0.0) + p.u1(-h)) / h**2
        assert p.d2u1(0.0) == pytest.approx(fd, rel=1e-4)

    def test_rejects_bad_halfwidth(self):
        with pytest.raises(InvalidArgumentError):
            make_bump(0.0, 0.0, 1.0)


class TestSignedZonal:
    def test_zero_and_slope_at_origin(self):
        p = make_signed_zonal(0.3, 2.0)
        assert p.u1(0.0) == 0.0
        assert p.du1(0.0) == pytest.approx(0.3, rel=1e-14)

    def test_value_left_of_origin(self):
        p = make_signed_zonal(0.3, 2.0)
        expected = -0.3 * math.exp(1.0 - 1.0 / (1.0 - 0.25))
        assert p.u1(-1.0) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(-0.21496, abs=1e-5)

    def test_antisymmetric_in_scale(self, rng):
        plus = make_signed_zonal(0.3, 2.0)
        minus = make_signed_zonal(-0.3, 2.0)
        ys = rng.uniform(-2.5, 2.5, 200)
        assert np.allclose(plus.u1(ys), -minus.u1(ys), rtol=0, atol=0)
        assert np.allclose(plus.du1(ys), -minus.du1(ys), rtol=0, atol=0)
        assert np.allclose(plus.d2u1(ys), -minus.d2u1(ys), rtol=0, atol=0)

    def test_rejects_degenerate_parameters(self):
        with pytest.raises(InvalidArgumentError):
            make_signed_zonal(0.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            make_signed_zonal(1.0, -1.0)


class TestBetaplane:
    def test_linear_values(self):
        b = make_betaplane(1.0)
        assert b.b(2.0) == 2.0
        assert b.db(2.0) == 1.0
        assert b.d2b(2.0) == 0.0
        assert make_betaplane(2.0).b(-3.0) == -6.0

    def test_no_critical_points(self):
        assert make_betaplane(1.0).critical_points == ()

    def test_linearity_is_exact_on_samples(self, rng):
        beta = 1.7
        b = make_betaplane(beta)
        ys = rng.uniform(-20, 20, 100)
        assert np.all(b.b(ys) - beta * ys == 0.0)

    def test_confinement_surrogate(self):
        b = make_betaplane(1.0)
        big = 100.0
        assert b.b(big) ** 2 > b.b(0.0) ** 2 + 1.0
        assert b.b(-big) ** 2 > b.b(0.0) ** 2 + 1.0

    def test_rejects_zero_slope(self):
        with pytest.raises(InvalidArgumentError):
            make_betaplane(0.0)


class TestSymbolCondition:
    def test_first_order_ratio_peaks_at_origin(self):
        rep = check_symbol_condition(make_betaplane(1.0), orders=2)
        assert rep[1] == pytest.approx(1.0, rel=1e-12)

    def test_second_order_ratio_vanishes(self):
        rep = check_symbol_condition(make_betaplane(1.0), orders=2)
        assert rep[2] == 0.0

    def test_zeroth_order_ratio_bound(self):
        rep = check_symbol_condition(make_betaplane(1.0), orders=0)
        assert rep[0] == pytest.approx(0.5, rel=1e-12)


class TestZerosIn:
    def test_signed_zonal_interior_zero_only(self):
        p = make_signed_zonal(0.3, 2.0)
        roots = zeros_in(p.u1, (-3.0, 1.0), tol=1e-12)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(0.0, abs=1e-11)

    def test_parabola(self):
        roots = zeros_in(lambda x: x * x - 1.0, (0.0, 2.0), tol=1e-12)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(1.0, abs=1e-11)

    def test_no_zero(self):
        assert zeros_in(lambda x: np.ones_like(np.asarray(x, dtype=float)), (0.0, 1.0)) == []


@pytest.mark.parametrize(
    "factory",
    [
        lambda: make_bump(0.0, 1.0, 0.5),
        lambda: make_bump(0.3, 0.4, -0.2),
        lambda: make_signed_zonal(0.3, 2.0),
    ],
)
def test_derivative_consistency(factory, rng):
    """u1' and u1'' agree with central differences away from the support edge."""
    p = factory()
    lo, hi = p.support
    scale = hi - lo
    ys = rng.uniform(lo + 0.05 * scale, hi - 0.05 * scale, 1000)
    h = 1e-5 * scale
    fd1 = (p.u1(ys + h) - p.u1(ys - h)) / (2 * h)
    fd2 = (p.u1(ys + h) - 2 * p.u1(ys) + p.u1(ys - h)) / h**2
    d1 = p.du1(ys)
    d2 = p.d2u1(ys)
    denom1 = np.maximum(np.abs(d1), 1e-3 * np.max(np.abs(d1)))
    denom2 = np.maximum(np.abs(d2), 1e-3 * np.max(np.abs(d2)))
    assert np.max(np.abs(d1 - fd1) / denom1) < 1e-6
    assert np.max(np.abs(d2 - fd2) / denom2) < 1e-4


def test_betaplane_derivative_consistency(rng):
    b = make_betaplane(1.3)
    ys = rng.uniform(-10, 10, 1000)
    h = 1e-5
    fd = (b.b(ys + h) - b.b(ys - h)) / (2 * h)
    assert np.max(np.abs(b.db(ys) - fd)) < 1e-9
