import math

import numpy as np
import pytest

from oceanray.dynamics import EventSpec, PhasePoint, integrate, rossby_symbol
from oceanray.errors import (
    ForbiddenRegionError,
    NotPeriodicError,
    SingularDenominatorError,
)
from oceanray.reduced_phase import (
    DEGENERATE_ZERO,
    HIGHER_POLE,
    SIMPLE_POLE,
    SIMPLE_ZERO,
    bracket,
    energy_surface_points,
    period,
    potential,
    rho,
)


def circle_period(xi1, r):
    return math.pi * (xi1**2 + r**2) ** 2 / xi1


def circle_tau(xi1, r):
    return xi1 / (xi1**2 + r**2)


class TestPotential:
    def test_flat_plane_values(self, flat_plane):
        assert potential(0.5, 1.0, 0.0, flat_plane) == pytest.approx(1.0)
        assert potential(0.5, 1.0, 1.0, flat_plane) == pytest.approx(0.0, abs=1e-14)
        assert potential(0.5, 1.0, -1.0, flat_plane) == pytest.approx(0.0, abs=1e-14)

    def test_no_current_reduces_to_tau_denominator(self, flat_plane, rng):
        for _ in range(50):
            tau = rng.uniform(0.1, 1.0)
            xi1 = rng.uniform(0.5, 2.0)
            x2 = rng.uniform(-2, 2)
            expected = 1.0 * xi1 / tau - xi1**2 - x2**2
            assert potential(tau, xi1, x2, flat_plane) == pytest.approx(expected, rel=1e-13)

    def test_singular_denominator_raises(self, convective_plane):
        # tau exactly resonant with the current at the bump center
        tau = 0.3 * 1.0
        with pytest.raises(SingularDenominatorError):
            potential(tau, 1.0, 0.0, convective_plane)

    def test_on_surface_identity(self, convective_plane, rng):
        """V(x2_0) equals xi2_0^2 whenever the point lies on its own surface."""
        for _ in range(100):
            xi1 = rng.choice([-1.0, 1.0]) * rng.uniform(0.4, 2.0)
            x2 = rng.uniform(-2, 2)
            xi2 = rng.uniform(-2.5, 2.5)
            tau = float(rossby_symbol(xi1, x2, xi2, convective_plane))
            v = potential(tau, xi1, x2, convective_plane)
            assert v == pytest.approx(xi2 * xi2, abs=1e-12 * max(1.0, xi2 * xi2))


class TestEnergySurface:
    def test_flat_plane_circle(self, flat_plane):
        pts = energy_surface_points(0.5, 1.0, np.linspace(-1.2, 1.2, 301), flat_plane)
        assert pts.shape[0] > 0
        radius = pts[:, 1] ** 2 + pts[:, 0] ** 2
        assert np.max(np.abs(radius - 1.0)) < 1e-12

    def test_empty_when_tau_out_of_band(self, flat_plane):
        pts = energy_surface_points(1.5, 1.0, np.linspace(-2, 2, 101), flat_plane)
        assert pts.shape[0] == 0
        pts = energy_surface_points(-0.3, 1.0, np.linspace(-2, 2, 101), flat_plane)
        assert pts.shape[0] == 0

    def test_branches_are_mirror_images(self, flat_plane):
        pts = energy_surface_points(0.5, 1.0, np.linspace(-1, 1, 41), flat_plane)
        assert np.all(pts[:, 1] == -pts[:, 2])


class TestBracket:
    def test_flat_plane_simple_zeros(self, flat_plane):
        rep = bracket(0.5, 1.0, 0.0, flat_plane)
        assert rep.xmin == pytest.approx(-1.0, abs=1e-9)
        assert rep.xmax == pytest.approx(1.0, abs=1e-9)
        assert rep.kind_min == SIMPLE_ZERO and rep.kind_max == SIMPLE_ZERO
        # V' = -2 x2 at the endpoints
        assert rep.derivative(rep.xmax) == pytest.approx(-2.0, rel=1e-8)

    def test_signed_zonal_pole_at_current_zero(self, signed_plane):
        rep = bracket(0.0, -1.5, -0.5, signed_plane)
        assert rep.kind_max == SIMPLE_POLE
        assert rep.xmax == pytest.approx(0.0, abs=1e-10)
        # support-edge resonance is infinitely flat: higher-order pole; the
        # denominator underflows to zero a hair inside the analytic edge
        assert rep.kind_min == HIGHER_POLE
        assert rep.xmin == pytest.approx(-2.0, abs=5e-3)

    def test_degenerate_fixed_point(self, flat_plane):
        rep = bracket(1.0, 1.0, 0.0, flat_plane)
        assert rep.degenerate
        assert rep.kind_min == DEGENERATE_ZERO and rep.kind_max == DEGENERATE_ZERO

    def test_forbidden_start_raises(self, flat_plane):
        with pytest.raises(ForbiddenRegionError):
            bracket(2.0, 1.0, 0.0, flat_plane)

    def test_interior_is_positive(self, convective_plane, rng):
        for _ in range(20):
            xi1 = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5)
            x2 = rng.uniform(-1.5, 1.5)
            xi2 = rng.uniform(0.2, 1.5)
            tau = float(rossby_symbol(xi1, x2, xi2, convective_plane))
            rep = bracket(tau, xi1, x2, convective_plane)
            if rep.kind_min == SIMPLE_ZERO:
                assert abs(rep.value(rep.xmin)) < 1e-10
            if rep.kind_max == SIMPLE_ZERO:
                assert abs(rep.value(rep.xmax)) < 1e-10
            mid = 0.5 * (rep.xmin + rep.xmax)
            assert rep.value(mid) > 0.0


class TestPeriod:
    def test_circle_oracle_r1(self, flat_plane):
        rep = bracket(circle_tau(1.0, 1.0), 1.0, 0.0, flat_plane)
        assert period(rep, flat_plane) == pytest.approx(4 * math.pi, rel=1e-8)

    def test_circle_oracle_r_sqrt2(self, flat_plane):
        rep = bracket(circle_tau(1.0, math.sqrt(2)), 1.0, 0.0, flat_plane)
        assert period(rep, flat_plane) == pytest.approx(9 * math.pi, rel=1e-8)

    def test_quadrature_matches_direct_integration(self, convective_plane, rng):
        """Turning-point to turning-point time, doubled, on random cases.

        Draws are conditioned on a healthy distance to the pathological set:
        near a separatrix the period diverges and neither route can hold a
        1e-6 relative agreement.
        """
        from oceanray.classification import sigma_margin

        done = 0
        while done < 50:
            xi1 = rng.choice([-1.0, 1.0]) * rng.uniform(0.6, 1.6)
            x2 = rng.uniform(-1.2, 1.2)
            xi2 = rng.uniform(0.3, 1.4)
            tau = float(rossby_symbol(xi1, x2, xi2, convective_plane))
            rep = bracket(tau, xi1, x2, convective_plane)
            if not rep.periodic:
                continue
            if sigma_margin(PhasePoint(0.0, xi1, x2, xi2), convective_plane).value < 1e-2:
                continue
            t_quad = period(rep, convective_plane)
            traj = integrate(
                PhasePoint(0.0, xi1, x2, xi2), 2.5 * t_quad, convective_plane,
                events=[EventSpec(kind="xi2_zero")],
            )
            zeros = [t for spec, t, _ in traj.events if spec.kind == "xi2_zero"]
            if len(zeros) < 2:
                continue
            t_direct = 2 * (zeros[1] - zeros[0])
            assert t_quad == pytest.approx(t_direct, rel=1e-6)
            done += 1

    def test_not_periodic_raises(self, signed_plane):
        rep = bracket(0.0, -1.5, -0.5, signed_plane)
        with pytest.raises(NotPeriodicError):
            period(rep, signed_plane)


class TestRho:
    def test_value_left_of_zero(self, signed_plane):
        val = rho(-1.0, signed_plane)
        u = signed_plane.zonal.u1(-1.0)
        assert val == pytest.approx(-1.0 / u - 1.0, rel=1e-13)
        assert val == pytest.approx(3.6520, abs=1e-4)

    def test_blows_up_toward_current_zero(self, signed_plane):
        assert rho(-1e-4, signed_plane) > rho(-1e-2, signed_plane) > rho(-0.5, signed_plane)

    def test_sign_when_current_negative(self, signed_plane, rng):
        ys = rng.uniform(-1.9, -0.1, 100)
        vals = np.asarray(rho(ys, signed_plane))
        b2 = ys**2
        assert np.all(vals > -b2)

    def test_singular_at_current_zero(self, signed_plane):
        with pytest.raises(SingularDenominatorError):
            rho(0.0, signed_plane)

    def test_zero_energy_identity(self, signed_plane, rng):
        """xi2^2 = rho(x2) - xi1^2 on the zero-energy surface."""
        for _ in range(100):
            x2 = rng.uniform(-1.5, -0.2)
            r = float(rho(x2, signed_plane))
            xi1 = -math.sqrt(rng.uniform(0.1, max(r - 1e-6, 0.2)))
            if r <= xi1**2:
                continue
            xi2 = math.sqrt(r - xi1**2)
            tau = float(rossby_symbol(xi1, x2, xi2, signed_plane))
            assert abs(tau) < 1e-12
