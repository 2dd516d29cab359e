import numpy as np
import pytest

from oceanray.errors import InvalidArgumentError
from oceanray.spectral import group_speed
from oceanray.transport import (
    MODE_POINCARE_PLUS,
    MODE_ROSSBY,
    mass_in_box,
    propagate,
    sample_initial,
)

CIRCLE_BOX = [(-0.5, 0.5), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]
FAST_BOX = [(-0.2, 0.2), (1.0, 2.0), (-0.05, 0.05), (-0.5, 0.5)]
K = [(-1.0, 1.0), (-1.3, 1.3)]


class TestSampling:
    def test_count_and_total_weight(self, flat_plane):
        e = sample_initial(CIRCLE_BOX, 500, flat_plane, seed=1)
        assert len(e) == 500
        assert e.total_weight == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_for_fixed_seed(self, flat_plane):
        a = sample_initial(FAST_BOX, 300, flat_plane, seed=7)
        b = sample_initial(FAST_BOX, 300, flat_plane, seed=7)
        assert np.array_equal(a.states, b.states)
        c = sample_initial(FAST_BOX, 300, flat_plane, seed=8)
        assert not np.array_equal(a.states, c.states)

    def test_box_membership(self, flat_plane):
        e = sample_initial(FAST_BOX, 400, flat_plane, seed=2)
        for j, (lo, hi) in enumerate(FAST_BOX):
            assert np.all(e.states[:, j] >= lo)
            assert np.all(e.states[:, j] <= hi)

    def test_xi1_box_must_avoid_zero(self, flat_plane):
        with pytest.raises(InvalidArgumentError):
            sample_initial([(-1, 1), (-0.5, 0.5), (0, 0), (1, 1)], 10, flat_plane)

    def test_pathology_screening(self, flat_plane):
        """No sampled point sits on the degenerate zero-radius surface."""
        box = [(0.0, 0.0), (1.0, 1.0), (-0.01, 0.01), (-0.01, 0.01)]
        e = sample_initial(box, 100, flat_plane, seed=3, tol_sigma=1e-6)
        taus = e.states[:, 1] / (e.states[:, 1] ** 2 + e.states[:, 3] ** 2 + e.states[:, 2] ** 2)
        assert np.all(np.abs(taus - 1.0) > 1e-7)


class TestPropagate:
    def test_zero_time_is_identity(self, flat_plane):
        e = sample_initial(CIRCLE_BOX, 50, flat_plane, seed=4)
        e0 = propagate(e, 0.0, flat_plane)
        assert np.array_equal(e0.states, e.states)

    def test_weights_and_time_bookkeeping(self, flat_plane):
        e = sample_initial(CIRCLE_BOX, 50, flat_plane, seed=4)
        ep = propagate(e, 5.0, flat_plane)
        assert np.array_equal(ep.weights, e.weights)
        assert ep.time == 5.0
        assert ep.total_weight == pytest.approx(e.total_weight, abs=0.0)

    def test_trapped_ensemble_stays_compact(self, flat_plane):
        e = sample_initial(CIRCLE_BOX, 300, flat_plane, seed=5)
        ep = propagate(e, 200.0, flat_plane)
        assert int(ep.lost.sum()) == 0
        assert mass_in_box(ep, K) == 1.0
        assert np.max(np.abs(ep.states[:, 0] - e.states[:, 0])) < 1e-6

    def test_fast_mode_displacement_matches_group_speed(self, flat_plane):
        e = sample_initial(FAST_BOX, 200, flat_plane, mode=MODE_POINCARE_PLUS, seed=6)
        t = 10.0
        ep = propagate(e, t, flat_plane)
        disp = ep.states[:, 0] - e.states[:, 0]
        for j in range(len(e)):
            xi1 = e.states[j, 1]
            lam = e.states[j, 3] ** 2 + e.states[j, 2] ** 2
            predicted = group_speed(xi1, lam, 0.0) * t
            assert disp[j] == pytest.approx(predicted, rel=0.05)

    def test_xi1_and_energy_invariants(self, flat_plane):
        e = sample_initial(FAST_BOX, 100, flat_plane, mode=MODE_POINCARE_PLUS, seed=9)
        ep = propagate(e, 20.0, flat_plane)
        assert np.max(np.abs(ep.states[:, 1] - e.states[:, 1])) < 1e-12
        s0 = e.states[:, 3] ** 2 + e.states[:, 2] ** 2
        s1 = ep.states[:, 3] ** 2 + ep.states[:, 2] ** 2
        assert np.max(np.abs(s1 - s0)) < 1e-7


class TestMass:
    def test_initial_mass_inside_own_box(self, flat_plane):
        e = sample_initial(FAST_BOX, 200, flat_plane, seed=10)
        box = [FAST_BOX[0], FAST_BOX[2]]
        assert mass_in_box(e, box) == 1.0

    def test_fast_ensemble_escapes_by_kinematic_time(self, flat_plane):
        e = sample_initial(FAST_BOX, 500, flat_plane, mode=MODE_POINCARE_PLUS, seed=11)
        lam_max = float(np.max(e.states[:, 3] ** 2 + e.states[:, 2] ** 2))
        c = group_speed(1.0, lam_max, 0.0)
        diameter = K[0][1] - K[0][0]
        spread = FAST_BOX[0][1] - FAST_BOX[0][0]
        t_escape = 1.5 * (diameter + spread) / c
        ep = propagate(e, t_escape, flat_plane)
        assert mass_in_box(ep, K) < 0.01

    def test_lost_weight_excluded_from_numerator(self, flat_plane):
        e = sample_initial(CIRCLE_BOX, 10, flat_plane, seed=12)
        lost = e.lost.copy()
        lost[:5] = True
        from dataclasses import replace

        e2 = replace(e, lost=lost)
        assert mass_in_box(e2, K) == pytest.approx(0.5, abs=1e-12)
        assert e2.total_weight == pytest.approx(1.0, abs=1e-12)
