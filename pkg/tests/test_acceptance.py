"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are pinned here and nowhere else; closed-form oracles on
the no-convection linear-rotation plane anchor the quantitative checks, and
property-style checks cover the statements that are asymptotic by nature.
"""

import math
import time

import numpy as np
import pytest

from oceanray.classification import asymptotic_rates, classify
from oceanray.dynamics import EventSpec, PhasePoint, integrate, rossby_symbol
from oceanray.mode_algebra import (
    det_p0_modulus,
    polarization_matrices,
    polarization_residuals,
)
from oceanray.profiles import (
    Profiles,
    make_betaplane,
    make_bump,
    make_signed_zonal,
    make_zero_zonal,
)
from oceanray.reduced_phase import bracket, period
from oceanray.spectral import (
    count_eigenvalues_below,
    dispersion_roots,
    group_speed,
    make_action_profile,
    rossby_root_asymptotics,
)
from oceanray.transport import (
    MODE_POINCARE_PLUS,
    mass_in_box,
    propagate,
    sample_initial,
)
from oceanray.trapping import (
    critper,
    drift_velocity,
    lambda_per_G,
    lambda_per_band,
    lambda_per_root,
    lambda_per_setup,
    lambda_sing_point,
)

FLAT = Profiles(make_zero_zonal(), make_betaplane(1.0))
CONVECTIVE = Profiles(make_bump(0.0, 1.0, 0.3), make_betaplane(1.0))
SIGNED = Profiles(make_signed_zonal(0.3, 2.0), make_betaplane(1.0))
STEEP = Profiles(make_bump(0.0, 0.4, 0.5), make_betaplane(1.0))


def circle_tau(xi1, r):
    return xi1 / (xi1**2 + r**2)


def circle_period(xi1, r):
    return math.pi * (xi1**2 + r**2) ** 2 / xi1


def circle_drift(xi1, r):
    return (r**2 - xi1**2) / (xi1**2 + r**2) ** 2


PAIRS = [
    (xi1, r)
    for xi1 in (0.7, 0.85, 1.0, 1.2, 1.5)
    for r in (0.6, 0.9, 1.1, 1.4)
]
assert len(PAIRS) == 20


def test_criterion_01_betaplane_trapping():
    start = time.monotonic()
    traj = integrate(PhasePoint(0.0, 1.0, 0.0, 1.0), 1000.0, FLAT)
    wall = time.monotonic() - start
    excursion = float(np.max(np.abs(traj.states[:, 0])))
    assert excursion < 1e-5
    assert wall < 5.0
    print(f"criterion 01 PASS: max |x1| = {excursion:.2e} over horizon 1e3 in {wall:.2f} s")


def test_criterion_02_period_oracle():
    worst_closed = worst_direct = 0.0
    for xi1, r in PAIRS:
        tau = circle_tau(xi1, r)
        rep = bracket(tau, xi1, 0.0, FLAT)
        t_quad = period(rep, FLAT)
        t_true = circle_period(xi1, r)
        worst_closed = max(worst_closed, abs(t_quad - t_true) / t_true)
        traj = integrate(
            PhasePoint(0.0, xi1, 0.0, r), 1.6 * t_true, FLAT,
            events=[EventSpec(kind="xi2_zero")],
        )
        zeros = [t for spec, t, _ in traj.events if spec.kind == "xi2_zero"]
        t_direct = 2.0 * (zeros[1] - zeros[0])
        worst_direct = max(worst_direct, abs(t_quad - t_direct) / t_direct)
    assert worst_closed < 1e-6
    assert worst_direct < 1e-6
    print(
        "criterion 02 PASS: period vs closed form "
        f"{worst_closed:.2e}, vs direct integration {worst_direct:.2e} (20 pairs)"
    )


def test_criterion_03_drift_oracle():
    worst = 0.0
    for xi1, r in PAIRS:
        v = drift_velocity(PhasePoint(0.0, xi1, 0.0, r), FLAT)
        worst = max(worst, abs(v.drift - circle_drift(xi1, r)))
    assert worst < 1e-6
    print(f"criterion 03 PASS: period-average drift vs closed form {worst:.2e} (20 pairs)")


def test_criterion_04_critper_null_and_analytic():
    rep = bracket(0.5, 1.0, 0.0, FLAT)
    null = abs(critper(0.5, 1.0, rep, FLAT))
    assert null < 1e-8
    rep2 = bracket(0.4, 1.0, 0.0, FLAT)
    val = critper(0.4, 1.0, rep2, FLAT)
    err = abs(val + 0.25 * math.pi)
    assert err < 1e-8
    print(f"criterion 04 PASS: |critper| at half-band energy {null:.1e}; analytic case err {err:.1e}")


def test_criterion_05_conservation_and_gradients():
    traj = integrate(PhasePoint(0.0, 1.0, 0.2, 0.9), 100.0, CONVECTIVE, rtol=1e-10, atol=1e-10)
    rel_drift = traj.max_energy_drift / max(1.0, abs(traj.tau0))
    assert rel_drift < 1e-8

    rng = np.random.RandomState(5)
    h = 1e-6
    worst = 0.0
    from oceanray.dynamics import rossby_vector_field

    for _ in range(1000):
        xi1 = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 3.0)
        x2 = rng.uniform(-2.0, 2.0)
        xi2 = rng.uniform(-3.0, 3.0)
        dx1, dx2, dxi2 = rossby_vector_field(PhasePoint(0.0, xi1, x2, xi2), CONVECTIVE)
        g1 = (rossby_symbol(xi1 + h, x2, xi2, CONVECTIVE) - rossby_symbol(xi1 - h, x2, xi2, CONVECTIVE)) / (2 * h)
        g2 = (rossby_symbol(xi1, x2, xi2 + h, CONVECTIVE) - rossby_symbol(xi1, x2, xi2 - h, CONVECTIVE)) / (2 * h)
        g3 = (rossby_symbol(xi1, x2 + h, xi2, CONVECTIVE) - rossby_symbol(xi1, x2 - h, xi2, CONVECTIVE)) / (2 * h)
        scale = max(abs(dx1), abs(dx2), abs(dxi2), 1e-3)
        worst = max(worst, abs(dx1 - g1) / scale, abs(dx2 - g2) / scale, abs(dxi2 + g3) / scale)
    assert worst < 1e-6
    print(f"criterion 05 PASS: energy drift {rel_drift:.2e} (horizon 1e2); gradient err {worst:.2e} (1e3 points)")


def test_criterion_06_classification_partition():
    xi1 = 1.0
    x2s = np.linspace(-1.5, 1.5, 50)
    xi2s = np.linspace(0.15, 2.0, 50)
    eligible = stable = 0
    for x2 in x2s:
        for xi2 in xi2s:
            p = PhasePoint(0.0, xi1, float(x2), float(xi2))
            cls = classify(p, CONVECTIVE)
            if cls.margin is None or cls.margin <= 1e-6:
                continue
            eligible += 1
            assert cls.kind in ("Periodic", "Asymptotic"), (
                f"point ({x2}, {xi2}) with margin {cls.margin} classified {cls.kind}"
            )
            q = PhasePoint(0.0, xi1, float(x2) + 1e-6, float(xi2) + 1e-6)
            cls2 = classify(q, CONVECTIVE)
            if cls2.kind == cls.kind:
                stable += 1
    assert eligible > 2000
    assert stable == eligible
    print(f"criterion 06 PASS: {eligible}/2500 grid points eligible, 100% Periodic/Asymptotic, all stable")


def test_criterion_07_singular_trapped_seeds():
    worst_tau = 0.0
    seeds = [(-2.0, -0.5), (-2.0, -0.3), (-2.2, -0.6)]
    for xi1, x2_0 in seeds:
        p = lambda_sing_point(0.0, xi1, x2_0, SIGNED)
        worst_tau = max(worst_tau, abs(float(rossby_symbol(p.xi1, p.x2, p.xi2, SIGNED))))
    assert worst_tau < 1e-12

    p = lambda_sing_point(0.0, -2.0, -0.5, SIGNED)
    traj = integrate(p, 1000.0, SIGNED, n_samples=4001)
    x2 = traj.states[:, 2]
    assert np.all(np.diff(x2) > -1e-12)  # monotone rise toward the terminal zero
    rates = asymptotic_rates(traj, 0.0, SIGNED)
    assert abs(rates.exponent_x2 + 2.0) < 0.1  # within 5% of -2
    assert rates.r2_xi2 > 0.999  # frequency growth is linear
    x1_exc = float(np.max(np.abs(traj.states[:, 0] - p.x1)))
    assert x1_exc < 2.0
    print(
        f"criterion 07 PASS: |tau| <= {worst_tau:.1e}; exponent {rates.exponent_x2:.3f}; "
        f"x1 excursion {x1_exc:.3f} over horizon 1e3"
    )


def test_criterion_08_periodic_trapped_root():
    setup = lambda_per_setup(STEEP)
    g1 = lambda_per_G(1.0, setup, STEEP)
    g50 = lambda_per_G(50.0, setup, STEEP)
    assert g1 > 0.0
    assert g50 < 0.0
    root, slope, width = lambda_per_root(setup, STEEP)
    assert width < 1e-6
    _, xmin, _ = lambda_per_band(setup, root, STEEP)
    seed = PhasePoint(0.0, root, xmin, 0.0)
    v = drift_velocity(seed, STEEP)
    assert abs(v.drift) < 1e-4
    print(
        f"criterion 08 PASS: G(1)={g1:.3f} > 0 > G(50)={g50:.1f}; root {root:.6f} "
        f"(width {width:.1e}, G'={slope:.2f}); seed drift {v.drift:.2e}"
    )


def test_criterion_09_quantization_ladder():
    bp = FLAT.coriolis
    ap = make_action_profile(bp)
    worst = 0.0
    for eps in (0.1, 0.01):
        for n in range(101):
            lam = ap.energy(2.0 * math.pi * eps * (n + 0.5))
            exact = eps * (2 * n + 1)
            worst = max(worst, abs(lam - exact) / exact)
    assert worst < 1e-10
    c_big = count_eigenvalues_below(2.0, 0.1, bp)
    c_small = count_eigenvalues_below(2.0, 0.01, bp)
    ratio = c_small / c_big
    assert 9.0 <= ratio <= 11.0
    print(f"criterion 09 PASS: ladder err {worst:.1e} (n<=100, eps 0.1/0.01); count ratio {ratio:.1f}")


def test_criterion_10_dispersion_cubic():
    rng = np.random.RandomState(11)
    worst_res = worst_vieta = 0.0
    for _ in range(300):
        xi1 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 4.0))
        n = int(rng.randint(0, 40))
        eps = float(rng.uniform(1e-4, 0.2))
        beta = 1.0
        tr = dispersion_roots(xi1, n, eps, beta)
        pcoef = -(xi1**2 + beta * eps * (2 * n + 1))
        qcoef = eps * beta * xi1
        budget = 1.0 + abs(pcoef) + abs(qcoef)
        for t in tr.as_tuple():
            worst_res = max(worst_res, abs(t**3 + pcoef * t + qcoef) / budget)
        worst_vieta = max(
            worst_vieta,
            abs(sum(tr.as_tuple())),
            abs(tr.tau_minus * tr.tau_rossby * tr.tau_plus + qcoef),
        )
    assert worst_res < 1e-12
    assert worst_vieta < 1e-12
    g4 = rossby_root_asymptotics(1.0, 0, 4e-3, 1.0)
    g2 = rossby_root_asymptotics(1.0, 0, 2e-3, 1.0)
    g1 = rossby_root_asymptotics(1.0, 0, 1e-3, 1.0)
    assert g4 / g2 == pytest.approx(4.0, rel=0.15)
    assert g2 / g1 == pytest.approx(4.0, rel=0.15)
    print(
        f"criterion 10 PASS: residual {worst_res:.1e}, Vieta {worst_vieta:.1e}; "
        f"gap ratios {g4 / g2:.2f}, {g2 / g1:.2f}"
    )


def test_criterion_11_mode_algebra():
    rng = np.random.RandomState(13)
    bp = FLAT.coriolis
    worst_qp = worst_det = worst_res = 0.0
    min_det = math.inf
    for _ in range(10_000):
        x2 = rng.uniform(-3.0, 3.0)
        xi1 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.01, 10.0))
        xi2 = rng.uniform(-5.0, 5.0)
        m = polarization_matrices(x2, xi1, xi2, bp)
        worst_qp = max(worst_qp, float(np.max(np.abs(m.q0 @ m.p0 - np.eye(3)))))
        det = abs(np.linalg.det(m.p0))
        formula = det_p0_modulus(x2, xi1, xi2, bp)
        worst_det = max(worst_det, abs(det - formula) / formula)
        min_det = min(min_det, det)
        s = math.sqrt(xi1**2 + xi2**2 + bp.b(x2) ** 2)
        worst_res = max(worst_res, max(polarization_residuals(m)) / max(1.0, s))
    assert worst_qp < 1e-12
    assert worst_det < 1e-12
    assert min_det >= 2.0 - 1e-12
    assert worst_res < 1e-10
    print(
        f"criterion 11 PASS: ||Q0 P0 - I|| {worst_qp:.1e}; det formula err {worst_det:.1e}; "
        f"min |det| {min_det:.3f}; eigenvector residual {worst_res:.1e} (1e4 points)"
    )


def test_criterion_12_transport_dichotomy():
    start = time.monotonic()
    k_box = [(-1.0, 1.0), (-1.2, 1.2)]

    slow_box = [(-0.5, 0.5), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]
    slow = sample_initial(slow_box, 10_000, FLAT, seed=3)
    slow_end = propagate(slow, 1000.0, FLAT)
    slow_mass = mass_in_box(slow_end, k_box)
    assert slow_mass > 0.99

    fast_box = [(-0.2, 0.2), (1.0, 2.0), (-0.05, 0.05), (-0.5, 0.5)]
    fast = sample_initial(fast_box, 10_000, FLAT, mode=MODE_POINCARE_PLUS, seed=5)
    lam_max = float(np.max(fast.states[:, 3] ** 2 + fast.states[:, 2] ** 2))
    xi_max = float(np.max(np.abs(fast.states[:, 1])))
    xi_min = float(np.min(np.abs(fast.states[:, 1])))
    c = xi_min / math.sqrt(lam_max + xi_max**2)
    assert c > 0
    diameter = k_box[0][1] - k_box[0][0]
    spread = fast_box[0][1] - fast_box[0][0]
    t_escape = 1.5 * (diameter + spread) / c
    fast_end = propagate(fast, t_escape, FLAT)
    fast_mass = mass_in_box(fast_end, k_box)
    assert fast_mass < 0.01

    wall = time.monotonic() - start
    assert wall < 60.0
    print(
        f"criterion 12 PASS: slow-mode mass {slow_mass:.4f} at horizon 1e3; "
        f"fast-mode mass {fast_mass:.4f} at t={t_escape:.1f}; wall {wall:.1f} s (2x1e4 particles)"
    )
