"""Capture criteria and constructions of trapped-trajectory seed sets.

A ray is trapped when its longitude excursion stays bounded for all positive
times, equivalently when the long-time average of dx1/dt vanishes.  For
periodic latitude motion the average is taken over one period; for asymptotic
motion it equals u1 at the limit latitude, evaluated analytically.  The
period-average criterion also has a quadrature form (one sweep over the
allowed band) whose zero set coincides with the zero set of the drift; both
are implemented and cross-checked.

Two families of trapped seeds are constructed explicitly:

* singular/asymptotic seeds on the zero-energy surface, parameterized through
  the auxiliary function rho = -b'/u1 - b^2 and its sublevel boundary h(xi1);
* periodic seeds on the linear-rotation plane, located as roots of the band
  average G(xi1) along the one-parameter energy rule tau(xi1) = u1(0) xi1
  + delta/xi1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .classification import ASYMPTOTIC, PERIODIC, TrajectoryClass, classify
from .dynamics import PhasePoint, integrate, rossby_symbol
from .errors import (
    BelowThresholdError,
    InvalidArgumentError,
    NoTurningPointsError,
    NotPeriodicError,
    OutOfWindowError,
    PathologicalClassError,
)
from .profiles import Profiles, zeros_in
from .quadrature import endpoint_quad
from .reduced_phase import (
    PotentialReport,
    potential,
    potential_derivative,
    rho,
)

__all__ = [
    "TrappingVerdict",
    "LambdaPerSetup",
    "ScanRow",
    "drift_velocity",
    "critper",
    "critper_verdict",
    "rho_threshold",
    "h_of_xi1",
    "lambda_sing_point",
    "lambda_per_setup",
    "lambda_per_band",
    "lambda_per_G",
    "lambda_per_root",
    "scan_lambda",
]

DEFAULT_TRAPPED_TOL = 1e-6


@dataclass(frozen=True)
class TrappingVerdict:
    """Drift velocity of a ray and the resulting trapped/untrapped call."""

    drift: float
    trapped: bool
    method: str  # "PeriodAverage" | "AsymptoticLimit" | "CritperQuadrature"
    tolerance: float


@dataclass(frozen=True)
class LambdaPerSetup:
    """Parameters of the periodic trapped-seed construction.

    ``eta`` is the half-width of the latitude neighbourhood, ``delta``
    equals 1 - eta^2/8, and the energy rule is tau(xi1) = u1(0) xi1
    + delta/xi1.  Valid setups need sup u1'' < -3 on (-eta, eta).
    """

    eta: float
    delta: float
    u1_at_zero: float
    xi1_interval: Tuple[float, float]

    def tau(self, xi1: float) -> float:
        return self.u1_at_zero * xi1 + self.delta / xi1


def drift_velocity(
    p0: PhasePoint,
    profiles: Profiles,
    tol: float = DEFAULT_TRAPPED_TOL,
    rtol: float = 1e-10,
    atol: float = 1e-10,
    cls: Optional[TrajectoryClass] = None,
) -> TrappingVerdict:
    """Long-time average of dx1/dt, with the trapped verdict.

    Periodic motions are integrated over exactly one period; asymptotic
    motions use the analytic limit u1(x2_infinity), which is exact.  Other
    classes raise :class:`PathologicalClassError`.
    """
    if cls is None:
        cls = classify(p0, profiles)
    if cls.kind == PERIODIC:
        traj = integrate(
            p0, cls.period, profiles, rtol=rtol, atol=atol, n_samples=3
        )
        drift = float((traj.states[-1, 0] - traj.states[0, 0]) / cls.period)
        return TrappingVerdict(
            drift=drift, trapped=bool(abs(drift) < tol), method="PeriodAverage",
            tolerance=tol,
        )
    if cls.kind == ASYMPTOTIC:
        drift = float(profiles.zonal.u1(cls.x2_limit))
        return TrappingVerdict(
            drift=drift, trapped=bool(abs(drift) < tol), method="AsymptoticLimit",
            tolerance=tol,
        )
    raise PathologicalClassError(
        f"drift is defined for Periodic or Asymptotic motions, not {cls.kind}"
    )


def critper_verdict(
    p0: PhasePoint,
    profiles: Profiles,
    tol: float = DEFAULT_TRAPPED_TOL,
    quad_rtol: float = 1e-9,
) -> TrappingVerdict:
    """Trapping verdict from the band-average quadrature alone.

    Converts the band average into drift units through
    drift = -2 sign(b' xi1) / (xi1 T) * critper, so the verdict is directly
    comparable with (and cross-checked against) the period-average route.
    Only periodic latitude motion qualifies.
    """
    from .reduced_phase import bracket, period

    tau = float(rossby_symbol(p0.xi1, p0.x2, p0.xi2, profiles))
    rep = bracket(tau, p0.xi1, p0.x2, profiles)
    value = critper(tau, p0.xi1, rep, profiles, rtol=quad_rtol)
    t_per = period(rep, profiles, rtol=quad_rtol)
    sign = math.copysign(1.0, profiles.coriolis.db(p0.x2) * p0.xi1)
    drift = -2.0 * sign * value / (p0.xi1 * t_per)
    return TrappingVerdict(
        drift=float(drift), trapped=bool(abs(drift) < tol),
        method="CritperQuadrature", tolerance=tol,
    )


def critper(
    tau: float,
    xi1: float,
    report: PotentialReport,
    profiles: Profiles,
    rtol: float = 1e-9,
) -> float:
    """Band average whose vanishing characterizes trapped periodic rays.

    Evaluates integral of [xi1^2 - (tau/xi1) b'(y) / (2 ((tau/xi1) - u1(y))^2)]
    / sqrt(V) over the allowed band, with the same endpoint treatment as the
    period quadrature.  Its sign convention satisfies
    drift * T = -2 sign(b' xi1) / xi1 * critper.
    """
    if not report.periodic:
        raise NotPeriodicError("critper needs two simple turning points")
    zon, cor = profiles.zonal, profiles.coriolis
    c = tau / xi1

    def g(y):
        d = c - zon.u1(y)
        return xi1 * xi1 - c * cor.db(y) / (2.0 * d * d)

    def v(y):
        return potential(tau, xi1, y, profiles)

    dva = abs(potential_derivative(tau, xi1, report.xmin, profiles))
    dvb = abs(potential_derivative(tau, xi1, report.xmax, profiles))
    return endpoint_quad(g, v, report.xmin, report.xmax, rtol=rtol, dv_a=dva, dv_b=dvb)


def _rho_window(profiles: Profiles) -> Tuple[float, float]:
    """Interval (y1, y2) where the current is negative, ending at an
    order-one zero with positive slope.

    y2 is the first interior sign-change zero of u1 with u1' > 0 whose left
    neighbourhood has u1 < 0; y1 is the previous zero of u1 (interior
    sign change or the support edge).
    """
    zon = profiles.zonal
    s_lo, s_hi = zon.support
    if not s_hi > s_lo:
        raise InvalidArgumentError("current is identically zero: no negative window")
    interior = zeros_in(zon.u1, (s_lo - 1e-9, s_hi + 1e-9), tol=1e-13)
    y2 = None
    for z in interior:
        if zon.du1(z) > 0.0:
            y2 = z
            break
    if y2 is None:
        raise InvalidArgumentError(
            "current has no interior zero with positive slope; "
            "choose a profile that is negative somewhere"
        )
    left = [z for z in interior if z < y2 - 1e-12]
    y1 = max(left) if left else s_lo
    return y1, y2


def rho_threshold(profiles: Profiles, n_grid: int = 20001) -> Tuple[float, float, float]:
    """(threshold, y1, y2): threshold = max(0, inf rho) over the window (y1, y2)."""
    y1, y2 = _rho_window(profiles)
    pad = 1e-9 * (y2 - y1)
    ys = np.linspace(y1 + pad, y2 - pad, n_grid)
    vals = np.asarray(rho(ys, profiles), dtype=float)
    vals = vals[np.isfinite(vals)]
    inf_rho = float(np.min(vals))
    return max(0.0, inf_rho), y1, y2


def h_of_xi1(xi1: float, profiles: Profiles, n_grid: int = 20001) -> float:
    """Supremum latitude below y2 where rho stays at or below xi1^2.

    Scans rho on a dense grid over the negative-current window and refines
    the last crossing by bisection.  Requires xi1^2 to clear the window
    infimum of rho; otherwise the sublevel set is empty.
    """
    thresh, y1, y2 = rho_threshold(profiles, n_grid)
    target = xi1 * xi1
    if target < thresh:
        raise BelowThresholdError(
            f"xi1^2 = {target} is below the rho infimum {thresh}"
        )
    pad = 1e-9 * (y2 - y1)
    ys = np.linspace(y1 + pad, y2 - pad, n_grid)
    vals = np.asarray(rho(ys, profiles), dtype=float) - target
    below = np.flatnonzero(np.isfinite(vals) & (vals <= 0.0))
    if below.size == 0:
        raise BelowThresholdError(
            f"rho never dips to xi1^2 = {target} on the window ({y1}, {y2})"
        )
    i = int(below[-1])
    a, b = ys[i], min(ys[i] + (ys[1] - ys[0]), y2 - pad)

    def f(y):
        return float(rho(float(y), profiles)) - target

    while b - a > 1e-13:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if f(m) <= 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def lambda_sing_point(
    x1_0: float,
    xi1: float,
    x2_0: float,
    profiles: Profiles,
    expected_sign: int = -1,
) -> PhasePoint:
    """Seed of a trapped, latitude-convergent ray on the zero-energy surface.

    Returns (x1_0, xi1, x2_0, +sqrt(rho(x2_0) - xi1^2)); by construction the
    energy of the returned point vanishes to machine precision.  x2_0 must
    lie between h(xi1) and the terminal zero y2 of the current, and xi1 is
    expected on the side (default negative) that makes dx2/dt positive at the
    seed, so the ray climbs monotonically toward y2.
    """
    if expected_sign not in (-1, 1):
        raise InvalidArgumentError("expected_sign must be -1 or +1")
    if xi1 * expected_sign <= 0.0:
        raise InvalidArgumentError(
            f"xi1 = {xi1} is on the wrong side; expected sign {expected_sign}"
        )
    h = h_of_xi1(xi1, profiles)
    _, _, y2 = rho_threshold(profiles)
    if not (h < x2_0 < y2):
        raise OutOfWindowError(
            f"x2_0 = {x2_0} outside the admissible window ({h}, {y2})"
        )
    r = float(rho(x2_0, profiles))
    if r < xi1 * xi1:
        raise OutOfWindowError(
            f"rho(x2_0) = {r} < xi1^2 = {xi1 * xi1}: no real xi2 on the surface"
        )
    p = PhasePoint(x1_0, xi1, x2_0, math.sqrt(r - xi1 * xi1))
    db = profiles.coriolis.db(x2_0)
    if -db * p.xi1 * p.xi2 <= 0.0:
        raise OutOfWindowError(
            "seed moves away from the terminal zero (dx2/dt <= 0); "
            "flip expected_sign for this rotation profile"
        )
    return p


def lambda_per_setup(
    profiles: Profiles,
    xi1_interval: Tuple[float, float] = (1.0, 50.0),
    eta_candidates: Sequence[float] = (0.4, 0.2, 0.1, 0.05, 0.025),
    n_check: int = 2001,
) -> LambdaPerSetup:
    """Choose the neighbourhood half-width for the periodic construction.

    Picks the largest candidate eta with sup u1'' < -3 on (-eta, eta) and
    with the convexity surrogate H'' >= 1/2 on the same interval at the left
    end of the xi1 interval.  Requires beta = 1 and 0 < u1(0) < 2/3.
    """
    zon, cor = profiles.zonal, profiles.coriolis
    if cor.beta != 1.0:
        raise InvalidArgumentError("periodic construction is set on the beta = 1 plane")
    u0 = float(zon.u1(0.0))
    if not 0.0 < u0 < 2.0 / 3.0:
        raise InvalidArgumentError(f"u1(0) = {u0} outside (0, 2/3)")
    xi_lo = xi1_interval[0]
    for eta in eta_candidates:
        ys = np.linspace(-eta, eta, n_check)
        d2 = np.asarray(zon.d2u1(ys), dtype=float)
        if np.max(d2) >= -3.0:
            continue
        h2 = (2.0 * xi_lo * xi_lo - 8.0 * ys * ys) / (xi_lo * xi_lo + ys * ys) ** 3 - d2
        if np.min(h2) < 0.5:
            continue
        delta = 1.0 - eta * eta / 8.0
        return LambdaPerSetup(
            eta=eta, delta=delta, u1_at_zero=u0, xi1_interval=tuple(xi1_interval)
        )
    raise InvalidArgumentError(
        "no candidate eta satisfies sup u1'' < -3 and the convexity surrogate"
    )


def lambda_per_band(setup: LambdaPerSetup, xi1: float, profiles: Profiles):
    """Turning points of the band inside (-eta, eta) from the auxiliary H."""
    zon = profiles.zonal
    tau = setup.tau(xi1)
    c = tau / xi1

    def hfun(y):
        return c - 1.0 / (xi1 * xi1 + y * y) - float(zon.u1(y))

    eta = setup.eta
    if hfun(0.0) >= 0.0 or hfun(-eta) <= 0.0 or hfun(eta) <= 0.0:
        raise NoTurningPointsError(
            f"H has no sign change in the half-intervals at xi1 = {xi1}"
        )
    xmin = _bisect_root(hfun, -eta, 0.0, 1e-14)
    xmax = _bisect_root(hfun, 0.0, eta, 1e-14)
    return tau, xmin, xmax


def _bisect_root(f, a, b, tol):
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoTurningPointsError("no sign change on the half-interval")
    while b - a > tol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def lambda_per_G(
    xi1: float, setup: LambdaPerSetup, profiles: Profiles, rtol: float = 1e-9
) -> float:
    """Band average G along the periodic-construction energy rule.

    Same quadrature as :func:`critper` with b' = 1 on the beta = 1 plane;
    a root of G marks a trapped periodic seed.
    """
    if xi1 < setup.xi1_interval[0]:
        raise InvalidArgumentError(f"xi1 = {xi1} below the search interval")
    zon = profiles.zonal
    tau, xmin, xmax = lambda_per_band(setup, xi1, profiles)
    c = tau / xi1

    def g(y):
        d = c - zon.u1(y)
        return xi1 * xi1 - c / (2.0 * d * d)

    def v(y):
        return potential(tau, xi1, y, profiles)

    dva = abs(potential_derivative(tau, xi1, xmin, profiles))
    dvb = abs(potential_derivative(tau, xi1, xmax, profiles))
    return endpoint_quad(g, v, xmin, xmax, rtol=rtol, dv_a=dva, dv_b=dvb)


def lambda_per_root(
    setup: LambdaPerSetup,
    profiles: Profiles,
    bracket_lo: float = None,
    bracket_hi: float = None,
    width: float = 1e-6,
) -> Tuple[float, float, float]:
    """Bracket and bisect the sign-change root of G.

    Returns (root, G_slope_estimate, bracket_width).  The slope is a central
    finite difference at the root, reported so callers can check the
    genericity condition G' != 0 rather than assume it.
    """
    lo = setup.xi1_interval[0] if bracket_lo is None else bracket_lo
    hi = setup.xi1_interval[1] if bracket_hi is None else bracket_hi
    g_lo = lambda_per_G(lo, setup, profiles)
    g_hi = lambda_per_G(hi, setup, profiles)
    if not (g_lo > 0.0 > g_hi or g_lo < 0.0 < g_hi):
        raise NoTurningPointsError(
            f"G does not change sign on [{lo}, {hi}]: G({lo}) = {g_lo}, G({hi}) = {g_hi}"
        )
    a, b, ga = lo, hi, g_lo
    while b - a > width:
        m = 0.5 * (a + b)
        gm = lambda_per_G(m, setup, profiles)
        if gm == 0.0:
            a = b = m
            break
        if ga * gm < 0.0:
            b = m
        else:
            a, ga = m, gm
    root = 0.5 * (a + b)
    d = max(10.0 * width, 1e-5)
    slope = (
        lambda_per_G(root + d, setup, profiles) - lambda_per_G(root - d, setup, profiles)
    ) / (2.0 * d)
    return root, slope, b - a


@dataclass(frozen=True)
class ScanRow:
    """One grid point of a trapping scan; ``error`` is empty on success."""

    xi1: float
    x2_0: float
    xi2_0: float
    tau: float
    kind: str
    margin: float
    drift: float
    trapped: bool
    error: str = ""


def scan_lambda(
    xi1_values: Sequence[float],
    x2_values: Sequence[float],
    xi2_values: Sequence[float],
    profiles: Profiles,
    trapped_tol: float = DEFAULT_TRAPPED_TOL,
    tol_sigma: float = 1e-6,
    x1_0: float = 0.0,
) -> List[ScanRow]:
    """Map the trapped set over a (xi1, x2_0, xi2_0) grid.

    Deterministic row order (grid order, xi1 outermost); per-point failures
    are recorded in the row's error field and never abort the scan.
    """
    rows: List[ScanRow] = []
    for xi1 in xi1_values:
        for x2_0 in x2_values:
            for xi2_0 in xi2_values:
                rows.append(
                    scan_point(xi1, x2_0, xi2_0, profiles, trapped_tol, tol_sigma, x1_0)
                )
    return rows


def scan_point(
    xi1, x2_0, xi2_0, profiles, trapped_tol=DEFAULT_TRAPPED_TOL, tol_sigma=1e-6, x1_0=0.0
) -> ScanRow:
    """Classify and drift-test one grid point, capturing errors into the row."""
    try:
        p = PhasePoint(x1_0, xi1, x2_0, xi2_0)
        tau = float(rossby_symbol(xi1, x2_0, xi2_0, profiles))
    except Exception as exc:  # noqa: BLE001 - per-row capture is the contract
        return ScanRow(xi1, x2_0, xi2_0, float("nan"), "", float("nan"),
                       float("nan"), False, type(exc).__name__)
    try:
        cls = classify(p, profiles, tol_sigma=tol_sigma)
    except Exception as exc:  # noqa: BLE001
        return ScanRow(xi1, x2_0, xi2_0, tau, "", float("nan"), float("nan"),
                       False, type(exc).__name__)
    margin = cls.margin if cls.margin is not None else float("nan")
    try:
        verdict = drift_velocity(p, profiles, tol=trapped_tol, cls=cls)
        return ScanRow(xi1, x2_0, xi2_0, tau, cls.kind, margin,
                       verdict.drift, verdict.trapped)
    except PathologicalClassError as exc:
        return ScanRow(xi1, x2_0, xi2_0, tau, cls.kind, margin, float("nan"),
                       False, type(exc).__name__)
    except Exception as exc:  # noqa: BLE001
        return ScanRow(xi1, x2_0, xi2_0, tau, cls.kind, margin, float("nan"),
                       False, type(exc).__name__)
