"""Trajectory taxonomy in the reduced phase space.

Every initial datum with xi1 != 0 falls into one of six bins:

* Periodic      both bracket endpoints are simple turning points
* FixedPoint    the allowed band degenerates to the start latitude
* Stopping      the reachable endpoint is a degenerate zero of V
* Asymptotic    the reachable endpoint is a simple resonant pole (b' != 0)
* Singular      the reachable endpoint is a higher-order pole or a pole
                where b' vanishes
* NearSigma     the datum sits within tol_sigma of the pathological set, so
                the periodic/asymptotic call cannot be trusted numerically

Periodic and Asymptotic fill the phase space up to a codimension-1 set; the
margin machinery below measures the distance to that set along the three
analytic conditions that characterize it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import PhasePoint, Trajectory, rossby_symbol
from .errors import InsufficientTailError
from .profiles import Profiles, zeros_in
from .reduced_phase import (
    DEGENERATE_ZERO,
    HIGHER_POLE,
    SIMPLE_POLE,
    SIMPLE_ZERO,
    PotentialReport,
    bracket,
    period,
)

__all__ = [
    "TrajectoryClass",
    "AsymptoticRates",
    "MarginReport",
    "classify",
    "sigma_margin",
    "asymptotic_rates",
]

DEFAULT_TOL_SIGMA = 1e-6

PERIODIC = "Periodic"
FIXED_POINT = "FixedPoint"
STOPPING = "Stopping"
ASYMPTOTIC = "Asymptotic"
SINGULAR = "Singular"
NEAR_SIGMA = "NearSigma"


@dataclass(frozen=True)
class TrajectoryClass:
    """Outcome of the taxonomy decision for one initial datum."""

    kind: str
    period: Optional[float] = None
    xmin: Optional[float] = None
    xmax: Optional[float] = None
    x2_limit: Optional[float] = None
    approach_side: Optional[str] = None
    sigma_condition: Optional[str] = None
    margin: Optional[float] = None
    endpoint_kinds: Optional[Tuple[str, str]] = None

    @property
    def headline(self) -> float:
        """The period for periodic motions, the limit latitude otherwise (nan if none)."""
        if self.kind == PERIODIC:
            return self.period
        if self.x2_limit is not None:
            return self.x2_limit
        return float("nan")


@dataclass(frozen=True)
class MarginReport:
    """Distance of an initial datum to the pathological set.

    ``condition`` names the closest of the three analytic characterizations:
    "b_critical" (energy surface through a rotation-profile critical point),
    "potential_equilibrium" (the V = V' = 0 two-equation system), or
    "current_extremum" (resonance with a zero of u1' inside the support).
    """

    value: float
    condition: str
    location: Optional[float] = None


@dataclass(frozen=True)
class AsymptoticRates:
    """Late-time power-law fit of an asymptotic trajectory tail."""

    c1: float
    c2: float
    exponent_x2: float
    r2_x2: float
    r2_xi2: float


def _fixed_point_residuals(tau, xi1, x2, profiles: Profiles):
    """Residual pair of the equilibrium system at candidate latitude x2.

    r1 is the energy mismatch tau - tau_fp(x2) for the surface through
    (x2, 0); r2 is the stationarity residual, i.e. d(xi2)/dt at (x2, 0)
    divided by xi1 (equivalently proportional to V' once V = 0).
    """
    zon, cor = profiles.zonal, profiles.coriolis
    b = cor.b(x2)
    db = cor.db(x2)
    d = xi1 * xi1 + b * b
    r1 = tau - (db * xi1 / d + zon.u1(x2) * xi1)
    r2 = -zon.du1(x2) + 2.0 * b * db * db / (d * d) - cor.d2b(x2) / d
    return r1, r2


def _margin_window(profiles: Profiles, x2_0: float) -> Tuple[float, float]:
    s_lo, s_hi = profiles.zonal.support
    w = max(8.0, 4.0 * max(abs(s_lo), abs(s_hi)), abs(x2_0) + 4.0)
    return -w, w


def sigma_margin(
    p0: PhasePoint, profiles: Profiles, n_grid: int = 4001
) -> MarginReport:
    """Smallest distance to the pathological set along its three conditions.

    Report-only: a small value flags that the taxonomy decision for ``p0``
    is fragile, it does not prove membership in the measure-zero set.
    """
    tau = float(rossby_symbol(p0.xi1, p0.x2, p0.xi2, profiles))
    xi1 = p0.xi1
    zon, cor = profiles.zonal, profiles.coriolis

    best = math.inf
    cond = "potential_equilibrium"
    loc = None

    # (a) surfaces through critical points of the rotation profile
    for xc in cor.critical_points:
        val = abs(tau - xi1 * zon.u1(xc))
        if val < best:
            best, cond, loc = val, "b_critical", xc

    # (c) resonance with interior extrema of the current
    s_lo, s_hi = zon.support
    if s_hi > s_lo:
        for y in zeros_in(zon.du1, (s_lo, s_hi), tol=1e-10):
            val = abs(tau - xi1 * zon.u1(y))
            if val < best:
                best, cond, loc = val, "current_extremum", y

    # (b) the two-equation equilibrium system, minimized over latitude
    lo, hi = _margin_window(profiles, p0.x2)
    grid = np.linspace(lo, hi, n_grid)
    r1, r2 = _fixed_point_residuals(tau, xi1, grid, profiles)
    obj = np.hypot(r1, r2)
    i = int(np.argmin(obj))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n_grid - 1)]

    def scalar_obj(x):
        rr1, rr2 = _fixed_point_residuals(tau, xi1, float(x), profiles)
        return math.hypot(rr1, rr2)

    res = minimize_scalar(scalar_obj, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    val = min(float(obj[i]), float(res.fun))
    if val < best:
        best, cond = val, "potential_equilibrium"
        loc = float(res.x) if res.fun <= obj[i] else float(grid[i])

    return MarginReport(value=best, condition=cond, location=loc)


def classify(
    p0: PhasePoint,
    profiles: Profiles,
    tol_sigma: float = DEFAULT_TOL_SIGMA,
    tol_degenerate: float = 1e-8,
    bracket_step: float = 1e-3,
    quad_rtol: float = 1e-9,
) -> TrajectoryClass:
    """Decide the taxonomy bin of one initial datum.

    Runs the bracket analysis at the datum's own energy, reads the class off
    the endpoint kinds, and demotes periodic/asymptotic calls to NearSigma
    when the margin to the pathological set is below ``tol_sigma``.  The
    reachable endpoint is the one approached given the initial sign of
    dx2/dt, with a single turning-point bounce allowed.
    """
    tau = float(rossby_symbol(p0.xi1, p0.x2, p0.xi2, profiles))
    rep = bracket(
        tau, p0.xi1, p0.x2, profiles, step=bracket_step, tol_degenerate=tol_degenerate
    )
    kinds = (rep.kind_min, rep.kind_max)

    if rep.degenerate:
        return TrajectoryClass(
            kind=FIXED_POINT, x2_limit=p0.x2, endpoint_kinds=kinds, margin=0.0
        )

    if rep.periodic:
        margin = sigma_margin(p0, profiles)
        if margin.value < tol_sigma:
            return TrajectoryClass(
                kind=NEAR_SIGMA,
                sigma_condition=margin.condition,
                margin=margin.value,
                endpoint_kinds=kinds,
            )
        t_per = period(rep, profiles, rtol=quad_rtol)
        return TrajectoryClass(
            kind=PERIODIC,
            period=t_per,
            xmin=rep.xmin,
            xmax=rep.xmax,
            endpoint_kinds=kinds,
            margin=margin.value,
        )

    side = _terminal_side(p0, rep, profiles)
    terminal_kind = rep.kind_min if side == "left" else rep.kind_max
    x2_inf = rep.xmin if side == "left" else rep.xmax

    if terminal_kind == DEGENERATE_ZERO:
        return TrajectoryClass(
            kind=STOPPING, x2_limit=x2_inf, approach_side=side, endpoint_kinds=kinds,
            margin=0.0,
        )
    if terminal_kind == HIGHER_POLE:
        return TrajectoryClass(
            kind=SINGULAR, x2_limit=x2_inf, approach_side=side, endpoint_kinds=kinds,
            margin=0.0,
        )

    margin = sigma_margin(p0, profiles)
    if margin.value < tol_sigma:
        return TrajectoryClass(
            kind=NEAR_SIGMA,
            sigma_condition=margin.condition,
            margin=margin.value,
            endpoint_kinds=kinds,
        )
    return TrajectoryClass(
        kind=ASYMPTOTIC,
        x2_limit=x2_inf,
        approach_side=side,
        endpoint_kinds=kinds,
        margin=margin.value,
    )


def _terminal_side(p0: PhasePoint, rep: PotentialReport, profiles: Profiles) -> str:
    """Endpoint ultimately approached, allowing one bounce at a simple zero."""
    db = profiles.coriolis.db(p0.x2)
    v2 = -db * p0.xi1 * p0.xi2  # sign of dx2/dt
    if v2 > 0.0:
        side = "right"
    elif v2 < 0.0:
        side = "left"
    else:
        # starting on a turning point: motion enters the interior
        side = "right" if abs(p0.x2 - rep.xmin) <= abs(p0.x2 - rep.xmax) else "left"
    kind = rep.kind_min if side == "left" else rep.kind_max
    if kind == SIMPLE_ZERO:
        side = "right" if side == "left" else "left"
    return side


def asymptotic_rates(
    traj: Trajectory, x2_inf: float, profiles: Profiles
) -> AsymptoticRates:
    """Fit the late-time laws x2 ~ x2_inf + C1 t^-2 and xi2 ~ C2 t.

    Uses the final decade of the trajectory; raises
    :class:`InsufficientTailError` when the tail is too short or does not
    behave asymptotically (latitude gap not shrinking, |xi2| not growing),
    e.g. when a periodic trajectory is passed in by mistake.
    """
    t = traj.times
    if t.size < 16 or t[-1] <= 0.0:
        raise InsufficientTailError("trajectory too short for a tail fit")
    t_end = t[-1]
    mask = t >= 0.1 * t_end
    tt = t[mask]
    x2 = traj.states[mask, 2]
    xi2 = traj.states[mask, 3]
    if tt.size < 8:
        raise InsufficientTailError("fewer than 8 samples in the final decade")

    gap = np.abs(x2 - x2_inf)
    if gap[-1] > 0.5 * gap[0] or abs(xi2[-1]) < 2.0 * abs(xi2[0]):
        raise InsufficientTailError(
            "tail is not asymptotic: latitude gap or frequency growth check failed"
        )
    if np.any(gap <= 0.0):
        raise InsufficientTailError("latitude gap vanished; cannot fit a power law")

    logt = np.log(tt)
    logg = np.log(gap)
    slope, intercept = np.polyfit(logt, logg, 1)
    pred = slope * logt + intercept
    ss_res = float(np.sum((logg - pred) ** 2))
    ss_tot = float(np.sum((logg - np.mean(logg)) ** 2))
    r2_x2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    # the free-exponent fit validates the -2 law; the coefficient itself is
    # fitted in log space with the exponent pinned so slope error does not
    # leak into it
    sign = 1.0 if np.mean(x2 - x2_inf) >= 0 else -1.0
    c1 = sign * math.exp(float(np.mean(logg + 2.0 * logt)))

    a = np.vstack([tt, np.ones_like(tt)]).T
    (c2, _b2), res2, _, _ = np.linalg.lstsq(a, xi2, rcond=None)
    ss_tot2 = float(np.sum((xi2 - np.mean(xi2)) ** 2))
    ss_res2 = float(res2[0]) if res2.size else 0.0
    r2_xi2 = 1.0 - ss_res2 / ss_tot2 if ss_tot2 > 0 else 1.0

    return AsymptoticRates(
        c1=float(c1), c2=float(c2), exponent_x2=float(slope), r2_x2=r2_x2, r2_xi2=r2_xi2
    )
