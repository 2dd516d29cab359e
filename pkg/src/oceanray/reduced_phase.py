"""The reduced (x2, xi2) problem: effective potential and bracket analysis.

At fixed energy tau and frequency xi1 the latitude motion lives where

    V(x2) = b'(x2) xi1 / (tau - u1(x2) xi1) - xi1^2 - b^2(x2)

is nonnegative; the energy surface is the graph pair (x2, +-sqrt(V)).  The
bracket [xmin, xmax] around a start latitude is bounded either by zeros of V
(turning points) or by roots of the denominator tau - u1 xi1 (resonant
latitudes, where V blows up).  Endpoint kinds drive the trajectory taxonomy:

* SIMPLE_ZERO       V = 0, V' != 0          turning point, reached in finite time
* DEGENERATE_ZERO   V = 0, V' = 0           equilibrium reached in infinite time
* SIMPLE_POLE       denominator root, u1' != 0 and b' != 0 there
* HIGHER_POLE       denominator root with u1' = 0 or b' = 0 there
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ForbiddenRegionError,
    InvalidArgumentError,
    NotPeriodicError,
    SingularDenominatorError,
)
from .profiles import Profiles
from .quadrature import endpoint_quad

__all__ = [
    "SIMPLE_ZERO",
    "DEGENERATE_ZERO",
    "SIMPLE_POLE",
    "HIGHER_POLE",
    "PotentialReport",
    "potential",
    "potential_derivative",
    "energy_surface_points",
    "bracket",
    "period",
    "rho",
]

SIMPLE_ZERO = "simple_zero"
DEGENERATE_ZERO = "degenerate_zero"
SIMPLE_POLE = "simple_pole"
HIGHER_POLE = "higher_pole_or_bprime_zero"

DEFAULT_TOL_DEGENERATE = 1e-8
_ENDPOINT_TOL = 1e-12


def potential(tau: float, xi1: float, x2, profiles: Profiles):
    """Effective potential value; raises at (numerically) resonant latitudes.

    Array input skips the singularity guard and may return inf; scalar input
    raises :class:`SingularDenominatorError` when |tau - u1 xi1| falls below
    1e-14 times the natural scale.
    """
    if np.any(np.asarray(xi1) == 0.0):
        raise InvalidArgumentError("potential undefined at xi1 = 0")
    zon, cor = profiles.zonal, profiles.coriolis
    den = tau - zon.u1(x2) * xi1
    b = cor.b(x2)
    if not isinstance(x2, np.ndarray):
        scale = max(abs(tau), abs(xi1), 1.0)
        if abs(den) < 1e-14 * scale:
            raise SingularDenominatorError(
                f"potential singular at x2={x2}: tau - u1*xi1 = {den}"
            )
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return cor.db(x2) * xi1 / den - xi1 * xi1 - b * b


def potential_derivative(tau: float, xi1: float, x2, profiles: Profiles):
    """Analytic dV/dx2 away from resonant latitudes."""
    zon, cor = profiles.zonal, profiles.coriolis
    den = tau - zon.u1(x2) * xi1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return (
            xi1 * (cor.d2b(x2) * den + cor.db(x2) * zon.du1(x2) * xi1) / (den * den)
            - 2.0 * cor.b(x2) * cor.db(x2)
        )


@dataclass(frozen=True)
class PotentialReport:
    """Bracket of the classically allowed band around a start latitude."""

    tau: float
    xi1: float
    x2_0: float
    xmin: float
    xmax: float
    kind_min: str
    kind_max: str
    value: Callable  # V bound to (tau, xi1)
    derivative: Callable  # V' bound to (tau, xi1)

    @property
    def degenerate(self) -> bool:
        """True when the band collapses to the start point itself."""
        return self.xmax - self.xmin <= 4.0 * _ENDPOINT_TOL

    @property
    def periodic(self) -> bool:
        return self.kind_min == SIMPLE_ZERO and self.kind_max == SIMPLE_ZERO


def energy_surface_points(tau: float, xi1: float, x2_grid, profiles: Profiles):
    """Sample the energy surface over a latitude grid.

    Returns an (n, 4) array of rows (x2, +sqrt(V), -sqrt(V), V) restricted to
    grid points where V >= 0 and finite.
    """
    grid = np.asarray(x2_grid, dtype=float)
    v = potential(tau, xi1, grid, profiles)
    v = np.asarray(v, dtype=float)
    mask = np.isfinite(v) & (v >= 0.0)
    x = grid[mask]
    vv = v[mask]
    root = np.sqrt(vv)
    return np.column_stack([x, root, -root, vv])


def _march_out(vfun, denfun, x0, direction, step, span_cap, feature_edge):
    """March from x0 until V or the denominator changes sign.

    Returns (kind, lo, hi) where kind is "zero" or "pole" and (lo, hi) is the
    bracketing cell, or None when nothing was found within the span cap.
    Inside the feature window (where the current varies) the march uses the
    fixed fine step in vectorized blocks; past ``feature_edge`` the current
    is identically zero, the denominator is constant and the potential
    decays monotonically, so strides grow geometrically until the single
    far turning point is bracketed.
    """
    block = 512
    start = x0
    v_prev = vfun(np.array([x0]))[0]
    den_prev = denfun(np.array([x0]))[0]
    if v_prev < 0.0:
        v_prev = 0.0
    travelled = 0.0
    while travelled < span_cap:
        if direction * (start - feature_edge) > 0:
            # geometric phase: stride doubling outside the feature window
            stride = step
            prev_x, pv, pd = start, v_prev, den_prev
            while travelled < span_cap:
                x = prev_x + direction * stride
                v = vfun(np.array([x]))[0]
                d = denfun(np.array([x]))[0]
                if d == 0.0 or pd * d < 0.0:
                    return "pole", prev_x, x
                if v < 0.0 <= pv or (pv > 0.0 and v == 0.0):
                    return "zero", prev_x, x
                travelled += stride
                stride *= 2.0
                prev_x, pv, pd = x, v, d
            return None
        offs = step * np.arange(1, block + 1)
        xs = start + direction * offs
        vs = vfun(xs)
        dens = denfun(xs)
        prev_x = start
        pv, pd = v_prev, den_prev
        for i in range(block):
            if dens[i] == 0.0 or pd * dens[i] < 0.0:
                return "pole", prev_x, xs[i]
            if vs[i] < 0.0 <= pv or (pv > 0.0 and vs[i] == 0.0):
                return "zero", prev_x, xs[i]
            prev_x, pv, pd = xs[i], vs[i], dens[i]
        start = xs[-1]
        v_prev, den_prev = vs[-1], dens[-1]
        travelled += step * block
    return None


def bracket(
    tau: float,
    xi1: float,
    x2_0: float,
    profiles: Profiles,
    step: float = 1e-3,
    tol_degenerate: float = DEFAULT_TOL_DEGENERATE,
    span_cap: float = 1e15,
) -> PotentialReport:
    """Locate the allowed band [xmin, xmax] containing x2_0 and label its ends.

    Marches outward from x2_0 (initial step ``step``) until V changes sign or
    the denominator tau - u1 xi1 changes sign, then refines each endpoint by
    bisection to width 1e-12.  The march is repeated with halved steps until
    the bracket stabilizes twice, which protects against stepping over thin
    forbidden slivers.
    """
    zon = profiles.zonal

    def vfun(x):
        return np.asarray(potential(tau, xi1, x, profiles), dtype=float)

    def denfun(x):
        return tau - np.asarray(zon.u1(x), dtype=float) * xi1

    v0 = vfun(np.array([x2_0]))[0]
    if not np.isfinite(v0) or v0 < -1e-12:
        raise ForbiddenRegionError(
            f"V(x2_0={x2_0}) = {v0} < 0: start lies in the forbidden region"
        )

    # outside this window the current vanishes and the rotation profile has
    # no critical points, so the potential varies monotonically
    s_lo, s_hi = zon.support
    crits = profiles.coriolis.critical_points
    pad = 2.0
    edge_hi = max([s_hi, x2_0, *crits]) + pad
    edge_lo = min([s_lo, x2_0, *crits]) - pad

    def march(step_size):
        ends = []
        for direction, edge in ((-1.0, edge_lo), (1.0, edge_hi)):
            found = _march_out(vfun, denfun, x2_0, direction, step_size, span_cap, edge)
            if found is None:
                raise ForbiddenRegionError(
                    f"no bracket endpoint within {span_cap} of x2_0={x2_0}"
                )
            kind, lo, hi = found
            if kind == "zero":
                e = _refine_zero(vfun, lo, hi)
            else:
                e = _refine_sign_change(denfun, lo, hi)
            ends.append((kind, e))
        return ends

    prev = None
    stable = 0
    s = step
    ends = march(s)
    for _ in range(10):
        if prev is not None:
            if (
                abs(ends[0][1] - prev[0][1]) < 1e-10
                and abs(ends[1][1] - prev[1][1]) < 1e-10
            ):
                stable += 1
                if stable >= 2:
                    break
            else:
                stable = 0
        prev = ends
        s *= 0.5
        ends = march(s)

    (kind_lo, xmin), (kind_hi, xmax) = ends
    kind_min = _label(kind_lo, xmin, tau, xi1, profiles, tol_degenerate)
    kind_max = _label(kind_hi, xmax, tau, xi1, profiles, tol_degenerate)
    return PotentialReport(
        tau=tau,
        xi1=xi1,
        x2_0=x2_0,
        xmin=min(xmin, x2_0),
        xmax=max(xmax, x2_0),
        kind_min=kind_min,
        kind_max=kind_max,
        value=lambda y: potential(tau, xi1, y, profiles),
        derivative=lambda y: potential_derivative(tau, xi1, y, profiles),
    )


def _refine_zero(vfun, lo, hi):
    """Bisect the V >= 0 / V < 0 transition to width 1e-12 (or to the last
    representable midpoint for far-out endpoints)."""
    a, b = lo, hi
    while abs(b - a) > _ENDPOINT_TOL:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if vfun(np.array([m]))[0] >= 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _refine_sign_change(fn, lo, hi):
    a, b = lo, hi
    fa = fn(np.array([a]))[0]
    while abs(b - a) > _ENDPOINT_TOL:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = fn(np.array([m]))[0]
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _label(kind, endpoint, tau, xi1, profiles, tol_degenerate):
    zon, cor = profiles.zonal, profiles.coriolis
    if kind == "zero":
        dv = potential_derivative(tau, xi1, endpoint, profiles)
        return SIMPLE_ZERO if abs(dv) > tol_degenerate else DEGENERATE_ZERO
    du1 = zon.du1(endpoint)
    db = cor.db(endpoint)
    if abs(du1) > tol_degenerate and abs(db) > tol_degenerate:
        return SIMPLE_POLE
    return HIGHER_POLE


def period(report: PotentialReport, profiles: Profiles, rtol: float = 1e-9) -> float:
    """Latitude oscillation period from the bracket quadrature.

    Time advances along the band according to
    |dt/dx2| = |b' xi1| / (2 (tau - u1 xi1)^2 sqrt(V)); one full period sweeps
    the band twice.  The half factor follows from dx2/dt of the ray system;
    cross-checked against direct integration in the tests.
    """
    if not report.periodic:
        raise NotPeriodicError(
            f"period needs two simple turning points, got ({report.kind_min}, {report.kind_max})"
        )
    zon, cor = profiles.zonal, profiles.coriolis
    tau, xi1 = report.tau, report.xi1

    def g(y):
        den = tau - zon.u1(y) * xi1
        return abs(cor.db(y) * xi1) / (den * den)

    def v(y):
        return potential(tau, xi1, y, profiles)

    dva = abs(potential_derivative(tau, xi1, report.xmin, profiles))
    dvb = abs(potential_derivative(tau, xi1, report.xmax, profiles))
    return endpoint_quad(g, v, report.xmin, report.xmax, rtol=rtol, dv_a=dva, dv_b=dvb)


def rho(x2, profiles: Profiles):
    """Auxiliary function -b'/u1 - b^2 controlling zero-energy surfaces.

    Defined where the current does not vanish; on the zero-energy surface the
    identity xi2^2 = rho(x2) - xi1^2 holds.
    """
    zon, cor = profiles.zonal, profiles.coriolis
    u = zon.u1(x2)
    if not isinstance(x2, np.ndarray):
        if u == 0.0:
            raise SingularDenominatorError(f"rho singular where u1 = 0 (x2={x2})")
        b = cor.b(x2)
        return -cor.db(x2) / u - b * b
    b = cor.b(x2)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return -cor.db(x2) / u - b * b
