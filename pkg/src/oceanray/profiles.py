"""Background fields: zonal current and Coriolis parameter.

A :class:`ZonalProfile` packages the zonal velocity ``u1(x2)`` together with
its first two derivatives and its compact support; a :class:`CoriolisProfile`
does the same for the rotation profile ``b(x2)``.  All evaluators accept
floats or numpy arrays and are exactly zero outside the support, not merely
small: the classification machinery downstream relies on true compact
support.

The standard test profiles are the smooth exponential bump
``exp(1 - 1/(1 - s**2))`` (closed-form derivatives, infinitely flat at the
support edges) and its signed variant ``scale * y * bump(y)`` which has an
order-one interior zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "ZonalProfile",
    "CoriolisProfile",
    "Profiles",
    "make_bump",
    "make_signed_zonal",
    "make_zero_zonal",
    "make_betaplane",
    "check_symbol_condition",
    "zeros_in",
]


@dataclass(frozen=True)
class ZonalProfile:
    """Zonal current u1(x2) with analytic first and second derivatives.

    ``support`` is the closed interval outside which all three evaluators
    return exactly 0.
    """

    u1: Callable
    du1: Callable
    d2u1: Callable
    support: Tuple[float, float]
    description: str = ""


@dataclass(frozen=True)
class CoriolisProfile:
    """Coriolis parameter b(x2) with derivatives.

    ``beta`` is set iff the profile is exactly linear, b(x2) = beta * x2.
    ``critical_points`` lists the (finitely many) zeros of b'.
    """

    b: Callable
    db: Callable
    d2b: Callable
    beta: Optional[float] = None
    critical_points: Tuple[float, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class Profiles:
    """The pair of background fields threaded through every computation."""

    zonal: ZonalProfile
    coriolis: CoriolisProfile


def _bump_core(y, center, halfwidth, amplitude, order):
    """Evaluate the standard bump or one of its first two derivatives.

    Scalar inputs take a math-module fast path; arrays are evaluated on the
    interior mask only so that points outside the support are exactly zero
    and the interior exponential never overflows.
    """
    if isinstance(y, np.ndarray):
        s = (y - center) / halfwidth
        out = np.zeros_like(s, dtype=float)
        m = np.abs(s) < 1.0
        if np.any(m):
            sm = s[m]
            one = 1.0 - sm * sm
            u = 1.0 / one
            f = amplitude * np.exp(1.0 - u)
            if order == 0:
                out[m] = f
            elif order == 1:
                out[m] = -2.0 * sm * u * u * f / halfwidth
            else:
                u2 = u * u
                out[m] = (
                    (-2.0 * u2 - 8.0 * sm * sm * u2 * u + 4.0 * sm * sm * u2 * u2)
                    * f
                    / (halfwidth * halfwidth)
                )
        return out
    s = (y - center) / halfwidth
    if not -1.0 < s < 1.0:
        return 0.0
    one = 1.0 - s * s
    u = 1.0 / one
    f = amplitude * math.exp(1.0 - u)
    if order == 0:
        return f
    if order == 1:
        return -2.0 * s * u * u * f / halfwidth
    u2 = u * u
    return (-2.0 * u2 - 8.0 * s * s * u2 * u + 4.0 * s * s * u2 * u2) * f / (halfwidth * halfwidth)


def make_bump(center: float, halfwidth: float, amplitude: float) -> ZonalProfile:
    """Smooth bump current: amplitude * exp(1 - 1/(1 - s^2)), s = (y-center)/halfwidth.

    The value at the center is exactly ``amplitude``; the profile and all its
    derivatives vanish outside ``[center - halfwidth, center + halfwidth]``.
    """
    if not halfwidth > 0:
        raise InvalidArgumentError(f"bump halfwidth must be positive, got {halfwidth}")

    def u1(y):
        return _bump_core(y, center, halfwidth, amplitude, 0)

    def du1(y):
        return _bump_core(y, center, halfwidth, amplitude, 1)

    def d2u1(y):
        return _bump_core(y, center, halfwidth, amplitude, 2)

    return ZonalProfile(
        u1=u1,
        du1=du1,
        d2u1=d2u1,
        support=(center - halfwidth, center + halfwidth),
        description=f"bump(center={center}, halfwidth={halfwidth}, amplitude={amplitude})",
    )


def make_signed_zonal(scale: float, halfwidth: float) -> ZonalProfile:
    """Signed current scale * y * bump(y; 0, halfwidth, 1).

    Negative on (-halfwidth, 0) for positive ``scale``, with an order-one zero
    at the origin where the slope equals ``scale``.  Flipping the sign of
    ``scale`` negates all three evaluators.
    """
    if scale == 0:
        raise InvalidArgumentError("signed zonal scale must be nonzero")
    if not halfwidth > 0:
        raise InvalidArgumentError(f"signed zonal halfwidth must be positive, got {halfwidth}")

    def u1(y):
        return scale * y * _bump_core(y, 0.0, halfwidth, 1.0, 0)

    def du1(y):
        return scale * (
            _bump_core(y, 0.0, halfwidth, 1.0, 0) + y * _bump_core(y, 0.0, halfwidth, 1.0, 1)
        )

    def d2u1(y):
        return scale * (
            2.0 * _bump_core(y, 0.0, halfwidth, 1.0, 1) + y * _bump_core(y, 0.0, halfwidth, 1.0, 2)
        )

    return ZonalProfile(
        u1=u1,
        du1=du1,
        d2u1=d2u1,
        support=(-halfwidth, halfwidth),
        description=f"signed(scale={scale}, halfwidth={halfwidth})",
    )


def make_zero_zonal() -> ZonalProfile:
    """The trivial current u1 = 0 (no convection)."""

    def zero(y):
        if isinstance(y, np.ndarray):
            return np.zeros_like(y, dtype=float)
        return 0.0

    return ZonalProfile(u1=zero, du1=zero, d2u1=zero, support=(0.0, 0.0), description="zero")


def make_betaplane(beta: float) -> CoriolisProfile:
    """Linear rotation profile b(x2) = beta * x2."""
    if beta == 0:
        raise InvalidArgumentError("betaplane slope must be nonzero")

    def b(y):
        return beta * y

    def db(y):
        if isinstance(y, np.ndarray):
            return np.full_like(y, beta, dtype=float)
        return beta

    def d2b(y):
        if isinstance(y, np.ndarray):
            return np.zeros_like(y, dtype=float)
        return 0.0

    return CoriolisProfile(
        b=b, db=db, d2b=d2b, beta=beta, critical_points=(), description=f"betaplane(beta={beta})"
    )


def check_symbol_condition(profile: CoriolisProfile, orders: int = 2, grid=None) -> dict:
    """Report sup |b^(alpha)| / (1 + b^2) over a grid, for alpha = 0..orders.

    The caller compares the ratios against a constant budget; this function
    only reports.
    """
    if grid is None:
        grid = np.linspace(-10.0, 10.0, 2001)
    grid = np.asarray(grid, dtype=float)
    b2 = np.asarray(profile.b(grid), dtype=float) ** 2
    evaluators = [profile.b, profile.db, profile.d2b]
    report = {}
    for alpha in range(min(orders, 2) + 1):
        vals = np.abs(np.asarray(evaluators[alpha](grid), dtype=float))
        report[alpha] = float(np.max(vals / (1.0 + b2)))
    return report


def zeros_in(fn: Callable, interval: Sequence[float], tol: float = 1e-12, cells: int = 10_000):
    """Locate sign-change zeros of ``fn`` on an interval.

    Scans a dense grid (``cells`` subintervals) and refines every strict sign
    change by bisection down to bracket width ``tol``.  A grid node where the
    function is exactly zero counts as a root only when the nearest nonzero
    neighbours on both sides have opposite signs; flat zero runs touching the
    interval boundary are skipped.  Tangential zeros (no sign change) are not
    detected; multiple roots inside one cell are reported as one.
    """
    if not tol > 0:
        raise InvalidArgumentError("zeros_in tolerance must be positive")
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise InvalidArgumentError(f"empty interval [{lo}, {hi}]")
    xs = np.linspace(lo, hi, cells + 1)
    try:
        vals = np.asarray(fn(xs), dtype=float)
        if vals.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(fn(x)) for x in xs])

    roots = []
    n = len(xs)
    i = 0
    while i < n:
        if vals[i] == 0.0:
            j = i
            while j + 1 < n and vals[j + 1] == 0.0:
                j += 1
            if i > 0 and j < n - 1 and vals[i - 1] * vals[j + 1] < 0.0:
                roots.append(0.5 * (xs[i] + xs[j]))
            i = j + 1
            continue
        if i + 1 < n and vals[i] * vals[i + 1] < 0.0:
            roots.append(_bisect(fn, xs[i], xs[i + 1], vals[i], tol))
        i += 1
    return roots


def _bisect(fn, a, b, fa, tol):
    """Plain bisection on a strict sign change; returns the midpoint at width tol."""
    while b - a > tol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = float(fn(m))
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)
