"""Fast-mode dispersion diagnostics: actions, quantization, cubic roots.

The fast (inertia-gravity) branch at fixed xi1 reduces to the 1-d Hamiltonian
xi2^2 + b^2(x2).  Its classical action

    I(h) = 2 * integral sqrt(h - b^2(x2)) dx2   between the turning points

quantizes at leading order through I(lambda_n) = 2 pi eps (n + 1/2); on the
linear-rotation plane I(h) = pi h / beta, which reproduces the harmonic
ladder beta eps (2n + 1) exactly.  The full three-branch dispersion at finite
eps is the depressed cubic

    tau^3 - (xi1^2 + beta eps (2n+1)) tau + eps beta xi1 = 0,

solved here by the trigonometric method with a Newton polish.  The escape of
fast wave packets is controlled by the stationary-phase group speed
|2 xi1 + dlambda/dxi1| / (2 sqrt(lambda + xi1^2)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import (
    BelowWellError,
    ComplexRootsError,
    InvalidArgumentError,
    MultiWellError,
)
from .profiles import CoriolisProfile, zeros_in

__all__ = [
    "ActionProfile",
    "DispersionTriple",
    "action_integral",
    "make_action_profile",
    "bohr_sommerfeld",
    "count_eigenvalues_below",
    "dispersion_roots",
    "rossby_root_asymptotics",
    "group_speed",
]

_WELL_WINDOW = 50.0
_WELL_GRID = 40001


def _turning_points(h: float, profile: CoriolisProfile) -> Tuple[float, float]:
    """Turning points b^2(x) = h of a single well; errors on 0 or >2 crossings."""

    def f(x):
        if isinstance(x, np.ndarray):
            b = np.asarray(profile.b(x), dtype=float)
            return b * b - h
        b = float(profile.b(float(x)))
        return b * b - h

    roots = zeros_in(f, (-_WELL_WINDOW, _WELL_WINDOW), tol=1e-14, cells=_WELL_GRID - 1)
    if len(roots) > 2:
        raise MultiWellError(
            f"{len(roots)} turning points at energy {h}: well is not single"
        )
    if len(roots) < 2:
        raise BelowWellError(f"no classically allowed band at energy {h}")
    return roots[0], roots[1]


def action_integral(h: float, profile: CoriolisProfile, rtol: float = 1e-11) -> float:
    """Classical action 2 * integral sqrt(h - b^2) dx2 over the allowed band.

    Scans the whole confinement window for turning points (so multi-well
    energies are rejected), then integrates with the midpoint sine
    substitution that removes the square-root endpoint behaviour.
    """
    lo, hi = _turning_points(h, profile)
    return _band_action(h, profile, lo, hi, rtol=rtol)


def _band_action(
    h: float, profile: CoriolisProfile, lo: float, hi: float, rtol: float = 1e-11
) -> float:
    m = 0.5 * (lo + hi)
    w = 0.5 * (hi - lo)

    def integrand(theta):
        y = m + w * math.sin(theta)
        b = float(profile.b(y))
        val = h - b * b
        if val <= 0.0:
            return 0.0
        return 2.0 * w * math.cos(theta) * math.sqrt(val)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            integrand, -0.5 * math.pi, 0.5 * math.pi, epsabs=1e-15, epsrel=rtol, limit=300
        )
    return val


@dataclass(frozen=True)
class ActionProfile:
    """Action map of a single-well profile, with its inverse.

    The inversion path assumes the single well it was built around: band
    edges are located by an expanding march from the well bottom, which is
    robust for arbitrarily thin bands.  Multi-well detection happens in the
    one-shot :func:`action_integral`, not per inversion step.
    """

    profile: CoriolisProfile
    well_bottom: float
    well_x: float
    single_well: bool = True

    def _band(self, h: float) -> Tuple[float, float]:
        prof = self.profile

        def above(x):
            b = float(prof.b(float(x)))
            return b * b >= h

        edges = []
        for direction in (-1.0, 1.0):
            step = 1e-12 * max(1.0, abs(self.well_x))
            while not above(self.well_x + direction * step):
                step *= 2.0
                if step > 1e12:
                    raise BelowWellError(f"band unbounded at energy {h}")
            a, b = step * 0.5, step
            while b - a > 1e-15 * max(1.0, b):
                m = 0.5 * (a + b)
                if above(self.well_x + direction * m):
                    b = m
                else:
                    a = m
            edges.append(self.well_x + direction * 0.5 * (a + b))
        return edges[0], edges[1]

    def action(self, h: float) -> float:
        if h <= self.well_bottom:
            raise BelowWellError(f"h = {h} is at or below the well bottom {self.well_bottom}")
        lo, hi = self._band(h)
        return _band_action(h, self.profile, lo, hi)

    def energy(self, target_action: float) -> float:
        """Invert I(h) = target by bracketed root finding plus a Newton polish."""
        if not target_action > 0:
            raise InvalidArgumentError("target action must be positive")
        span = max(1.0, abs(self.well_bottom))
        hi = self.well_bottom + span
        while self.action(hi) < target_action:
            hi = self.well_bottom + (hi - self.well_bottom) * 2.0
            if hi - self.well_bottom > 1e12:
                raise InvalidArgumentError("action target unreachable: well too shallow")
        lo = hi
        while True:
            lo = self.well_bottom + 0.5 * (lo - self.well_bottom)
            if self.action(lo) < target_action:
                break
            if lo - self.well_bottom < 1e-300:
                raise InvalidArgumentError("action target degenerate at the well bottom")
        h = float(
            brentq(
                lambda x: self.action(x) - target_action,
                lo,
                hi,
                xtol=1e-300,
                rtol=1e-14,
                maxiter=200,
            )
        )
        didh = self._action_derivative(h)
        if math.isfinite(didh) and didh > 0.0:
            h -= (self.action(h) - target_action) / didh
        return h

    def _action_derivative(self, h: float) -> float:
        """dI/dh = integral dx / sqrt(h - b^2) over the band."""
        from .quadrature import endpoint_quad

        lo, hi = self._band(h)
        prof = self.profile

        def v(y):
            b = float(prof.b(float(y)))
            return h - b * b

        def dv(y):
            b = float(prof.b(float(y)))
            return abs(2.0 * b * float(prof.db(float(y))))

        return endpoint_quad(
            lambda y: 1.0, v, lo, hi, rtol=1e-9, dv_a=dv(lo), dv_b=dv(hi)
        )


def make_action_profile(profile: CoriolisProfile) -> ActionProfile:
    """Locate the well bottom of b^2 and wrap the action map around it."""
    xs = np.linspace(-_WELL_WINDOW, _WELL_WINDOW, 8001)
    b2 = np.asarray(profile.b(xs), dtype=float) ** 2
    i = int(np.argmin(b2))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    # golden-section refine of the minimum
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def f(x):
        v = float(profile.b(float(x)))
        return v * v

    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-14:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x_star = 0.5 * (a + b)
    return ActionProfile(profile=profile, well_bottom=f(x_star), well_x=x_star)


def bohr_sommerfeld(eps: float, n: int, profile: CoriolisProfile) -> float:
    """Leading-order eigenvalue: solve I(lambda) = 2 pi eps (n + 1/2)."""
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    if n < 0:
        raise InvalidArgumentError("quantum index must be nonnegative")
    ap = make_action_profile(profile)
    return ap.energy(2.0 * math.pi * eps * (n + 0.5))


def count_eigenvalues_below(energy: float, eps: float, profile: CoriolisProfile) -> int:
    """Number of quantized levels at or below the given energy."""
    ap = make_action_profile(profile)
    if energy <= ap.well_bottom:
        return 0
    total = ap.action(energy)
    return max(0, int(math.floor(total / (2.0 * math.pi * eps) - 0.5)) + 1)


@dataclass(frozen=True)
class DispersionTriple:
    """The three real branches of the finite-eps dispersion cubic, sorted."""

    tau_minus: float
    tau_rossby: float
    tau_plus: float
    xi1: float
    n: int
    eps: float
    beta: float

    def as_tuple(self):
        return (self.tau_minus, self.tau_rossby, self.tau_plus)


def dispersion_roots(xi1: float, n: int, eps: float, beta: float) -> DispersionTriple:
    """Solve tau^3 - (xi1^2 + beta eps (2n+1)) tau + eps beta xi1 = 0.

    Uses the trigonometric form for three real roots, then one Newton step
    per root; raises :class:`ComplexRootsError` when the discriminant is
    negative (never the case for small eps).
    """
    if xi1 == 0.0:
        raise InvalidArgumentError("dispersion is resolved away from xi1 = 0")
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    if beta == 0.0:
        raise InvalidArgumentError("beta must be nonzero")
    if n < 0:
        raise InvalidArgumentError("quantum index must be nonnegative")
    p = -(xi1 * xi1 + beta * eps * (2 * n + 1))
    q = eps * beta * xi1
    disc = -4.0 * p**3 - 27.0 * q * q
    if disc <= 0.0:
        raise ComplexRootsError(
            f"discriminant {disc} <= 0: only one real branch at these parameters"
        )
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = max(-1.0, min(1.0, arg))
    phi = math.acos(arg)
    roots = []
    for k in range(3):
        t = m * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0)
        deriv = 3.0 * t * t + p
        if deriv != 0.0:
            t -= (t**3 + p * t + q) / deriv
        roots.append(t)
    roots.sort()
    return DispersionTriple(
        tau_minus=roots[0], tau_rossby=roots[1], tau_plus=roots[2],
        xi1=xi1, n=n, eps=eps, beta=beta,
    )


def rossby_root_asymptotics(xi1: float, n: int, eps: float, beta: float) -> float:
    """Relative gap between the slow root and eps beta xi1 / (xi1^2 + beta eps (2n+1))."""
    triple = dispersion_roots(xi1, n, eps, beta)
    approx = eps * beta * xi1 / (xi1 * xi1 + beta * eps * (2 * n + 1))
    return abs(triple.tau_rossby - approx) / abs(triple.tau_rossby)


def group_speed(xi1: float, lam: float, dlam_dxi1: float = 0.0) -> float:
    """Stationary-phase escape speed |2 xi1 + dlambda/dxi1| / (2 sqrt(lambda + xi1^2)).

    At leading order the quantized levels do not depend on xi1, so the
    betaplane default is dlam_dxi1 = 0.
    """
    s = lam + xi1 * xi1
    if not s > 0:
        raise InvalidArgumentError("lambda + xi1^2 must be positive")
    return abs(2.0 * xi1 + dlam_dxi1) / (2.0 * math.sqrt(s))
