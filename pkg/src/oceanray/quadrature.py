"""Quadrature with inverse-square-root endpoint singularities.

Integrals of the form  integral_a^b  g(y) / sqrt(V(y)) dy  where V has simple
zeros at both endpoints are computed with the substitution
y = m + w*sin(theta) (m the midpoint, w the half-width), which turns the
integrand into a bounded continuous function of theta on [-pi/2, pi/2];
the adaptive Gauss-Kronrod engine then converges quickly.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

from scipy.integrate import IntegrationWarning, quad

__all__ = ["endpoint_quad"]


def endpoint_quad(
    g: Callable,
    v: Callable,
    a: float,
    b: float,
    rtol: float = 1e-9,
    dv_a: float = None,
    dv_b: float = None,
) -> float:
    """Integrate g(y) / sqrt(V(y)) over [a, b] with V(a) = V(b) = 0.

    ``dv_a`` / ``dv_b`` are |V'| at the endpoints; when the substitution lands
    so close to an endpoint that V evaluates to a nonpositive rounding
    residue, the analytic limit built from them replaces the raw quotient.
    """
    m = 0.5 * (a + b)
    w = 0.5 * (b - a)
    if not w > 0:
        raise ValueError("endpoint_quad needs a nondegenerate interval")

    def integrand(theta):
        s = math.sin(theta)
        y = m + w * s
        vy = v(y)
        if vy <= 0.0:
            # at theta -> +-pi/2:  cos/sqrt(V) -> sqrt(2/(w*|V'|))
            dv = dv_b if s > 0 else dv_a
            if dv is None or dv <= 0.0:
                return 0.0
            return g(y) * w * math.sqrt(2.0 / (w * dv))
        return g(y) * w * math.cos(theta) / math.sqrt(vy)

    with warnings.catch_warnings():
        # subdivision exhaustion only occurs when the integrand is rounding
        # noise limited (huge frequency scales); the partial result is then
        # already at the attainable accuracy
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            integrand, -0.5 * math.pi, 0.5 * math.pi, epsabs=1e-14, epsrel=rtol, limit=300
        )
    return val
