"""Pointwise 3x3 symbol algebra of the slow/fast mode splitting.

At a phase-space point the linearized propagator has the principal matrix

    A0 = [[0,    i xi1,  i xi2],
          [i xi1, 0,     -b   ],
          [i xi2, b,      0   ]]

with eigenvalues 0 (slow mode) and +-i sqrt(xi1^2 + xi2^2 + b^2) (fast
modes).  The polarization matrix P0 collects the corresponding eigenvectors
in column order (fast-, slow, fast+); its closed-form inverse Q0 is printed
below and verified against numerical inversion in the tests.  The modulus of
det P0 equals 2 (xi^2 + b^2)^{3/2} / ((xi1^2 + b^2) |xi1|) and is never
smaller than 2, which is what makes the inverse uniformly healthy away from
xi1 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidArgumentError
from .profiles import CoriolisProfile

__all__ = [
    "ModeMatrices",
    "a0",
    "poincare_symbol",
    "polarization_matrices",
    "polarization_residuals",
    "det_p0_modulus",
]


@dataclass(frozen=True)
class ModeMatrices:
    """Principal matrix with its polarization pair at one evaluation point."""

    a0: np.ndarray
    p0: np.ndarray
    q0: np.ndarray
    x2: float
    xi1: float
    xi2: float
    b_value: float


def a0(x2: float, xi1: float, xi2: float, profile: CoriolisProfile) -> np.ndarray:
    """Principal 3x3 matrix at (x2, xi1, xi2)."""
    b = float(profile.b(x2))
    return np.array(
        [
            [0.0, 1j * xi1, 1j * xi2],
            [1j * xi1, 0.0, -b],
            [1j * xi2, b, 0.0],
        ],
        dtype=complex,
    )


def poincare_symbol(sign: int, x2: float, xi1: float, xi2: float,
                    profile: CoriolisProfile) -> float:
    """Fast-mode symbol +-sqrt(xi1^2 + xi2^2 + b^2)."""
    if sign not in (1, -1):
        raise InvalidArgumentError("sign must be +1 or -1")
    b = float(profile.b(x2))
    return sign * math.sqrt(xi1 * xi1 + xi2 * xi2 + b * b)


def polarization_matrices(x2: float, xi1: float, xi2: float,
                          profile: CoriolisProfile) -> ModeMatrices:
    """Closed-form P0 and Q0 = P0^{-1} together with A0.

    Column order of P0: fast-, slow, fast+.  Q0 is built from its printed
    closed form, not by numerical inversion; inversion is the test oracle.
    """
    if xi1 == 0.0:
        raise InvalidArgumentError("polarization is resolved away from xi1 = 0")
    b = float(profile.b(x2))
    xi_sq = xi1 * xi1 + xi2 * xi2
    s = math.sqrt(xi_sq + b * b)
    d = xi1 * xi1 + b * b

    p0 = np.array(
        [
            [
                (-xi1 * s - 1j * xi2 * b) / d,
                -1j * b / xi1,
                (xi1 * s - 1j * xi2 * b) / d,
            ],
            [1.0, -xi2 / xi1, 1.0],
            [
                (xi1 * xi2 + 1j * b * s) / d,
                1.0,
                (xi1 * xi2 - 1j * b * s) / d,
            ],
        ],
        dtype=complex,
    )
    q0 = np.array(
        [
            [1j * b * xi2 - xi1 * s, d, -1j * b * s + xi1 * xi2],
            [2j * b * xi1, -2.0 * xi1 * xi2, 2.0 * xi1 * xi1],
            [1j * b * xi2 + xi1 * s, d, 1j * b * s + xi1 * xi2],
        ],
        dtype=complex,
    ) / (2.0 * (xi_sq + b * b))

    return ModeMatrices(
        a0=a0(x2, xi1, xi2, profile), p0=p0, q0=q0, x2=x2, xi1=xi1, xi2=xi2, b_value=b
    )


def polarization_residuals(m: ModeMatrices) -> Tuple[float, float, float]:
    """Eigenvector residuals ||A0 p_j - i tau_j p_j|| per column (fast-, slow, fast+)."""
    s = math.sqrt(m.xi1 * m.xi1 + m.xi2 * m.xi2 + m.b_value * m.b_value)
    out = []
    for j, tau in enumerate((-s, 0.0, s)):
        col = m.p0[:, j]
        out.append(float(np.linalg.norm(m.a0 @ col - 1j * tau * col)))
    return tuple(out)


def det_p0_modulus(x2: float, xi1: float, xi2: float, profile: CoriolisProfile) -> float:
    """Closed form |det P0| = 2 (xi^2 + b^2)^{3/2} / ((xi1^2 + b^2) |xi1|) >= 2."""
    if xi1 == 0.0:
        raise InvalidArgumentError("determinant formula needs xi1 != 0")
    b = float(profile.b(x2))
    xi_sq = xi1 * xi1 + xi2 * xi2
    return 2.0 * (xi_sq + b * b) ** 1.5 / ((xi1 * xi1 + b * b) * abs(xi1))
