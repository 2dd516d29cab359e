"""Rossby symbol, Hamiltonian vector field, and ray integration.

The slow-mode energy of a ray at frequency pair (xi1, xi2) and latitude x2 is

    tau(xi1, x2, xi2) = b'(x2) xi1 / (xi1^2 + xi2^2 + b^2(x2)) + u1(x2) xi1.

Since the energy does not depend on the longitude x1, the conjugate frequency
xi1 is an exact constant of the motion, so rays are integrated as the reduced
3-state system (x1, x2, xi2) with xi1 frozen as a parameter.  This makes the
conservation of xi1 exact instead of numerical; the energy itself is merely
conserved up to integration error and its drift is monitored on every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .integrator import solve
from .profiles import Profiles

__all__ = [
    "PhasePoint",
    "Trajectory",
    "EventSpec",
    "rossby_symbol",
    "rossby_vector_field",
    "integrate",
    "wind_up_x1",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10
DEFAULT_XI2_CAP = 1e6


@dataclass(frozen=True)
class PhasePoint:
    """A point (x1, xi1, x2, xi2) of the cotangent space; the state of a ray.

    xi1 = 0 is excluded: the slow mode is not defined there.
    """

    x1: float
    xi1: float
    x2: float
    xi2: float

    def __post_init__(self):
        if self.xi1 == 0.0:
            raise InvalidArgumentError("phase points with xi1 = 0 are excluded")

    def as_array(self):
        return np.array([self.x1, self.xi1, self.x2, self.xi2])


@dataclass(frozen=True)
class EventSpec:
    """Event to detect during integration.

    kind "xi2_zero" fires on a sign change of xi2; kind "x2_near" fires when
    |x2 - marker| drops below ``threshold``.
    """

    kind: str
    marker: float = 0.0
    threshold: float = 0.0
    terminal: bool = False


@dataclass
class Trajectory:
    """A time-sampled ray.

    ``samples`` pairs strictly increasing times with phase points; xi1 is
    identical across samples by construction.  ``tau0`` is the initial energy
    and ``max_energy_drift`` the largest |tau(state) - tau0| observed over the
    samples.  ``reason`` is one of "horizon", "event", "step-failure".
    """

    times: np.ndarray
    states: np.ndarray  # (n, 4): x1, xi1, x2, xi2
    tau0: float
    max_energy_drift: float
    reason: str
    events: List[Tuple[EventSpec, float, "PhasePoint"]] = field(default_factory=list)

    @property
    def samples(self):
        return [(t, PhasePoint(*row)) for t, row in zip(self.times, self.states)]

    @property
    def final_point(self) -> PhasePoint:
        return PhasePoint(*self.states[-1])


def rossby_symbol(xi1, x2, xi2, profiles: Profiles):
    """Slow-mode energy at (xi1, x2, xi2).  Accepts scalars or arrays."""
    if np.any(np.asarray(xi1) == 0.0):
        raise InvalidArgumentError("rossby symbol undefined at xi1 = 0")
    zon, cor = profiles.zonal, profiles.coriolis
    b = cor.b(x2)
    return cor.db(x2) * xi1 / (xi1 * xi1 + xi2 * xi2 + b * b) + zon.u1(x2) * xi1


def rossby_vector_field(p: PhasePoint, profiles: Profiles):
    """Right-hand sides (dx1, dx2, dxi2) of the reduced ray system.

    dxi1 is identically zero and not represented.  The components are the
    analytic gradients of the symbol: dx = grad_xi tau, dxi2 = -d tau / dx2.
    """
    dx1, dx2, dxi2 = _field_scalar(p.xi1, p.x2, p.xi2, profiles)
    return dx1, dx2, dxi2


def _field_scalar(xi1, x2, xi2, profiles: Profiles):
    if xi1 == 0.0:
        raise InvalidArgumentError("ray field undefined at xi1 = 0")
    zon, cor = profiles.zonal, profiles.coriolis
    b = cor.b(x2)
    db = cor.db(x2)
    d2b = cor.d2b(x2)
    denom = xi1 * xi1 + xi2 * xi2 + b * b
    denom2 = denom * denom
    dx1 = zon.u1(x2) + db * (-xi1 * xi1 + xi2 * xi2 + b * b) / denom2
    dx2 = -2.0 * db * xi1 * xi2 / denom2
    dxi2 = -zon.du1(x2) * xi1 + 2.0 * b * db * db * xi1 / denom2 - d2b * xi1 / denom
    return dx1, dx2, dxi2


def _field_batch(xi1, x2, xi2, profiles: Profiles):
    """Vectorized field for ensemble propagation: all inputs are arrays."""
    zon, cor = profiles.zonal, profiles.coriolis
    b = cor.b(x2)
    db = cor.db(x2)
    d2b = cor.d2b(x2)
    denom = xi1 * xi1 + xi2 * xi2 + b * b
    denom2 = denom * denom
    dx1 = zon.u1(x2) + db * (-xi1 * xi1 + xi2 * xi2 + b * b) / denom2
    dx2 = -2.0 * db * xi1 * xi2 / denom2
    dxi2 = -zon.du1(x2) * xi1 + 2.0 * b * db * db * xi1 / denom2 - d2b * xi1 / denom
    return dx1, dx2, dxi2


def integrate(
    p0: PhasePoint,
    horizon: float,
    profiles: Profiles,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    events: Sequence[EventSpec] = (),
    n_samples: int = 1001,
    sample_times: Optional[Sequence[float]] = None,
    xi2_cap: float = DEFAULT_XI2_CAP,
    direction: int = 1,
) -> Trajectory:
    """Integrate a ray to the given horizon.

    Dense output is evaluated at ``sample_times`` (default: ``n_samples``
    uniform times including 0 and the horizon).  Events are localized by
    bisection on the dense output to time accuracy 1e-10.  Near a singular
    approach xi2 grows linearly and steps shrink; the run is cut at
    ``|xi2| >= xi2_cap`` with reason "event" rather than integrating forever.
    A step-size underflow truncates the trajectory with reason "step-failure"
    instead of raising.

    ``direction=-1`` integrates the time-reversed flow; recorded times are
    the elapsed parameter, always increasing.
    """
    if not horizon > 0:
        raise InvalidArgumentError("horizon must be positive")
    if not (rtol > 0 and atol > 0):
        raise InvalidArgumentError("tolerances must be positive")
    if direction not in (1, -1):
        raise InvalidArgumentError("direction must be +1 or -1")
    xi1 = p0.xi1

    def f(t, y):
        dx1, dx2, dxi2 = _field_scalar(xi1, y[1], y[2], profiles)
        return direction * np.array([dx1, dx2, dxi2])

    event_fns = []
    terminal = []
    specs = list(events) + [EventSpec(kind="xi2_cap", threshold=xi2_cap, terminal=True)]
    for spec in specs:
        if spec.kind == "xi2_zero":
            event_fns.append(lambda t, y: y[2])
        elif spec.kind == "x2_near":
            m, th = spec.marker, spec.threshold
            event_fns.append(lambda t, y, m=m, th=th: abs(y[1] - m) - th)
        elif spec.kind == "xi2_cap":
            cap = spec.threshold
            event_fns.append(lambda t, y, cap=cap: cap - abs(y[2]))
        else:
            raise InvalidArgumentError(f"unknown event kind {spec.kind!r}")
        terminal.append(spec.terminal)

    res = solve(
        f,
        np.array([p0.x1, p0.x2, p0.xi2]),
        horizon,
        rtol=rtol,
        atol=atol,
        events=event_fns,
        terminal=terminal,
    )

    if sample_times is None:
        sample_times = np.linspace(0.0, horizon, n_samples)
    times = np.asarray(sample_times, dtype=float)
    times = times[times <= res.t_end]
    if times.size == 0 or times[0] > 0.0:
        times = np.concatenate(([0.0], times))
    if times[-1] < res.t_end:
        times = np.concatenate((times, [res.t_end]))
    if res.steps:
        y_samp = res.sample(times)
    else:
        y_samp = np.tile([p0.x1, p0.x2, p0.xi2], (len(times), 1))

    states = np.empty((len(times), 4))
    states[:, 0] = y_samp[:, 0]
    states[:, 1] = xi1
    states[:, 2] = y_samp[:, 1]
    states[:, 3] = y_samp[:, 2]

    tau0 = float(rossby_symbol(xi1, p0.x2, p0.xi2, profiles))
    taus = rossby_symbol(np.full(len(times), xi1), states[:, 2], states[:, 3], profiles)
    drift = float(np.max(np.abs(taus - tau0))) if len(times) else 0.0

    hits = []
    for ie, te, ye in res.events:
        hits.append((specs[ie], te, PhasePoint(ye[0], xi1, ye[1], ye[2])))
    reason = res.reason

    return Trajectory(
        times=times,
        states=states,
        tau0=tau0,
        max_energy_drift=drift,
        reason=reason,
        events=hits,
    )


def wind_up_x1(traj: Trajectory) -> np.ndarray:
    """Longitude excursion x1(t) - x1(0) at each sample (x1 is a state, so exact)."""
    if traj.times.size == 0:
        raise InvalidArgumentError("empty trajectory")
    return traj.states[:, 0] - traj.states[0, 0]
