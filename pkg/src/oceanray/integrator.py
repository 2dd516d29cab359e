"""Adaptive embedded Runge-Kutta integration for single rays.

:func:`solve` integrates one state vector with a Dormand-Prince 5(4) pair,
quartic dense output (Shampine's interpolant, accurate enough to keep
interpolated samples inside the invariant-drift budget of the callers), and
root-localized event detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

__all__ = ["solve", "SolveResult"]

# Dormand-Prince 5(4), FSAL.  C/A/B are the classical tableau; E is the
# difference between the 5th and embedded 4th order weights.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Shampine (1986) quartic dense-output coefficients: the interpolant is
# y(t0 + w*h) = y0 + h * sum_i k_i * (P @ [w, w^2, w^3, w^4])_i.
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


@dataclass
class _Step:
    """One accepted step with everything dense output needs."""

    t0: float
    h: float
    y0: np.ndarray
    y1: np.ndarray
    k: np.ndarray  # (7, dim) stage derivatives

    def interpolate(self, t):
        w = (t - self.t0) / self.h
        q = np.array([w, w * w, w**3, w**4])
        return self.y0 + self.h * (self.k.T @ (_P @ q))


@dataclass
class SolveResult:
    """Raw outcome of :func:`solve` before domain-specific packaging."""

    steps: List[_Step]
    t_end: float
    y_end: np.ndarray
    reason: str  # "horizon" | "event" | "step-failure"
    events: List[Tuple[int, float, np.ndarray]]  # (event index, time, state)

    def sample(self, times):
        """Dense-evaluate the solution at sorted times within [0, t_end]."""
        out = np.empty((len(times), self.y_end.shape[0]))
        idx = 0
        last = len(self.steps) - 1
        for j, t in enumerate(times):
            while idx < last and t > self.steps[idx].t0 + self.steps[idx].h:
                idx += 1
            step = self.steps[idx]
            if t >= step.t0 + step.h:
                out[j] = step.y1
            else:
                out[j] = step.interpolate(t)
        return out


def _initial_step(f, t0, y0, rtol, atol, t_final):
    """Conservative automatic initial step (simplified Hairer heuristic)."""
    f0 = f(t0, y0)
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h0, 0.1 * t_final), f0


def solve(
    f: Callable,
    y0: Sequence[float],
    t_final: float,
    rtol: float = 1e-10,
    atol: float = 1e-10,
    events: Sequence[Callable] = (),
    terminal: Sequence[bool] = (),
    event_time_tol: float = 1e-10,
    max_steps: int = 2_000_000,
) -> SolveResult:
    """Integrate y' = f(t, y) from t=0 to t_final with adaptive DP54 steps.

    ``events`` are scalar functions g(t, y); a sign change of g across an
    accepted step is localized by bisection on the dense output to time
    accuracy ``event_time_tol``.  Terminal events stop the run with reason
    "event"; step-size underflow truncates with reason "step-failure".
    """
    y = np.asarray(y0, dtype=float).copy()
    t = 0.0
    h, k1 = _initial_step(f, t, y, rtol, atol, t_final)
    steps: List[_Step] = []
    hits: List[Tuple[int, float, np.ndarray]] = []
    g_prev = [float(g(t, y)) for g in events]
    k = np.empty((7, y.shape[0]))
    hmin_floor = 1e-14

    for _ in range(max_steps):
        if t >= t_final:
            return SolveResult(steps, t, y, "horizon", hits)
        h = min(h, t_final - t)
        hmin = max(hmin_floor, abs(t) * 1e-15)
        if h < hmin:
            return SolveResult(steps, t, y, "step-failure", hits)

        k[0] = k1
        failed = False
        for i in range(1, 7):
            yi = y + h * (k[:i].T @ _A[i])
            ki = f(t + _C[i] * h, yi)
            if not np.all(np.isfinite(ki)):
                failed = True
                break
            k[i] = ki
        if failed:
            h *= 0.5
            continue
        y_new = y + h * (k.T @ _B)
        err_vec = h * (k.T @ _E)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))

        if err <= 1.0:
            step = _Step(t, h, y.copy(), y_new.copy(), k.copy())
            steps.append(step)
            t_new = t + h
            stop = None
            for ie, g in enumerate(events):
                g_new = float(g(t_new, y_new))
                if g_prev[ie] * g_new < 0.0 or (g_prev[ie] != 0.0 and g_new == 0.0):
                    te = _locate(g, step, t, t_new, event_time_tol)
                    hits.append((ie, te, step.interpolate(te)))
                    if ie < len(terminal) and terminal[ie] and stop is None:
                        stop = (te, hits[-1][2])
                g_prev[ie] = g_new
            if stop is not None:
                return SolveResult(steps, stop[0], stop[1], "event", hits)
            y = y_new
            t = t_new
            k1 = k[6]  # FSAL
            factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err**-0.2)
            h *= max(_MIN_FACTOR, factor)
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err**-0.2)
    return SolveResult(steps, t, y, "step-failure", hits)


def _locate(g, step, ta, tb, tol):
    """Bisect a sign change of g on the dense output of one step."""
    ga = float(g(ta, step.interpolate(ta)))
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        if tm == ta or tm == tb:
            break
        gm = float(g(tm, step.interpolate(tm)))
        if gm == 0.0:
            return tm
        if ga * gm < 0.0:
            tb = tm
        else:
            ta, ga = tm, gm
    return 0.5 * (ta + tb)
