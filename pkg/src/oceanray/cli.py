"""Command-line front end.

Subcommands wrap every public computation and emit CSVs with fixed headers
plus JSON metadata sidecars.  Exit status: 0 success, 1 domain error (the
message names the failing module error), 2 configuration error.  All outputs
are deterministic for a fixed configuration: the scan's optional worker pool
maps grid chunks in order, so parallelism never perturbs rows.

Flags (mirrored by OCEANRAY_* environment variables):
    --config PATH   run configuration (YAML)
    --out DIR       output directory (overrides run.out_dir)
    --threads N     worker pool size (overrides run.threads)
    --seed S        sampling seed (overrides run.seed)
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from multiprocessing import get_context
from typing import Any, Dict, List

import numpy as np

from . import __version__
from .classification import classify
from .config import (
    RunConfig,
    build_profiles,
    grid_values,
    load_config,
    integer_field as _int,
    number_field as _num,
)
from .csvio import sidecar, write_csv, write_json
from .dynamics import PhasePoint, integrate, rossby_symbol
from .errors import ConfigError, OceanrayError
from .mode_algebra import det_p0_modulus, polarization_matrices, polarization_residuals
from .reduced_phase import bracket, energy_surface_points
from .spectral import dispersion_roots, make_action_profile
from .transport import (
    MODE_POINCARE_MINUS,
    MODE_POINCARE_PLUS,
    MODE_ROSSBY,
    mass_in_box,
    propagate,
    sample_initial,
)
from .trapping import (
    critper,
    drift_velocity,
    lambda_per_G,
    lambda_per_band,
    lambda_per_root,
    lambda_per_setup,
    lambda_sing_point,
    scan_lambda,
    scan_point,
)

TRAJECTORY_HEADER = ["t", "x1", "xi1", "x2", "xi2", "tau"]
SURFACE_HEADER = ["x2", "xi2_plus", "xi2_minus", "V"]
CLASSIFY_HEADER = ["x1", "xi1", "x2", "xi2", "tau", "class", "T_or_x2inf", "margin"]
SCAN_HEADER = ["xi1", "x2_0", "xi2_0", "tau", "class", "margin", "drift", "trapped", "error"]
EIGS_HEADER = ["n", "lambda"]
DISPERSION_HEADER = ["xi1", "n", "tau_minus", "tau_R", "tau_plus"]
SNAPSHOT_HEADER = ["t", "x1", "xi1", "x2", "xi2", "weight", "status"]
MASS_HEADER = ["t", "mass"]
GCURVE_HEADER = ["xi1", "G"]


def _section(cfg: RunConfig, name: str, allowed: Dict[str, int]) -> Dict[str, Any]:
    sec = cfg.sections.get(name)
    if sec is None:
        raise ConfigError(f"config is missing the {name!r} section")
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"unknown key {name}.{key!r}")
    return sec




def _point(sec: Dict[str, Any], name: str) -> PhasePoint:
    return PhasePoint(
        _num(sec, "x1", name, default=0.0),
        _num(sec, "xi1", name),
        _num(sec, "x2", name),
        _num(sec, "xi2", name),
    )


def _trajectory_rows(traj, profiles):
    taus = rossby_symbol(traj.states[:, 1], traj.states[:, 2], traj.states[:, 3], profiles)
    for t, row, tau in zip(traj.times, traj.states, np.asarray(taus)):
        yield [t, row[0], row[1], row[2], row[3], float(tau)]


def cmd_trace(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(
        cfg, "trace", {"x1": 1, "xi1": 1, "x2": 1, "xi2": 1, "horizon": 1, "samples": 1}
    )
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    p0 = _point(sec, "trace")
    horizon = _num(sec, "horizon", "trace", default=1000.0)
    samples = _int(sec, "samples", "trace", default=2001, minimum=2)
    traj = integrate(
        p0, horizon, profiles, rtol=cfg.rtol, atol=cfg.atol,
        n_samples=samples, xi2_cap=cfg.xi2_cap,
    )
    path = os.path.join(out_dir, "trajectory.csv")
    write_csv(path, TRAJECTORY_HEADER, _trajectory_rows(traj, profiles))
    return [path]


def cmd_classify(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "classify", {"x1": 1, "xi1": 1, "x2": 1, "xi2": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    p0 = _point(sec, "classify")
    tau = float(rossby_symbol(p0.xi1, p0.x2, p0.xi2, profiles))
    cls = classify(
        p0, profiles, tol_sigma=cfg.tol_sigma, tol_degenerate=cfg.tol_degenerate,
        quad_rtol=cfg.quad_rtol,
    )
    path = os.path.join(out_dir, "classification.csv")
    margin = cls.margin if cls.margin is not None else float("nan")
    write_csv(
        path,
        CLASSIFY_HEADER,
        [[p0.x1, p0.xi1, p0.x2, p0.xi2, tau, cls.kind, cls.headline, margin]],
    )
    return [path]


def _scan_chunk(args):
    zonal, coriolis, points, trapped_tol, tol_sigma = args
    profiles = build_profiles(zonal, coriolis)
    return [
        scan_point(xi1, x2, xi2, profiles, trapped_tol, tol_sigma)
        for (xi1, x2, xi2) in points
    ]


def cmd_scan(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "scan", {"xi1": 1, "x2": 1, "xi2": 1})
    xi1s = grid_values(sec.get("xi1"), "scan.xi1")
    x2s = grid_values(sec.get("x2"), "scan.x2")
    xi2s = grid_values(sec.get("xi2"), "scan.xi2")
    if any(v == 0.0 for v in xi1s):
        raise ConfigError("scan.xi1 grid must avoid 0")
    points = [(a, b, c) for a in xi1s for b in x2s for c in xi2s]

    if cfg.threads > 1 and len(points) > 1:
        chunk = max(1, math.ceil(len(points) / (cfg.threads * 4)))
        chunks = [points[i : i + chunk] for i in range(0, len(points), chunk)]
        payload = [
            (cfg.zonal, cfg.coriolis, c, cfg.trapped_tol, cfg.tol_sigma) for c in chunks
        ]
        with get_context("spawn").Pool(cfg.threads) as pool:
            results = pool.map(_scan_chunk, payload)
        rows = [row for part in results for row in part]
    else:
        profiles = build_profiles(cfg.zonal, cfg.coriolis)
        rows = scan_lambda(
            xi1s, x2s, xi2s, profiles,
            trapped_tol=cfg.trapped_tol, tol_sigma=cfg.tol_sigma,
        )
    path = os.path.join(out_dir, "scan.csv")
    write_csv(
        path,
        SCAN_HEADER,
        (
            [r.xi1, r.x2_0, r.xi2_0, r.tau, r.kind, r.margin, r.drift, r.trapped, r.error]
            for r in rows
        ),
    )
    return [path]


def cmd_critper(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "critper", {"tau": 1, "xi1": 1, "x2_0": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    tau = _num(sec, "tau", "critper")
    xi1 = _num(sec, "xi1", "critper")
    x2_0 = _num(sec, "x2_0", "critper", default=0.0)
    rep = bracket(tau, xi1, x2_0, profiles, tol_degenerate=cfg.tol_degenerate)
    value = critper(tau, xi1, rep, profiles, rtol=cfg.quad_rtol)
    path = os.path.join(out_dir, "critper.json")
    write_json(
        path,
        {
            "tau": tau,
            "xi1": xi1,
            "x2_0": x2_0,
            "xmin": rep.xmin,
            "xmax": rep.xmax,
            "endpoints": [rep.kind_min, rep.kind_max],
            "critper": value,
            "trapped_if_zero": abs(value) < cfg.trapped_tol,
        },
    )
    return [path]


def cmd_surface(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "surface", {"tau": 1, "xi1": 1, "x2": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    tau = _num(sec, "tau", "surface")
    xi1 = _num(sec, "xi1", "surface")
    grid = grid_values(sec.get("x2"), "surface.x2")
    pts = energy_surface_points(tau, xi1, np.asarray(grid), profiles)
    path = os.path.join(out_dir, "surface.csv")
    write_csv(path, SURFACE_HEADER, ([r[0], r[1], r[2], r[3]] for r in pts))
    return [path]


def cmd_eigs(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "eigs", {"epsilon": 1, "n_max": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    eps = _num(sec, "epsilon", "eigs")
    n_max = _int(sec, "n_max", "eigs", default=20, minimum=0)
    if not eps > 0:
        raise ConfigError("eigs.epsilon must be positive")
    ap = make_action_profile(profiles.coriolis)
    rows = []
    for n in range(n_max + 1):
        rows.append([n, ap.energy(2.0 * math.pi * eps * (n + 0.5))])
    path = os.path.join(out_dir, "eigs.csv")
    write_csv(path, EIGS_HEADER, rows)
    return [path]


def cmd_dispersion(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "dispersion", {"epsilon": 1, "beta": 1, "xi1": 1, "n": 1})
    eps = _num(sec, "epsilon", "dispersion")
    beta = _num(sec, "beta", "dispersion", default=cfg.coriolis["beta"])
    xi1s = grid_values(sec.get("xi1"), "dispersion.xi1")
    ns = sec.get("n")
    if not isinstance(ns, list) or not all(isinstance(n, int) and n >= 0 for n in ns):
        raise ConfigError("dispersion.n must be a list of nonnegative integers")
    rows = []
    for xi1 in xi1s:
        for n in ns:
            tr = dispersion_roots(xi1, n, eps, beta)
            rows.append([xi1, n, tr.tau_minus, tr.tau_rossby, tr.tau_plus])
    path = os.path.join(out_dir, "dispersion.csv")
    write_csv(path, DISPERSION_HEADER, rows)
    return [path]


def cmd_modes(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "modes", {"samples": 1, "seed": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    n = _int(sec, "samples", "modes", default=100, minimum=1)
    seed = _int(sec, "seed", "modes", default=cfg.seed, minimum=0)
    rng = np.random.RandomState(seed)
    worst_qp = worst_det = worst_res = 0.0
    min_det = math.inf
    for _ in range(n):
        x2 = rng.uniform(-3.0, 3.0)
        xi1 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 10.0))
        xi2 = rng.uniform(-5.0, 5.0)
        m = polarization_matrices(x2, xi1, xi2, profiles.coriolis)
        worst_qp = max(worst_qp, float(np.max(np.abs(m.q0 @ m.p0 - np.eye(3)))))
        det = abs(np.linalg.det(m.p0))
        formula = det_p0_modulus(x2, xi1, xi2, profiles.coriolis)
        worst_det = max(worst_det, abs(det - formula) / formula)
        min_det = min(min_det, det)
        worst_res = max(worst_res, max(polarization_residuals(m)))
    path = os.path.join(out_dir, "modes.json")
    write_json(
        path,
        {
            "samples": n,
            "seed": seed,
            "max_inverse_identity_deviation": worst_qp,
            "max_det_formula_relative_error": worst_det,
            "min_abs_det": min_det,
            "max_eigenvector_residual": worst_res,
        },
    )
    return [path]


def cmd_lambda_sing(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(
        cfg, "lambda_sing", {"xi1": 1, "x2_0": 1, "x1_0": 1, "horizon": 1, "samples": 1}
    )
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    xi1 = _num(sec, "xi1", "lambda_sing")
    x2_0 = _num(sec, "x2_0", "lambda_sing")
    x1_0 = _num(sec, "x1_0", "lambda_sing", default=0.0)
    horizon = _num(sec, "horizon", "lambda_sing", default=1000.0)
    samples = _int(sec, "samples", "lambda_sing", default=2001, minimum=2)
    sign = -1 if xi1 < 0 else 1
    seed = lambda_sing_point(x1_0, xi1, x2_0, profiles, expected_sign=sign)
    traj = integrate(
        seed, horizon, profiles, rtol=cfg.rtol, atol=cfg.atol,
        n_samples=samples, xi2_cap=cfg.xi2_cap,
    )
    csv_path = os.path.join(out_dir, "lambda_sing.csv")
    write_csv(csv_path, TRAJECTORY_HEADER, _trajectory_rows(traj, profiles))
    report_path = os.path.join(out_dir, "lambda_sing.json")
    write_json(
        report_path,
        {
            "seed": {"x1": seed.x1, "xi1": seed.xi1, "x2": seed.x2, "xi2": seed.xi2},
            "tau": float(rossby_symbol(seed.xi1, seed.x2, seed.xi2, profiles)),
            "horizon": horizon,
            "reason": traj.reason,
            "max_x1_excursion": float(np.max(np.abs(traj.states[:, 0] - seed.x1))),
            "final_x2": float(traj.states[-1, 2]),
            "final_xi2": float(traj.states[-1, 3]),
        },
    )
    return [csv_path, report_path]


def cmd_lambda_per(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(cfg, "lambda_per", {"xi1_min": 1, "xi1_max": 1, "samples": 1})
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    lo = _num(sec, "xi1_min", "lambda_per", default=1.0)
    hi = _num(sec, "xi1_max", "lambda_per", default=50.0)
    n = _int(sec, "samples", "lambda_per", default=50, minimum=2)
    setup = lambda_per_setup(profiles, xi1_interval=(lo, hi))
    xs = np.geomspace(lo, hi, n)
    rows = [[float(x), lambda_per_G(float(x), setup, profiles, rtol=cfg.quad_rtol)] for x in xs]
    csv_path = os.path.join(out_dir, "g_curve.csv")
    write_csv(csv_path, GCURVE_HEADER, rows)

    root, slope, width = lambda_per_root(setup, profiles)
    tau, xmin, xmax = lambda_per_band(setup, root, profiles)
    p0 = PhasePoint(0.0, root, xmin, 0.0)
    verdict = drift_velocity(p0, profiles, tol=cfg.trapped_tol, rtol=cfg.rtol, atol=cfg.atol)
    report_path = os.path.join(out_dir, "lambda_per.json")
    write_json(
        report_path,
        {
            "eta": setup.eta,
            "delta": setup.delta,
            "root_xi1": root,
            "root_bracket_width": width,
            "G_slope_at_root": slope,
            "turning_points": [xmin, xmax],
            "tau_at_root": tau,
            "seed_drift": verdict.drift,
            "seed_trapped": verdict.trapped,
        },
    )
    return [csv_path, report_path]


_MODE_NAMES = {
    "rossby": MODE_ROSSBY,
    "poincare_plus": MODE_POINCARE_PLUS,
    "poincare_minus": MODE_POINCARE_MINUS,
}


def cmd_transport(cfg: RunConfig, out_dir: str) -> List[str]:
    sec = _section(
        cfg,
        "transport",
        {"mode": 1, "count": 1, "box": 1, "times": 1, "mass_box": 1},
    )
    profiles = build_profiles(cfg.zonal, cfg.coriolis)
    mode = sec.get("mode", "rossby")
    if mode not in _MODE_NAMES:
        raise ConfigError(f"transport.mode must be one of {sorted(_MODE_NAMES)}")
    count = _int(sec, "count", "transport", default=1000, minimum=1)
    box_sec = sec.get("box")
    if not isinstance(box_sec, dict):
        raise ConfigError("transport.box must be a mapping with x1, xi1, x2, xi2")
    for key in box_sec:
        if key not in ("x1", "xi1", "x2", "xi2"):
            raise ConfigError(f"unknown key transport.box.{key!r}")
    box = []
    for key in ("x1", "xi1", "x2", "xi2"):
        iv = box_sec.get(key)
        if not isinstance(iv, list) or len(iv) != 2:
            raise ConfigError(f"transport.box.{key} must be [lo, hi]")
        box.append((float(iv[0]), float(iv[1])))
    times = sec.get("times")
    if not isinstance(times, list) or not times or any(
        isinstance(t, bool) or not isinstance(t, (int, float)) for t in times
    ):
        raise ConfigError("transport.times must be a nonempty list of numbers")
    times = sorted(float(t) for t in times)
    if times[0] < 0:
        raise ConfigError("transport.times must be nonnegative")
    mass_sec = sec.get("mass_box")
    if not isinstance(mass_sec, dict):
        raise ConfigError("transport.mass_box must be a mapping with x1, x2")
    for key in mass_sec:
        if key not in ("x1", "x2"):
            raise ConfigError(f"unknown key transport.mass_box.{key!r}")
    mbox = []
    for key in ("x1", "x2"):
        iv = mass_sec.get(key)
        if not isinstance(iv, list) or len(iv) != 2:
            raise ConfigError(f"transport.mass_box.{key} must be [lo, hi]")
        mbox.append((float(iv[0]), float(iv[1])))

    ensemble = sample_initial(
        box, count, profiles, mode=_MODE_NAMES[mode], seed=cfg.seed,
        tol_sigma=cfg.tol_sigma,
    )
    snap_rows = []
    mass_rows = []
    current = ensemble
    prev_t = 0.0
    for t in times:
        if t > prev_t:
            current = propagate(current, t - prev_t, profiles, rtol=cfg.rtol, atol=cfg.atol)
            prev_t = t
        for row, w, lost in zip(current.states, current.weights, current.lost):
            snap_rows.append(
                [t, row[0], row[1], row[2], row[3], w, "lost" if lost else "active"]
            )
        mass_rows.append([t, mass_in_box(current, mbox)])
    snap_path = os.path.join(out_dir, "snapshots.csv")
    write_csv(snap_path, SNAPSHOT_HEADER, snap_rows)
    mass_path = os.path.join(out_dir, "mass.csv")
    write_csv(mass_path, MASS_HEADER, mass_rows)
    note_path = os.path.join(out_dir, "transport.json")
    write_json(
        note_path,
        {
            "mode": mode,
            "count": count,
            "lost_weight": current.lost_weight,
            "note": (
                "fast-mode ray transport is a heuristic illustration; the"
                " rigorous desk-scale escape statement is the spectral"
                " group-speed bound"
            )
            if mode != "rossby"
            else "slow-mode ray transport of the phase-space density",
        },
    )
    return [snap_path, mass_path, note_path]


_COMMANDS = {
    "trace": cmd_trace,
    "classify": cmd_classify,
    "scan": cmd_scan,
    "critper": cmd_critper,
    "surface": cmd_surface,
    "eigs": cmd_eigs,
    "dispersion": cmd_dispersion,
    "modes": cmd_modes,
    "lambda-sing": cmd_lambda_sing,
    "lambda-per": cmd_lambda_per,
    "transport": cmd_transport,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oceanray",
        description="Semiclassical ray tracing and spectral diagnostics for oceanic waves",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument(
        "--config", default=os.environ.get("OCEANRAY_CONFIG"), help="YAML run configuration"
    )
    parser.add_argument("--out", default=os.environ.get("OCEANRAY_OUT"))
    parser.add_argument("--threads", type=int, default=_env_int("OCEANRAY_THREADS"))
    parser.add_argument("--seed", type=int, default=_env_int("OCEANRAY_SEED"))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    args = parser.parse_args(argv)

    if not args.config:
        print("error: --config is required (or set OCEANRAY_CONFIG)", file=sys.stderr)
        return 2
    started = time.monotonic()
    try:
        cfg = load_config(
            args.config,
            overrides={"out_dir": args.out, "threads": args.threads, "seed": args.seed},
        )
        # directories are created by the atomic writers, so a configuration
        # error never leaves even an empty output directory behind
        outputs = _COMMANDS[args.command](cfg, cfg.out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OceanrayError as exc:
        print(f"domain error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    wall = time.monotonic() - started
    for path in outputs:
        sidecar(path, args.command, cfg.to_dict(), wall)
        print(path)
    return 0


def _env_int(name):
    v = os.environ.get(name)
    return int(v) if v not in (None, "") else None


if __name__ == "__main__":
    sys.exit(main())
