"""Command-line front end: stationary | transient | adiabatic | verify.

Output is CSV with a '#'-prefixed metadata header echoing the effective
configuration, so every data file is reproducible from its own header.
Exit codes: 0 success, 1 usage/config error, 2 numerical non-convergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .adiabatic import (Trajectory, adiabatic_potential,
                        adiabatic_retardation_force, adiabatic_total_force,
                        make_release_trajectory, series_sum,
                        series_term_nested)
from .dressing import (ModeGrid, PathSpec, force_mode_sum,
                       momentum_expectation, run_recursion, second_order_A)
from .errors import ConfigError, ConvergenceError, TrajectoryError
from .model import (ALKALI_ALPHA0_AU, ALKALI_OMEGA0_C1, ATOMIC_UNITS_C,
                    make_atom_params, scale_couplings)
from .specfun import kernel_deriv
from .steady import (electrostatic_force, stationary_potential,
                     stationary_retardation_force,
                     stationary_retardation_force_k_form,
                     stationary_total_force)
from .transient import QuadratureConfig, snapshot_sweep, transient_force, transient_sweep

_CONFIG_KEYS = ("omega0", "alpha0", "units", "r", "r0", "tau", "r_grid",
                "tau_grid", "trajectory", "out", "kmax", "tol", "preset")

_PRESETS = {
    # Figure-reproduction parameters: alkali optical transition in c = 1
    # units, so the light round trip to a wall at distance R takes time 2R.
    "fig1": {"omega0": ALKALI_OMEGA0_C1, "alpha0": ALKALI_ALPHA0_AU,
             "units": "c1", "r": 3000.0, "tau_grid": "0:12000:201"},
    "fig2": {"omega0": ALKALI_OMEGA0_C1, "alpha0": ALKALI_ALPHA0_AU,
             "units": "c1", "tau": 6000.0, "r_grid": "750:6000:8:lin"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def parse_grid(spec: str, allow_log: bool = True) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"grid spec {spec!r} must be min:max:n[:log|lin]")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc
    kind = parts[3] if len(parts) == 4 else "lin"
    if kind not in ("log", "lin") or (kind == "log" and not allow_log):
        raise ConfigError(f"bad grid kind in {spec!r}")
    if n < 1 or hi <= lo:
        raise ConfigError(f"grid spec {spec!r} needs max > min and n >= 1")
    if kind == "log":
        if lo <= 0:
            raise ConfigError("log grid needs min > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def read_config_file(path: str) -> dict:
    """key = value per line, '#' comments; unknown keys are rejected."""
    out = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot open config file {path}: {exc}") from exc
    with fh:
        for ln, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{ln}: expected key = value")
            key, _, val = body.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
            out[key] = val
    return out


_FLOAT_KEYS = ("omega0", "alpha0", "r", "tau", "kmax", "tol")


def build_config(args) -> dict:
    """Defaults, then preset, then config file, then command-line flags."""
    cfg = {"omega0": 1.0, "alpha0": 1.0, "units": "c1", "r": None, "r0": None,
           "tau": None, "r_grid": None, "tau_grid": None, "trajectory": None,
           "out": None, "kmax": 4000.0, "tol": 1e-6, "preset": None}
    file_cfg = read_config_file(args.config) if args.config else {}
    preset = args.preset or file_cfg.get("preset")
    if preset is not None:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        cfg["preset"] = preset
        cfg.update(_PRESETS[preset])
    for key, raw in file_cfg.items():
        if key == "preset":
            continue
        if key in _FLOAT_KEYS:
            try:
                cfg[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}") from exc
        elif key == "r0":
            cfg[key] = math.inf if raw.lower() in ("inf", "infinity") else float(raw)
        else:
            cfg[key] = raw
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None and key != "preset":
            cfg[key] = val
    if cfg["units"] not in ("c1", "atomic"):
        raise ConfigError(f"units must be c1 or atomic, got {cfg['units']!r}")
    return cfg


def _params_of(cfg):
    c = 1.0 if cfg["units"] == "c1" else ATOMIC_UNITS_C
    return make_atom_params(cfg["omega0"], cfg["alpha0"], c=c)


def _quad_of(cfg):
    return QuadratureConfig(k_max=cfg["kmax"], rel_tol=cfg["tol"])


def write_csv(path, cfg, columns, rows):
    """Deterministic CSV: '#' metadata header, 17 significant digits."""
    lines = [f"# atomwall {__version__}"]
    for key in sorted(cfg):
        if cfg[key] is not None:
            lines.append(f"# {key} = {_fmt(cfg[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_stationary(cfg) -> int:
    params = _params_of(cfg)
    if cfg["r_grid"] is not None:
        rs = parse_grid(cfg["r_grid"])
    elif cfg["r"] is not None:
        rs = np.array([cfg["r"]])
    else:
        raise ConfigError("stationary needs --r-grid or --r")
    rows = []
    for r in rs:
        r = float(r)
        u = stationary_potential(r, params)
        el = electrostatic_force(r, params)
        ret = stationary_retardation_force(r, params)
        tot = stationary_total_force(r, params)
        rows.append((r, u.u, el.f_z, ret.f_z, tot.f_z,
                     tot.abs_error_estimate, tot.regime))
    write_csv(cfg["out"], cfg,
              ("r", "u_stationary", "f_electrostatic", "f_retardation",
               "f_total", "abs_error", "regime"), rows)
    return 0


def cmd_transient(cfg) -> int:
    params = _params_of(cfg)
    quad = _quad_of(cfg)
    if cfg["preset"] == "fig2" or (cfg["tau"] is not None
                                   and cfg["r_grid"] is not None):
        rs = parse_grid(cfg["r_grid"])
        pts = snapshot_sweep(cfg["tau"], rs, params, quad)
        write_csv(cfg["out"], cfg, ("r", "coeff_total", "coeff_retardation"),
                  [(p.r, p.coeff_total, p.coeff_retardation) for p in pts])
        return 0
    if cfg["tau_grid"] is None:
        raise ConfigError("transient needs --tau-grid (or --tau with --r-grid "
                          "for a snapshot)")
    if cfg["r"] is None:
        raise ConfigError("transient needs --r")
    taus = parse_grid(cfg["tau_grid"], allow_log=False)
    curve = transient_sweep(cfg["r"], taus, params, quad)
    write_csv(cfg["out"], cfg, ("tau", "f_z", "abs_error"),
              [(s.tau, s.f_z, s.abs_error) for s in curve.samples])
    return 0


def cmd_adiabatic(cfg) -> int:
    params = _params_of(cfg)
    if cfg["trajectory"] is not None:
        traj = Trajectory.from_file(cfg["trajectory"])
        quad = _quad_of(cfg)
        closed = adiabatic_retardation_force(traj.r_end, traj.r_start, params)
        rows = []
        for n in (1, 2, 3):
            term = series_term_nested(n, traj, params, quad)
            f_end = stationary_retardation_force(traj.r_end, params).f_z
            f_start = stationary_retardation_force(traj.r_start, params).f_z
            expect = (f_end - f_start) / 2.0**n
            rel = abs(term - expect) / max(abs(expect), 1e-300)
            rows.append((n, term, expect, rel))
        result = series_sum(traj, 6, params, quad)
        extra = {"series_value": result.value,
                 "series_remainder_bound": result.remainder_bound,
                 "closed_form": closed.f_z,
                 "bracketed": abs(result.value - closed.f_z)
                 <= result.remainder_bound * 1.0000001}
        hdr = dict(cfg)
        hdr.update({k: _fmt(v) for k, v in extra.items()})
        write_csv(cfg["out"], hdr, ("n", "nested_term", "closed_term",
                                    "rel_deviation"), rows)
        return 0
    if cfg["r_grid"] is not None:
        rs = parse_grid(cfg["r_grid"])
    elif cfg["r"] is not None:
        rs = np.array([cfg["r"]])
    else:
        raise ConfigError("adiabatic needs --r-grid, --r, or --trajectory")
    r0 = cfg["r0"] if cfg["r0"] is not None else math.inf
    rows = []
    for r in rs:
        r = float(r)
        ret = adiabatic_retardation_force(r, r0, params)
        tot = adiabatic_total_force(r, r0, params)
        u = adiabatic_potential(r, r0, params)
        st = stationary_retardation_force(r, params)
        rows.append((r, ret.f_z, tot.f_z, u.u, ret.f_z / st.f_z))
    write_csv(cfg["out"], cfg,
              ("r", "f_adiabatic_retardation", "f_total", "u_adiabatic",
               "ratio_to_stationary"), rows)
    return 0


def _check(name, ok, detail, lines):
    lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def cmd_verify(cfg, inject_failure: bool = False) -> int:
    """Built-in oracle suite; nonzero exit on any failure."""
    params = _params_of(cfg)
    w0, c, a0 = params.omega0, params.c, params.alpha0
    lines = []
    ok = True
    corrupt = 0.0 if inject_failure else 1.0

    # representation equivalence (x-form vs damped k-form)
    quad6 = QuadratureConfig(eta_ladder=(0.4, 0.2, 0.1, 0.05, 0.025, 0.0125))
    worst = 0.0
    for r in (0.1 * c / w0, 1.0 * c / w0, 10.0 * c / w0):
        kf = stationary_retardation_force_k_form(r, params, quad6)
        xf = stationary_retardation_force(r, params)
        worst = max(worst, abs(kf.f_z - xf.f_z) / abs(xf.f_z))
    ok &= _check("representation equivalence", worst <= 1e-6 * max(corrupt, 1e-30),
                 f"worst rel dev {worst:.2e} (tol 1e-6)", lines)

    # asymptotic laws of the stationary potential
    r_far = 100.0 * c / w0
    far = stationary_potential(r_far, params).u * r_far**4
    far_ref = -3.0 * a0 * c / (8.0 * math.pi)
    dev_far = abs(far - far_ref) / abs(far_ref)
    r_near = 0.01 * c / w0
    near = stationary_potential(r_near, params).u * r_near**3
    near_ref = -a0 * w0 / 8.0
    dev_near = abs(near - near_ref) / abs(near_ref)
    ok &= _check("far-field potential law", dev_far <= 0.01,
                 f"r^4 U dev {dev_far:.2e} (tol 1e-2)", lines)
    ok &= _check("near-field potential law", dev_near <= 0.01,
                 f"r^3 U dev {dev_near:.2e} (tol 1e-2)", lines)

    # factor of two
    worst = 0.0
    for r in (0.1 * c / w0, 1.0 * c / w0, 10.0 * c / w0):
        ratio = (adiabatic_retardation_force(r, math.inf, params).f_z
                 / stationary_retardation_force(r, params).f_z)
        worst = max(worst, abs(ratio - 2.0))
    ok &= _check("factor of two at infinite release", worst <= 1e-9,
                 f"worst |ratio-2| {worst:.2e} (tol 1e-9)", lines)

    # nested series identities (orders 1 and 2 for speed)
    traj = make_release_trajectory(2.0 * c / w0, 1.0 * c / w0, 50.0 * c / w0, 2001)
    f1 = stationary_retardation_force(traj.r_end, params).f_z
    f0v = stationary_retardation_force(traj.r_start, params).f_z
    worst = 0.0
    for n in (1, 2):
        term = series_term_nested(n, traj, params)
        expect = (f1 - f0v) / 2.0**n
        worst = max(worst, abs(term - expect) / abs(expect))
    ok &= _check("embedded-integral identities", worst <= 1e-4,
                 f"worst rel dev {worst:.2e} (tol 1e-4)", lines)

    # recursion convergence order on a 4-mode grid
    oracle_params = scale_couplings(make_atom_params(1.0, 1.0, c=1.0), 1e-2)
    grid = ModeGrid(k_values=(0.7, 1.1, 1.6, 2.3), box_side=2.0 * math.pi)
    path = PathSpec(x0=(0.1, -0.2, 1.0), xf=(0.15, -0.1, 1.3), t=0.0, tau=2.0)
    a_ref = second_order_A(path, grid, oracle_params)
    errs = [abs(run_recursion(path, grid, oracle_params, n).a - a_ref)
            for n in (100, 200, 400, 800)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
    ok &= _check("propagator recursion order",
                 all(0.8 <= o <= 1.2 for o in orders),
                 "measured orders " + ", ".join(f"{o:.3f}" for o in orders)
                 + " (target [0.8, 1.2])", lines)

    # momentum/force consistency and parallel invariance
    mgrid = ModeGrid(k_values=(0.6, 1.0, 1.7, 2.9), box_side=2.0 * math.pi)
    op = make_atom_params(1.0, 1.0, c=1.0)
    tau0, h = 3.0, 1e-4
    dp = (momentum_expectation(1.5, 0.0, tau0 + h, mgrid, op)[2]
          - momentum_expectation(1.5, 0.0, tau0 - h, mgrid, op)[2]) / (2 * h)
    fm = force_mode_sum(1.5, 0.0, tau0, mgrid, op)
    dev = abs(dp - fm) / abs(fm)
    ok &= _check("momentum/force consistency", dev <= 1e-6,
                 f"rel dev {dev:.2e} (tol 1e-6)", lines)
    p_perp = momentum_expectation(1.5, (0.3, -0.2, 0.0), tau0, mgrid, op)
    p_zero = momentum_expectation(1.5, 0.0, tau0, mgrid, op)
    ok &= _check("parallel-velocity invariance",
                 bool(np.all(p_perp == p_zero)),
                 "parallel motion leaves the momentum shift unchanged", lines)

    # transient switch-on value and reality
    fv = transient_force(1.0 * c / w0, 0.0, params)
    inst = a0 * w0**2 / (2.0 * math.pi * c * (1.0 * c / w0) ** 3)
    dev = abs(fv.f_z - inst) / abs(inst)
    ok &= _check("switch-on instantaneous term", dev <= 1e-5,
                 f"rel dev {dev:.2e} (tol 1e-5)", lines)
    ok &= _check("force reality", isinstance(fv.f_z, float)
                 and math.isfinite(fv.f_z), "real finite float", lines)

    # gradient law via Richardson finite differences
    r = 1.3 * c / w0
    h = 1e-3 * r
    def du(step):
        return ((stationary_potential(r + step, params).u
                 - stationary_potential(r - step, params).u) / (2 * step))
    d1, d2 = du(h), du(h / 2)
    fd = (4 * d2 - d1) / 3.0
    ftot = stationary_total_force(r, params).f_z
    dev = abs(-fd - ftot) / abs(ftot)
    ok &= _check("gradient law force = -dU/dr", dev <= 1e-8,
                 f"rel dev {dev:.2e} (tol 1e-8)", lines)

    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(report)
    return 0 if ok else 3


def make_parser() -> _Parser:
    parser = _Parser(prog="atomwall",
                     description="Casimir-Polder atom-wall force toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--omega0", type=float, help="transition frequency")
    common.add_argument("--alpha0", type=float, help="static polarizability")
    common.add_argument("--units", choices=("c1", "atomic"),
                        help="unit system (c = 1 or c = 137.036)")
    common.add_argument("--r", type=float, help="atom-wall distance")
    common.add_argument("--r0", type=_parse_r0, help="release distance or 'inf'")
    common.add_argument("--tau", type=float, help="elapsed time")
    common.add_argument("--r-grid", dest="r_grid", help="min:max:n[:log|lin]")
    common.add_argument("--tau-grid", dest="tau_grid", help="min:max:n")
    common.add_argument("--trajectory", help="trajectory table file (t r v)")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--kmax", type=float, help="hard cutoff, units omega0/c")
    common.add_argument("--tol", type=float, help="relative tolerance")
    common.add_argument("--preset", choices=sorted(_PRESETS),
                        help="figure-reproduction presets")
    common.add_argument("--inject-failure", action="store_true",
                        help=argparse.SUPPRESS)
    for name in ("stationary", "transient", "adiabatic", "verify"):
        sub.add_parser(name, parents=[common])
    return parser


def _parse_r0(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        cfg = build_config(args)
        if args.command == "stationary":
            return cmd_stationary(cfg)
        if args.command == "transient":
            return cmd_transient(cfg)
        if args.command == "adiabatic":
            return cmd_adiabatic(cfg)
        return cmd_verify(cfg, inject_failure=args.inject_failure)
    except (ConfigError, TrajectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
