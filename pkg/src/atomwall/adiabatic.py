"""Retardation force and potential for an adiabatically moving atom.

An atom released from rest at r0 and moved slowly to r does not feel the
stationary retardation force: coherent build-up along the way doubles the
position-dependent part,

    F_c(r, r0) = 2 F0(r) - F0(r0),

with F0 the stationary retardation correction.  Released at infinity the
correction is exactly twice the stationary value; released and held,
exactly the stationary value.  The correction depends only on the
endpoints, never on the path between them, so the motion remains
conservative.

The closed form arises as the geometric sum of embedded trajectory
integrals: the first-order term is

    Int_{t0}^{t} ds (v_s/2) dF0/dr (r(s)) = (1/2) [F0(r_t) - F0(r_0)]

by changing variables from time to position, and each further level
integrates (v/2) times the position derivative of the accumulated value
of the level below, halving the bracket again.  series_term_nested
evaluates those levels numerically (cumulative quadrature plus spline
differentiation with respect to position at every level) as the
independent check of the change-of-variables argument; series_sum adds
the geometric tail bound 2^-n_max |F0(r) - F0(r0)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import TrajectoryError
from .model import AtomParams
from .specfun import kernel_deriv
from .steady import (ForceValue, PotentialValue, classify_regime,
                     electrostatic_force, retardation_potential,
                     stationary_potential, stationary_retardation_force,
                     stationary_total_force)
from .transient import QuadratureConfig

_V_CONSISTENCY_RTOL = 1e-6


@dataclass(frozen=True)
class Trajectory:
    """Sampled wall-normal trajectory (t, r, v), released from rest.

    t strictly increasing, r positive, v[0] = 0, and v consistent with the
    central difference of r at interior samples (relative to the peak
    speed).  monotone reports whether r never changes direction.
    """

    t: np.ndarray
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        for name, arr in (("t", t), ("r", r), ("v", v)):
            if arr.ndim != 1 or arr.size < 3:
                raise TrajectoryError(f"{name} must be 1-D with >= 3 samples")
        if not (t.size == r.size == v.size):
            raise TrajectoryError("t, r, v must have equal lengths")
        if np.any(np.diff(t) <= 0):
            bad = int(np.argmax(np.diff(t) <= 0))
            raise TrajectoryError(f"t not strictly increasing at sample {bad + 1}")
        if np.any(r <= 0):
            bad = int(np.argmax(r <= 0))
            raise TrajectoryError(f"r must stay positive; violated at sample {bad}")
        if v[0] != 0.0:
            raise TrajectoryError(f"release must be from rest, got v[0] = {v[0]}")
        v_scale = float(np.max(np.abs(v)))
        if v_scale > 0:
            cd = (r[2:] - r[:-2]) / (t[2:] - t[:-2])
            dev = np.abs(cd - v[1:-1])
            worst = int(np.argmax(dev))
            if dev[worst] > _V_CONSISTENCY_RTOL * v_scale:
                raise TrajectoryError(
                    f"v inconsistent with dr/dt at sample {worst + 1}: "
                    f"central difference {cd[worst]:.9e} vs v {v[worst + 1]:.9e}")
        t.setflags(write=False)
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)

    @property
    def monotone(self) -> bool:
        d = np.diff(self.r)
        return bool(np.all(d >= 0) or np.all(d <= 0))

    @property
    def r_start(self) -> float:
        return float(self.r[0])

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    @classmethod
    def from_file(cls, path) -> "Trajectory":
        """Read a plain-text table: three float columns (t, r, v) per line,
        '#' comments allowed."""
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                parts = body.split()
                if len(parts) != 3:
                    raise TrajectoryError(
                        f"{path}:{ln}: expected 3 columns (t, r, v), got {len(parts)}")
                try:
                    rows.append(tuple(float(p) for p in parts))
                except ValueError as exc:
                    raise TrajectoryError(f"{path}:{ln}: {exc}") from exc
        if len(rows) < 3:
            raise TrajectoryError(f"{path}: needs at least 3 samples")
        arr = np.array(rows)
        return cls(t=arr[:, 0], r=arr[:, 1], v=arr[:, 2])


def make_release_trajectory(r_start: float, r_end: float, duration: float,
                            n_samples: int = 2001, t0: float = 0.0) -> Trajectory:
    """Smooth monotone trajectory at rest at both ends (cosine ramp)."""
    if r_start <= 0 or r_end <= 0 or duration <= 0:
        raise ValueError("r_start, r_end, duration must be positive")
    if n_samples < 101:
        raise ValueError("use at least 101 samples")
    t = np.linspace(t0, t0 + duration, n_samples)
    phase = math.pi * (t - t0) / duration
    r = r_start + (r_end - r_start) * 0.5 * (1.0 - np.cos(phase))
    v = (r_end - r_start) * 0.5 * (math.pi / duration) * np.sin(phase)
    v[0] = 0.0
    v[-1] = 0.0
    return Trajectory(t=t, r=r, v=v)


def adiabatic_retardation_force(r: float, r0: float, params: AtomParams) -> ForceValue:
    """F_c(r, r0) = 2 F0(r) - F0(r0); F0(inf) = 0."""
    if not (r > 0):
        raise ValueError(f"adiabatic_retardation_force requires r > 0, got {r}")
    if not (r0 > 0):
        raise ValueError(f"release distance must be > 0 (or inf), got {r0}")
    fr = stationary_retardation_force(r, params)
    if math.isinf(r0):
        f0, e0 = 0.0, 0.0
    else:
        ref = stationary_retardation_force(r0, params)
        f0, e0 = ref.f_z, ref.abs_error_estimate
    return ForceValue(f_z=2.0 * fr.f_z - f0,
                      abs_error_estimate=2.0 * fr.abs_error_estimate + e0,
                      regime=classify_regime(r, params))


def adiabatic_total_force(r: float, r0: float, params: AtomParams) -> ForceValue:
    """Stationary total force plus the residual F0(r) - F0(r0).

    Algebraically equal to electrostatic_force(r) +
    adiabatic_retardation_force(r, r0).
    """
    tot = stationary_total_force(r, params)
    fr = stationary_retardation_force(r, params)
    if math.isinf(r0):
        f0, e0 = 0.0, 0.0
    else:
        ref = stationary_retardation_force(r0, params)
        f0, e0 = ref.f_z, ref.abs_error_estimate
    return ForceValue(f_z=tot.f_z + fr.f_z - f0,
                      abs_error_estimate=tot.abs_error_estimate
                      + fr.abs_error_estimate + e0,
                      regime=classify_regime(r, params))


def adiabatic_potential(r: float, r0: float, params: AtomParams) -> PotentialValue:
    """U_am(r, r0) = U_sa(r) + [U0(r) - U0(r0)] with U0 the retardation-only
    potential; the residual bracket vanishes at r = r0 and U0(inf) = 0.

    The bracket's r0 term is an additive constant, so the analytic
    gradient reproduces the position-dependent part of the adiabatic
    force, electrostatic + 2 F0(r)."""
    base = stationary_potential(r, params)
    u_r = retardation_potential(r, params)
    if math.isinf(r0):
        u_0, e_0 = 0.0, 0.0
    else:
        ref = retardation_potential(r0, params)
        u_0, e_0 = ref.u, ref.abs_error_estimate
    return PotentialValue(u=base.u + u_r.u - u_0,
                          abs_error_estimate=base.abs_error_estimate
                          + u_r.abs_error_estimate + e_0)


def stationary_force_derivative(r: float, n: int, params: AtomParams) -> float:
    """d^n/dr^n of the stationary retardation force F0, analytic.

    F0(r) = 3 alpha0 omega0/(8 r^4) + (alpha0 omega0^2/8 pi) kernel_deriv(r, 3),
    so the n-th derivative uses kernel order n + 3 (capped at 5).
    """
    if not (0 <= n <= 2):
        raise ValueError("derivative order limited to 0..2 (kernel order <= 5)")
    power = (3.0 * params.alpha0 * params.omega0 / 8.0
             * (-1.0) ** n * math.factorial(n + 3) / 6.0 / r ** (n + 4))
    kd = kernel_deriv(r, n + 3, params)
    return power + params.alpha0 * params.omega0**2 / (8.0 * math.pi) * kd.value


def steady_state_expansion_term(n: int, r: float, tau: float,
                                params: AtomParams) -> float:
    """n-th velocity-expansion coefficient in its steady-state form,

        F_ss^(n)(r, tau) = (tau/2)^n d^n/dr^n F0(r),

    for 0 <= n <= 2 (kernel derivative orders up to 5).  n = 0 is the
    stationary retardation force itself, independent of tau.
    """
    if not (isinstance(n, int) and n >= 0):
        raise ValueError("n must be a nonnegative integer")
    if n > 2:
        raise ValueError("expansion order n > 2 unsupported (needs kernel "
                         "derivatives beyond order 5)")
    if not (r > 0):
        raise ValueError("r must be > 0")
    return (tau / 2.0) ** n * stationary_force_derivative(r, n, params)


def _resample(traj: Trajectory, n_nodes: int):
    t = np.linspace(traj.t[0], traj.t[-1], n_nodes)
    r_sp = CubicSpline(traj.t, traj.r)
    v_sp = CubicSpline(traj.t, traj.v)
    return t, r_sp(t), v_sp(t)


def series_term_nested(n: int, traj: Trajectory, params: AtomParams,
                       cfg: QuadratureConfig | None = None) -> float:
    """n-fold embedded trajectory integral of the adiabatic series, n in 1..3.

    Level n (innermost) integrates (v/2) dF0/dr along the trajectory; each
    outer level integrates (v/2) times the position derivative of the
    accumulated inner value, obtained by spline differentiation with
    respect to r.  For any trajectory the result telescopes to

        2^-n [F0(r_end) - F0(r_start)],

    which is the contract this operation exists to verify numerically.
    Requires a monotone trajectory (the spline in r must be single-valued).
    """
    if not (isinstance(n, int) and 1 <= n <= 3):
        raise ValueError("series_term_nested supports n in 1..3")
    if not traj.monotone:
        raise TrajectoryError("nested series terms need a monotone trajectory")
    if cfg is None:
        cfg = QuadratureConfig()
    n_nodes = max(201, 4 * cfg.max_subdivisions + 1)
    t, r, v = _resample(traj, n_nodes)
    d_vals = np.array([stationary_force_derivative(float(ri), 1, params)
                       for ri in r])
    increasing = r[-1] >= r[0]
    v_cum = None
    for level in range(n, 0, -1):
        integrand = 0.5 * v * d_vals
        v_cum = CubicSpline(t, integrand).antiderivative()(t)
        if level > 1:
            if increasing:
                d_vals = CubicSpline(r, v_cum).derivative()(r)
            else:
                d_vals = CubicSpline(r[::-1], v_cum[::-1]).derivative()(r)
    return float(v_cum[-1])


class SeriesSumResult(NamedTuple):
    value: float
    remainder_bound: float


def series_sum(traj: Trajectory, n_max: int, params: AtomParams,
               cfg: QuadratureConfig | None = None) -> SeriesSumResult:
    """Partial sum F0(r_end) + sum_{n=1..n_max} of the embedded series.

    Terms with n <= 3 come from the nested quadrature, higher ones from
    the analytic 2^-n [F0(r_end) - F0(r_start)] form.  The geometric
    remainder bound 2^-n_max |F0(r_end) - F0(r_start)| brackets the closed
    form 2 F0(r_end) - F0(r_start).
    """
    if not (isinstance(n_max, int) and n_max >= 1):
        raise ValueError("n_max must be a positive integer")
    f_end = stationary_retardation_force(traj.r_end, params).f_z
    f_start = stationary_retardation_force(traj.r_start, params).f_z
    delta = f_end - f_start
    total = f_end
    for n in range(1, n_max + 1):
        if n <= 3:
            total += series_term_nested(n, traj, params, cfg)
        else:
            total += delta / 2.0**n
    return SeriesSumResult(value=float(total),
                           remainder_bound=abs(delta) / 2.0**n_max)
