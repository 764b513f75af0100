"""Desk-scale oracles on truncated mode grids.

Two independent families of cross-checks live here.

Recursion family: the effective-action coefficients (A scalar, B per mode,
C per mode pair) of the time-sliced vacuum-to-vacuum amplitude obey
explicit first-order difference equations; iterating them is an
explicit-Euler march whose epsilon -> 0 limit must agree with the
closed-form second-order coefficient A (double time integrals done
analytically per mode).  The recursion keeps the nonlinear B*B and C*B
terms even though they only enter at fourth order in the coupling; their
smallness under coupling rescaling is itself one of the checks.

Momentum family: the center-of-mass momentum shift accumulated over a
time tau, the force mode sum, and the moment generating function Z(J) are
all evaluated on the same truncated mode set with per-mode analytic time
integrals.  d/dtau of the momentum must match the force, and the
J-derivative of log Z must match the momentum.  Only reflection terms
(those transferring 2 k_z) enter, with the wall-parallel Doppler phase
dropped as in the continuum formulas, which is what makes parallel-motion
invariance exact on any truncation.

These oracles validate structure (convergence order, term content,
symmetries), not continuum values; the continuum limit is owned by the
steady-state and transient modules.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import (AtomParams, ModeGrid, Polarization, WaveVector,
                    mode_function, mode_stencil)


@dataclass(frozen=True)
class PathSpec:
    """Straight-line center-of-mass path X(s) = x0 + (xf - x0)(s - t)/tau."""

    x0: tuple
    xf: tuple
    t: float
    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("PathSpec.tau must be > 0")
        object.__setattr__(self, "x0", tuple(float(x) for x in self.x0))
        object.__setattr__(self, "xf", tuple(float(x) for x in self.xf))
        if len(self.x0) != 3 or len(self.xf) != 3:
            raise ValueError("x0 and xf must be 3-vectors")

    def position(self, s: float) -> np.ndarray:
        frac = (s - self.t) / self.tau
        x0 = np.array(self.x0)
        return x0 + (np.array(self.xf) - x0) * frac

    @property
    def velocity(self) -> np.ndarray:
        return (np.array(self.xf) - np.array(self.x0)) / self.tau


@dataclass(frozen=True)
class PropagatorState:
    """Effective-action coefficients after step_count explicit steps."""

    a: complex
    b: np.ndarray
    c_mat: np.ndarray
    step_count: int
    epsilon: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        c = np.asarray(self.c_mat, dtype=complex)
        if b.ndim != 1 or c.shape != (b.size, b.size):
            raise ValueError("b must be (M,) and c_mat (M, M)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.step_count < 0:
            raise ValueError("step_count must be >= 0")
        if self.step_count == 0:
            if self.a != 0 or np.any(b != 0) or np.any(c != 0):
                raise ValueError("factorized initial state requires all "
                                 "coefficients zero at step_count = 0")
        if not (np.all(np.isfinite(b.view(float)))
                and np.all(np.isfinite(c.view(float)))
                and cmath.isfinite(self.a)):
            raise OverflowError("propagator coefficients overflowed")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c_mat", c)


def initial_state(n_modes: int, epsilon: float) -> PropagatorState:
    return PropagatorState(a=0.0 + 0.0j, b=np.zeros(n_modes, dtype=complex),
                           c_mat=np.zeros((n_modes, n_modes), dtype=complex),
                           step_count=0, epsilon=epsilon)


def _mode_data(grid: ModeGrid, params: AtomParams):
    modes = mode_stencil(grid)
    omegas = np.array([params.c * m.k for m in modes])
    return modes, omegas


def step_recursion(state: PropagatorState, path: PathSpec, grid: ModeGrid,
                   params: AtomParams) -> PropagatorState:
    """One explicit epsilon-step of the A, B, C difference equations.

    Mode functions are evaluated at the path position of the new time
    slice.  The B*B and C*B products are kept; they contribute at fourth
    order in the coupling.  The dipole sits along the wall normal with the
    negative sign convention for the dipole coupling.
    """
    modes, omegas = _mode_data(grid, params)
    M = len(modes)
    if state.b.size != M:
        raise ValueError("state size does not match the mode grid")
    eps = state.epsilon
    s_new = path.t + (state.step_count + 1) * eps
    x = path.position(s_new)
    L = grid.box_side

    U = np.array([mode_function(m, x[:2], float(x[2]), L) for m in modes])
    sq = np.sqrt(omegas)
    lam2 = params.lambda2
    gp = -math.sqrt(params.g2 * params.pz2)
    w0 = params.omega0

    u_z = U[:, 2]
    uu = np.conj(U) @ U.T                      # u_k^dagger . u_l
    uu_dd = np.conj(U) @ np.conj(U).T          # u_k^dagger . u_l^dagger
    g_vec = gp * u_z / sq                      # (g/sqrt(w)) (p . u)
    g_vec_conj = gp * np.conj(u_z) / sq        # (g/sqrt(w)) (p . u^dagger)

    a, b, c = state.a, state.b, state.c_mat

    a_new = (a
             - 1j * eps * lam2 * np.sum(np.real(np.diag(uu)) / omegas)
             - 1j * eps * np.sum(g_vec * b))

    w_mat = uu / np.outer(sq, sq)
    b_new = ((1.0 - 1j * w0 * eps - 1j * omegas * eps) * b
             - 1j * eps * g_vec_conj
             + 1j * eps * np.sum(g_vec * b) * b
             - 2j * eps * lam2 * (w_mat @ b)
             - 2j * eps * (c @ g_vec))

    c_new = ((1.0 - 1j * eps * (omegas[:, None] + omegas[None, :])) * c
             - 1j * eps * lam2 * uu_dd / np.outer(sq, sq)
             - 2j * eps * lam2 * (c @ w_mat.T)
             - 2j * eps * lam2 * (w_mat @ c)
             - 2j * eps * np.outer(b, c @ g_vec)
             - 1j * eps * np.outer(b, g_vec_conj))

    return PropagatorState(a=complex(a_new), b=b_new, c_mat=c_new,
                           step_count=state.step_count + 1, epsilon=eps)


def run_recursion(path: PathSpec, grid: ModeGrid, params: AtomParams,
                  n_steps: int) -> PropagatorState:
    """March the difference equations across the whole path."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    state = initial_state(len(grid.k_values), path.tau / n_steps)
    for _ in range(n_steps):
        state = step_recursion(state, path, grid, params)
    return state


def _exp_integral(x: complex, tau: float) -> complex:
    """E(X, tau) = Int_0^tau e^{i X s} ds, stable for small X tau."""
    w = 1j * x * tau
    if abs(w) < 1e-3:
        return tau * (1.0 + w / 2.0 + w**2 / 6.0 + w**3 / 24.0 + w**4 / 120.0)
    return (cmath.exp(w) - 1.0) / (1j * x)


def _double_exp_integral(p: complex, q: complex, tau: float) -> complex:
    """DD(P, Q, tau) = Int_0^tau dx e^{i P x} Int_0^x dy e^{i Q y}."""
    wq = 1j * q * tau
    wp = 1j * p * tau
    if abs(wq) >= 1e-3:
        return (_exp_integral(p + q, tau) - _exp_integral(p, tau)) / (1j * q)
    if abs(wp) < 1e-3:
        total = 0.0 + 0.0j
        for n in range(6):
            for m in range(6):
                total += (wq**n * wp**m * tau**2
                          / (math.factorial(n + 1) * math.factorial(m)
                             * (m + n + 2)))
        return total
    # small Q, general P: expand the inner integral only
    total = 0.0 + 0.0j
    x_m = _exp_integral(p, tau)          # Int x^0 e^{iPx}
    for n in range(6):
        # X_{n+1} = Int_0^tau x^{n+1} e^{iPx} dx via upward recurrence
        x_m = (tau ** (n + 1) * cmath.exp(1j * p * tau) - (n + 1) * x_m) / (1j * p)
        total += (1j * q) ** n / math.factorial(n + 1) * x_m
    return total


def second_order_A(path: PathSpec, grid: ModeGrid, params: AtomParams) -> complex:
    """Closed-form second-order coefficient A(t + tau) on the truncated grid.

    A = -i Int ds sum_k (lambda^2/w_k) |u_k(X(s))|^2
        - Int ds Int_t^s dr sum_k (g^2 pz^2/w_k) e^{-i(w_k+w0)(s-r)}
          (p . u_k(X(s))) (p . u_k*(X(r)))

    with all time integrals done analytically per mode; the straight-line
    path makes every term an exponential in the slice times.
    """
    modes, omegas = _mode_data(grid, params)
    L = grid.box_side
    vel = path.velocity
    x0 = path.position(path.t)
    tau = path.tau
    lam2 = params.lambda2
    g2pz2 = params.g2 * params.pz2
    w0 = params.omega0
    amp = math.sqrt(2.0 / L**3)

    total = 0.0 + 0.0j
    for m, w in zip(modes, omegas):
        kz = m.k_z
        kpar = m.k_par
        khat = np.array([math.cos(m.phi), math.sin(m.phi), 0.0])
        kap0 = kpar * float(khat @ x0)
        kap1 = kpar * float(khat @ vel)
        z0 = float(x0[2])
        vz = float(vel[2])

        # |u(X(s))|^2 : TE has sin^2(kz z), TM has sin^2(theta) cos^2 +
        # cos^2(theta) sin^2; Int ds of cos(2 kz z(s)) via E.
        cos2_int = (cmath.exp(2j * kz * z0) * _exp_integral(2.0 * kz * vz, tau)).real
        sin2_int = 0.5 * (tau - cos2_int)
        if m.polarization is Polarization.TE:
            norm_int = amp**2 * sin2_int
        else:
            st2 = math.sin(m.theta) ** 2
            ct2 = math.cos(m.theta) ** 2
            cos_sq_int = 0.5 * (tau + cos2_int)
            norm_int = amp**2 * (st2 * cos_sq_int + ct2 * sin2_int)
        total += -1j * (lam2 / w) * norm_int

        # dipole term: only the z-component couples, so only TM contributes
        if m.polarization is Polarization.TM:
            st = math.sin(m.theta)
            # u_z(s) = sum_{s1=+-} (amp st / 2) e^{i s1 kz z0} e^{i kap0}
            #          e^{i (s1 kz vz + kap1) s}
            coefs = []
            for s1 in (+1.0, -1.0):
                coefs.append(((amp * st / 2.0)
                              * cmath.exp(1j * (s1 * kz * z0 + kap0)),
                              s1 * kz * vz + kap1))
            dd_sum = 0.0 + 0.0j
            for a1, mu1 in coefs:
                for a2, mu2 in coefs:
                    dd = _double_exp_integral(mu1 - (w + w0),
                                              (w + w0) - mu2, tau)
                    dd_sum += a1 * np.conj(a2) * dd
            total += -(g2pz2 / w) * dd_sum
    return complex(total)


def _mode_geometry(m: WaveVector):
    """(k_z, polarization weight) entering the reflection mode sums:
    TE weight 1, TM weight cos(2 theta)."""
    if m.polarization is Polarization.TE:
        return m.k_z, 1.0
    return m.k_z, math.cos(2.0 * m.theta)


def _vz_of(v) -> float:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.size == 1:
        return float(arr[0])
    if arr.size == 3:
        return float(arr[2])
    raise ValueError("v must be a scalar (wall-normal) or a 3-vector")


def _per_mode_momentum(r, vz, tau, m, w, params, L):
    """Wall-normal momentum shift contributed by one mode after tau."""
    kz, cw = _mode_geometry(m)
    if kz == 0.0:
        return 0.0
    gamma = (2.0 / L**3) * kz * cw
    lam_term = -(params.lambda2 / w) * gamma * (
        cmath.exp(2j * kz * r) * _exp_integral(2.0 * kz * vz, tau)).imag
    om = w + params.omega0
    dd_a = cmath.exp(2j * kz * r) * _double_exp_integral(
        kz * vz - om, kz * vz + om, tau)
    dd_b = cmath.exp(-2j * kz * r) * _double_exp_integral(
        -kz * vz - om, -kz * vz + om, tau)
    g_term = (params.g2 * params.pz2 / w) * (gamma / 2.0) * (dd_a - dd_b).real
    return lam_term + g_term


def momentum_expectation(r: float, v, tau: float, grid: ModeGrid,
                         params: AtomParams) -> np.ndarray:
    """Momentum shift P(t + tau) - P0 on the truncated grid.

    Only the wall-normal component is nonzero; wall-parallel velocity
    components do not enter at all (exact invariance on any truncation).
    Time integrals are analytic per mode.
    """
    if not (r > 0):
        raise ValueError("r must be > 0")
    if not (tau > 0):
        raise ValueError("tau must be > 0")
    vz = _vz_of(v)
    modes, omegas = _mode_data(grid, params)
    L = grid.box_side
    pz = sum(_per_mode_momentum(r, vz, tau, m, w, params, L)
             for m, w in zip(modes, omegas))
    return np.array([0.0, 0.0, pz])


def force_mode_sum(r: float, v, tau: float, grid: ModeGrid,
                   params: AtomParams) -> float:
    """Wall-normal force mode sum at time tau on the same truncation.

    Analytic d/dtau of momentum_expectation, term by term; the
    consistency of the two against numerical differencing is one of the
    acceptance checks.
    """
    if not (r > 0):
        raise ValueError("r must be > 0")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    vz = _vz_of(v)
    modes, omegas = _mode_data(grid, params)
    L = grid.box_side
    total = 0.0
    for m, w in zip(modes, omegas):
        kz, cw = _mode_geometry(m)
        if kz == 0.0:
            continue
        gamma = (2.0 / L**3) * kz * cw
        lam_term = -(params.lambda2 / w) * gamma * math.sin(
            2.0 * kz * (r + vz * tau))
        om = w + params.omega0
        e_a = (cmath.exp(1j * (2.0 * kz * r + kz * vz * tau - om * tau))
               * _exp_integral(kz * vz + om, tau))
        e_b = (cmath.exp(-1j * (2.0 * kz * r + kz * vz * tau + om * tau))
               * _exp_integral(om - kz * vz, tau))
        g_term = (params.g2 * params.pz2 / w) * (gamma / 2.0) * (e_a - e_b).real
        total += lam_term + g_term
    return total


def generating_function_check(r: float, v, tau: float, grid: ModeGrid,
                              params: AtomParams, j) -> complex:
    """Moment generating function Z(J) on the truncated grid.

    log Z collects, per mode, the reflection terms weighted by
    e^{i k_z J_z} plus the J-independent same-photon normalization term;
    (hbar/i) d log Z / dJ_z at J = 0 reproduces the wall-normal momentum
    shift.  Z(0) is real and positive after conjugate pairing.
    """
    if not (r > 0):
        raise ValueError("r must be > 0")
    if not (tau > 0):
        raise ValueError("tau must be > 0")
    vz = _vz_of(v)
    jz = float(np.atleast_1d(np.asarray(j, dtype=float))[-1])
    modes, omegas = _mode_data(grid, params)
    L = grid.box_side
    log_z = 0.0 + 0.0j
    for m, w in zip(modes, omegas):
        kz, _ = _mode_geometry(m)
        om = w + params.omega0
        if kz > 0.0:
            c_m = _per_mode_momentum(r, vz, tau, m, w, params, L) / kz
            log_z += c_m * cmath.exp(1j * kz * jz)
        # same-photon (translation-invariant) term: no J, no net recoil
        dd_norm = _double_exp_integral(-om, om, tau)
        log_z += -(params.g2 * params.pz2 / w) * (2.0 / L**3) * dd_norm.real
    return cmath.exp(log_z)
