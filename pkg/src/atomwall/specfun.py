"""Auxiliary special functions and analytic kernel derivatives.

Everything here serves the closed-form force expressions.  The central
objects are the Laplace-type auxiliary pair

    f(z) = Int_0^inf e^{-z t} / (1 + t^2) dt
    g(z) = Int_0^inf t e^{-z t} / (1 + t^2) dt        (z > 0)

with the derivative recurrences f' = -g and g' = f - 1/z, which close the
family: every d^n/dr^n of the wall kernel

    I(r) = Int_0^inf e^{-2 r x / c} / (x^2 + omega0^2) dx = f(2 r omega0 / c) / omega0

is a finite combination of f, g and inverse powers.  All distance
derivatives in this package are taken through these recurrences, never by
numerical differencing: a third difference of a quadratured function would
amplify quadrature noise by ~h^-3.

The conditionally convergent wavevector-space kernel

    K(r) = Int_0^inf sin(2 k r) / (2 k r (k c + omega0)) dk

is evaluated by exponential damping e^{-eta k} with an extrapolation
ladder eta -> 0; it is the independent cross-representation oracle for the
f/g route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError
from .model import AtomParams

if TYPE_CHECKING:  # pragma: no cover - annotation only, no runtime cycle
    from .transient import QuadratureConfig

_ASYMPTOTIC_Z = 30.0
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def _f_quad(z: float) -> tuple[float, float]:
    val, err = quad(lambda t: math.exp(-z * t) / (1.0 + t * t), 0.0, np.inf,
                    epsabs=1e-14, epsrel=1e-13, limit=200)
    return val, err


def _g_quad(z: float) -> tuple[float, float]:
    val, err = quad(lambda t: t * math.exp(-z * t) / (1.0 + t * t), 0.0, np.inf,
                    epsabs=1e-14, epsrel=1e-13, limit=200)
    return val, err


def _f_asymptotic(z: float) -> tuple[float, float]:
    # f(z) ~ sum (-1)^n (2n)! / z^{2n+1}; truncate at the smallest term.
    total = 0.0
    term = 1.0 / z
    n = 0
    while True:
        total += term
        nxt = -term * (2 * n + 1) * (2 * n + 2) / (z * z)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        n += 1
    return total, abs(term)


def _g_asymptotic(z: float) -> tuple[float, float]:
    # g(z) ~ sum (-1)^n (2n+1)! / z^{2n+2}
    total = 0.0
    term = 1.0 / (z * z)
    n = 0
    while True:
        total += term
        nxt = -term * (2 * n + 2) * (2 * n + 3) / (z * z)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        n += 1
    return total, abs(term)


def _f_with_err(z: float) -> tuple[float, float]:
    if z >= _ASYMPTOTIC_Z:
        return _f_asymptotic(z)
    return _f_quad(z)


def _g_with_err(z: float) -> tuple[float, float]:
    if z >= _ASYMPTOTIC_Z:
        return _g_asymptotic(z)
    return _g_quad(z)


def auxiliary_f(z: float) -> float:
    """f(z) = Int_0^inf e^{-zt}/(1+t^2) dt for z > 0.

    Adaptive quadrature below z = 30, asymptotic inverse-power series
    above; the switchover is validated by overlap tests.  Monotonically
    decreasing with 0 < f(z) < min(pi/2, 1/z).
    """
    if not (z > 0):
        raise ValueError(f"auxiliary_f requires z > 0, got {z}")
    return _f_with_err(z)[0]


def auxiliary_g(z: float) -> float:
    """Companion moment g(z) = Int_0^inf t e^{-zt}/(1+t^2) dt, z > 0.

    Needed because f' = -g; same evaluation strategy as auxiliary_f.
    """
    if not (z > 0):
        raise ValueError(f"auxiliary_g requires z > 0, got {z}")
    return _g_with_err(z)[0]


@dataclass(frozen=True)
class KernelEval:
    value: float
    abs_error_estimate: float

    def __post_init__(self):
        if not (math.isfinite(self.abs_error_estimate)
                and self.abs_error_estimate >= 0):
            raise ValueError("abs_error_estimate must be finite and >= 0")


def laplace_kernel(r: float, params: AtomParams) -> KernelEval:
    """I(r) = Int_0^inf e^{-2rx/c}/(x^2+omega0^2) dx = f(2 r omega0/c)/omega0."""
    if not (r > 0):
        raise ValueError(f"laplace_kernel requires r > 0, got {r}")
    z = 2.0 * r * params.omega0 / params.c
    fv, fe = _f_with_err(z)
    return KernelEval(value=fv / params.omega0,
                      abs_error_estimate=fe / params.omega0)


def _f_derivative_chain(z: float, n: int) -> tuple[list[float], float]:
    """[f, f', ..., f^(n)](z) via f' = -g, g' = f - 1/z; returns the list and
    a shared absolute error scale."""
    fv, fe = _f_with_err(z)
    gv, ge = _g_with_err(z)
    err = fe + ge
    derivs = [fv]
    if n >= 1:
        derivs.append(-gv)
    if n >= 2:
        derivs.append(1.0 / z - fv)
    if n >= 3:
        derivs.append(-1.0 / z**2 + gv)
    if n >= 4:
        derivs.append(2.0 / z**3 + fv - 1.0 / z)
    if n >= 5:
        derivs.append(-6.0 / z**4 - gv + 1.0 / z**2)
    return derivs, err


def kernel_deriv(r: float, n: int, params: AtomParams) -> KernelEval:
    """d^n/dr^n [ (1/r) I(r) ] for 0 <= n <= 5, fully analytic.

    Leibniz expansion over the product f(2 r omega0/c) * (1/r); each
    f-derivative comes from the closed recurrences, so no numerical
    differencing enters at any order.
    """
    if not (r > 0):
        raise ValueError(f"kernel_deriv requires r > 0, got {r}")
    if not (isinstance(n, int) and 0 <= n <= 5):
        raise ValueError(f"kernel_deriv order n must be an integer in 0..5, got {n}")
    w0, c = params.omega0, params.c
    beta = 2.0 * w0 / c
    z = beta * r
    fd, ferr = _f_derivative_chain(z, n)
    total = 0.0
    abs_terms = 0.0
    for j in range(n + 1):
        term = (math.comb(n, j) * beta**j * fd[j]
                * (-1.0) ** (n - j) * math.factorial(n - j) / r ** (n - j + 1))
        total += term
        abs_terms += abs(term)
    err = (abs_terms * 1e-14 + ferr * (beta + 1.0 / r) ** n * (n + 1)) / w0
    return KernelEval(value=total / w0, abs_error_estimate=err)


def angular_sin_moment(a):
    """M(a) = Int_0^1 mu^3 sin(a mu) dmu, vectorized and entire in a.

    Closed form [(6a - a^3) cos a + (3a^2 - 6) sin a]/a^4 with a Taylor
    branch below |a| = 0.5 to dodge the cancellation.  Satisfies
    d^3/dr^3 [sin(2kr)/(2kr)] = 8 k^3 M(2kr), which is how the angular
    half-space integral of the mode sums is folded in analytically.
    """
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    small = np.abs(a) < 0.5
    asm = a[small]
    out[small] = (asm / 5.0 - asm**3 / 42.0 + asm**5 / 1080.0
                  - asm**7 / 55440.0 + asm**9 / 4323456.0)
    al = a[~small]
    out[~small] = ((6.0 * al - al**3) * np.cos(al)
                   + (3.0 * al**2 - 6.0) * np.sin(al)) / al**4
    return out if out.shape else float(out)


def damped_oscillatory_integral(fun: Callable, k_hi: float, osc_freq: float,
                                eta: float, envelope_scale: float,
                                max_panels: int = 3_000_000) -> float:
    """Int_0^k_hi fun(k) e^{-eta k} dk by composite 8-point Gauss-Legendre
    panels sized to resolve both the oscillation and the envelope.

    `fun` must accept numpy arrays.  Panel width is capped at a half
    period pi/osc_freq and a quarter of the envelope scale.
    """
    width = min(math.pi / max(osc_freq, 1e-300), envelope_scale / 4.0, k_hi / 8.0)
    n_pan = min(max(int(math.ceil(k_hi / width)), 8), max_panels)
    edges = np.linspace(0.0, k_hi, n_pan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    hw = 0.5 * (edges[1:] - edges[:-1])[:, None]
    kk = mid + hw * _GL8_X[None, :]
    vals = fun(kk) * np.exp(-eta * kk) * hw * _GL8_W[None, :]
    return float(vals.sum())


def extrapolate_to_zero(etas, values) -> tuple[float, float, tuple[float, float]]:
    """Neville polynomial extrapolation of values(eta) to eta = 0.

    Returns (limit, error_estimate, last_two_column_values); the error is
    the spread between the last two extrapolation orders.
    """
    x = np.asarray(etas, dtype=float)
    tab = np.asarray(values, dtype=float).copy()
    n = len(x)
    if n < 2:
        return float(tab[0]), abs(float(tab[0])), (float(tab[0]), float(tab[0]))
    prev = tab[0]
    for j in range(1, n):
        for i in range(n - j):
            tab[i] = (x[i + j] * tab[i] - x[i] * tab[i + 1]) / (x[i + j] - x[i])
        if j == n - 2:
            prev = tab[0]
    return float(tab[0]), abs(float(tab[0]) - float(prev)), (float(prev), float(tab[0]))


def ladder_etas(eta_ladder, params: AtomParams, osc_freq: float) -> np.ndarray:
    """Absolute damping values for a phase e^{i * osc_freq * k}.

    The configured ladder is in units of c/omega0.  The damped integral
    varies in eta on the scale of the phase frequency, so the ladder is
    additionally scaled down whenever osc_freq < c/omega0; this keeps the
    extrapolation parameter eta/osc_freq uniformly small."""
    scale = min(params.c / params.omega0, max(osc_freq, 1e-300))
    return np.asarray(eta_ladder, dtype=float) * scale


def oscillatory_k_integral(r: float, params: AtomParams,
                           cfg: "QuadratureConfig | None" = None) -> KernelEval:
    """K(r) = Int_0^inf sin(2kr) / (2kr (kc + omega0)) dk.

    Damped with e^{-eta k} on the configured ladder and polynomially
    extrapolated to eta = 0.  The integrand is finite at k = 0 (limit
    1/omega0) and the hard cutoff sits where the damping has already
    killed the tail.  Raises ConvergenceError, carrying the last two
    extrapolation iterates, if the ladder fails the configured tolerance.
    """
    if not (r > 0):
        raise ValueError(f"oscillatory_k_integral requires r > 0, got {r}")
    if cfg is None:
        from .transient import QuadratureConfig
        cfg = QuadratureConfig()
    w0, c = params.omega0, params.c
    etas = ladder_etas(cfg.eta_ladder, params, 2.0 * r)

    def integrand(k):
        return np.where(k > 0.0,
                        np.sin(2.0 * k * r) / (2.0 * np.maximum(k, 1e-300) * r
                                               * (k * c + w0)),
                        1.0 / w0)

    k_max_abs = cfg.k_max * w0 / c
    vals = []
    for eta in etas:
        k_hi = min(45.0 / eta, k_max_abs)
        vals.append(damped_oscillatory_integral(
            integrand, k_hi, 2.0 * r, eta, c / w0,
            max_panels=cfg.max_subdivisions * 10_000))
    limit, err, last_two = extrapolate_to_zero(etas, vals)
    if not math.isfinite(limit) or err > max(cfg.rel_tol * abs(limit), 1e-300) * 50:
        raise ConvergenceError(
            f"damping ladder did not converge for K(r={r}): "
            f"last two iterates {last_two}", last_two=last_two)
    return KernelEval(value=limit, abs_error_estimate=err)
