"""Stationary-atom force and potential.

Decomposition used throughout the package:

  electrostatic (image) force   F_el(r)  = -3 alpha0 omega0 / (8 r^4)
  retardation correction        F0(r)    =  3 alpha0 omega0 / (8 r^4)
                                           + (alpha0 omega0^2 / 8 pi) d^3/dr^3 [(1/r) I(r)]
  total force                   F_sa(r)  =  F_el(r) + F0(r)
                                         =  (alpha0 omega0^2 / 8 pi) d^3/dr^3 [(1/r) I(r)]

with I(r) the Laplace kernel from specfun.  The last identity is exact:
the combined closed form in the x-representation already contains the
image force, while the wavevector-space representation

  F0(r) = -(alpha0 omega0^2 / 4 pi) d^3/dr^3 K(r)

is retardation-only.  Both representations are implemented, the f/g route
as primary (absolutely convergent) and the damped k-integral as the
verification oracle; their agreement is this module's central theorem.

The potential is U_sa(r) = -(alpha0 omega0^2 / 8 pi) d^2/dr^2 [(1/r) I(r)],
whose negative r-derivative is F_sa.  Asymptotics:

  U_sa -> -alpha0 omega0 / (8 r^3)        r << c/omega0   (van der Waals)
  U_sa -> -3 alpha0 c / (8 pi r^4)        r >> c/omega0   (retarded regime)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .model import AtomParams
from .specfun import (angular_sin_moment, damped_oscillatory_integral,
                      extrapolate_to_zero, kernel_deriv, ladder_etas)
from .errors import ConvergenceError

if TYPE_CHECKING:  # pragma: no cover
    from .transient import QuadratureConfig

REGIME_NEAR_MAX = 0.1
REGIME_FAR_MIN = 10.0


def classify_regime(r: float, params: AtomParams) -> str:
    x = r * params.omega0 / params.c
    if x < REGIME_NEAR_MAX:
        return "near"
    if x > REGIME_FAR_MIN:
        return "far"
    return "intermediate"


@dataclass(frozen=True)
class ForceValue:
    """Wall-normal force component; positive means directed away from the
    wall.  regime is a bookkeeping label from the r*omega0/c thresholds."""

    f_z: float
    abs_error_estimate: float
    regime: str

    def __post_init__(self):
        if not math.isfinite(self.f_z):
            raise ValueError("force must be finite")
        if not (math.isfinite(self.abs_error_estimate)
                and self.abs_error_estimate >= 0):
            raise ValueError("abs_error_estimate must be finite and >= 0")
        if self.regime not in ("near", "intermediate", "far"):
            raise ValueError(f"unknown regime label {self.regime!r}")


@dataclass(frozen=True)
class PotentialValue:
    u: float
    abs_error_estimate: float

    def __post_init__(self):
        if not math.isfinite(self.u):
            raise ValueError("potential must be finite")
        if not (math.isfinite(self.abs_error_estimate)
                and self.abs_error_estimate >= 0):
            raise ValueError("abs_error_estimate must be finite and >= 0")


def electrostatic_force(r: float, params: AtomParams) -> ForceValue:
    """Image (van der Waals) attraction -3 alpha0 omega0 / (8 r^4); exact."""
    if not (r > 0):
        raise ValueError(f"electrostatic_force requires r > 0, got {r}")
    f = -3.0 * params.alpha0 * params.omega0 / (8.0 * r**4)
    return ForceValue(f_z=f, abs_error_estimate=0.0,
                      regime=classify_regime(r, params))


def stationary_retardation_force(r: float, params: AtomParams) -> ForceValue:
    """Steady-state retardation correction F0(r) from the transverse field.

    Evaluated through the x-representation combined closed form minus the
    image term it contains:

        F0(r) = 3 alpha0 omega0/(8 r^4)
                + (alpha0 omega0^2/8 pi) * kernel_deriv(r, 3)

    Repulsive at all distances: it weakens the image attraction, turning
    the far-field force law from r^-4 into r^-5.
    """
    if not (r > 0):
        raise ValueError(f"stationary_retardation_force requires r > 0, got {r}")
    kd = kernel_deriv(r, 3, params)
    pref = params.alpha0 * params.omega0**2 / (8.0 * math.pi)
    f = 3.0 * params.alpha0 * params.omega0 / (8.0 * r**4) + pref * kd.value
    return ForceValue(f_z=f, abs_error_estimate=pref * kd.abs_error_estimate,
                      regime=classify_regime(r, params))


def stationary_total_force(r: float, params: AtomParams) -> ForceValue:
    """Total stationary force: electrostatic plus retardation correction.

    Algebraically equal to (alpha0 omega0^2/8 pi) * kernel_deriv(r, 3);
    attractive at every distance.
    """
    el = electrostatic_force(r, params)
    ret = stationary_retardation_force(r, params)
    return ForceValue(f_z=el.f_z + ret.f_z,
                      abs_error_estimate=el.abs_error_estimate + ret.abs_error_estimate,
                      regime=classify_regime(r, params))


def stationary_potential(r: float, params: AtomParams) -> PotentialValue:
    """U_sa(r) = -(alpha0 omega0^2 / 8 pi) * kernel_deriv(r, 2)."""
    if not (r > 0):
        raise ValueError(f"stationary_potential requires r > 0, got {r}")
    kd = kernel_deriv(r, 2, params)
    pref = params.alpha0 * params.omega0**2 / (8.0 * math.pi)
    return PotentialValue(u=-pref * kd.value,
                          abs_error_estimate=pref * kd.abs_error_estimate)


def retardation_potential(r: float, params: AtomParams) -> PotentialValue:
    """Retardation-only part of the stationary potential,

        U0(r) = U_sa(r) + alpha0 omega0 / (8 r^3),

    whose negative r-derivative is stationary_retardation_force.  Vanishes
    for r -> 0 and r -> inf; the adiabatic potential's residual bracket is
    built from it.
    """
    base = stationary_potential(r, params)
    return PotentialValue(u=base.u + params.alpha0 * params.omega0 / (8.0 * r**3),
                          abs_error_estimate=base.abs_error_estimate)


def stationary_retardation_force_k_form(r: float, params: AtomParams,
                                        cfg: "QuadratureConfig | None" = None
                                        ) -> ForceValue:
    """Independent k-representation of F0(r):

        F0(r) = -(alpha0 omega0^2 / 4 pi) d^3/dr^3 K(r)
              = -(2 alpha0 omega0^2 / pi)
                 Int_0^inf k^3 M(2kr) / (k c + omega0) dk

    with the derivative taken under the integral sign (M is the cubic
    angular moment).  The conditionally convergent integral is damped on
    the config ladder and extrapolated to zero damping.  This shares no
    machinery with the f/g evaluation, which is the point: each
    representation is the other's oracle.
    """
    if not (r > 0):
        raise ValueError("r must be > 0")
    if cfg is None:
        from .transient import QuadratureConfig
        cfg = QuadratureConfig(eta_ladder=(0.4, 0.2, 0.1, 0.05, 0.025, 0.0125))
    w0, c = params.omega0, params.c
    etas = ladder_etas(cfg.eta_ladder, params, 2.0 * r)

    def integrand(k):
        return k**3 * angular_sin_moment(2.0 * k * r) / (k * c + w0)

    vals = []
    for eta in etas:
        k_hi = 45.0 / eta
        vals.append(-(2.0 * params.alpha0 * w0**2 / math.pi)
                    * damped_oscillatory_integral(integrand, k_hi, 2.0 * r,
                                                  eta, c / w0))
    limit, err, last_two = extrapolate_to_zero(etas, vals)
    if not math.isfinite(limit):
        raise ConvergenceError("k-form ladder produced a non-finite value",
                               last_two=last_two)
    return ForceValue(f_z=limit, abs_error_estimate=err,
                      regime=classify_regime(r, params))
