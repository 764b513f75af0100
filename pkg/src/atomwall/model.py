"""Physical parameters, unit conventions, and conducting-wall mode functions.

Natural units with hbar = 1 throughout; the speed of light is a field of
AtomParams so both pure natural units (c = 1) and atomic units
(c = 137.036) are supported.  The coupling normalization ties the squared
diamagnetic coupling to the static polarizability,

    lambda^2 = pi * alpha0 * omega0^2,       g^2 * pz^2 = lambda^2 * omega0,

the second relation being the Thomas-Reiche-Kuhn sum rule.  Only the
products lambda^2 and g^2*pz^2 enter any force formula, so pz^2 is fixed
to 1 and g2 carries the full product.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# Speed of light in atomic units (hartree units of velocity).
ATOMIC_UNITS_C = 137.036

# Optical alkali transition (sodium D-line scale): omega0 = 0.057 hartree,
# expressed in c = 1 units where time is measured in lengths, and the
# matching static polarizability in bohr^3.  These drive the built-in
# figure-reproduction presets, which place the light round trip at tau = 2R.
ALKALI_OMEGA0_AU = 0.057
ALKALI_ALPHA0_AU = 162.7
ALKALI_OMEGA0_C1 = ALKALI_OMEGA0_AU / ATOMIC_UNITS_C

_REL_EPS = 1e-12


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom coupled to the EM vacuum near a conducting wall.

    omega0   : transition angular frequency (1/time)
    alpha0   : static ground-state polarizability (length^3)
    pz2      : ground-state expectation of the squared dipole-momentum
               component (conventionally 1)
    g2       : squared dipole coupling, carrying the product g^2 pz^2
    lambda2  : squared diamagnetic coupling
    c        : speed of light
    """

    omega0: float
    alpha0: float
    pz2: float
    g2: float
    lambda2: float
    c: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "alpha0", "pz2", "g2", "lambda2", "c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"AtomParams.{name} must be finite and > 0, got {v!r}")
        trk = abs(self.lambda2 * self.omega0 - self.g2 * self.pz2)
        if trk > 64 * _REL_EPS * self.g2 * self.pz2:
            raise ValueError(
                "TRK sum rule violated: lambda2*omega0 != g2*pz2 "
                f"(residual {trk:.3e})"
            )
        norm = abs(self.lambda2 - math.pi * self.alpha0 * self.omega0**2)
        if norm > 64 * _REL_EPS * self.lambda2:
            raise ValueError(
                "coupling normalization violated: lambda2 != pi*alpha0*omega0^2 "
                f"(residual {norm:.3e})"
            )


def make_atom_params(omega0: float, alpha0: float, c: float = 1.0) -> AtomParams:
    """Build AtomParams from the transition frequency and polarizability.

    Sets lambda2 = pi*alpha0*omega0^2 and g2 = lambda2*omega0 with pz2 = 1,
    so both type invariants hold by construction.
    """
    if not (omega0 > 0 and alpha0 > 0 and c > 0):
        raise ValueError(
            f"make_atom_params requires positive inputs, got "
            f"omega0={omega0}, alpha0={alpha0}, c={c}"
        )
    lambda2 = math.pi * alpha0 * omega0**2
    return AtomParams(omega0=omega0, alpha0=alpha0, pz2=1.0,
                      g2=lambda2 * omega0, lambda2=lambda2, c=c)


def scale_couplings(params: AtomParams, factor: float) -> AtomParams:
    """Scale both couplings by `factor` (g -> factor*g, lambda -> factor*lambda).

    Used by the truncated-grid oracles to push quartic terms below the
    quadratic ones; the TRK relation is preserved, and alpha0 is rescaled
    accordingly so the normalization invariant stays intact.
    """
    if factor <= 0:
        raise ValueError("coupling scale factor must be positive")
    f2 = factor * factor
    return AtomParams(omega0=params.omega0, alpha0=params.alpha0 * f2,
                      pz2=params.pz2, g2=params.g2 * f2,
                      lambda2=params.lambda2 * f2, c=params.c)


@dataclass(frozen=True)
class Kinematics:
    """Atom position and motion relative to the wall.

    r  : distance from the wall (> 0)
    v  : wall-normal velocity, positive = away from the wall
    r0 : release distance (may be math.inf for release at infinity)
    """

    r: float
    v: float = 0.0
    r0: float = math.inf

    def __post_init__(self):
        if not (self.r > 0):
            raise ValueError(f"Kinematics.r must be > 0, got {self.r}")
        if not (self.r0 > 0):
            raise ValueError(f"Kinematics.r0 must be > 0 (or inf), got {self.r0}")

    def check_adiabatic(self, params: AtomParams) -> None:
        """Enforce the non-relativistic bound |v|/c < 1/2."""
        if abs(self.v) / params.c >= 0.5:
            raise ValueError(
                f"|v|/c = {abs(self.v) / params.c:.3f} violates the "
                "adiabaticity bound 1/2"
            )


@dataclass(frozen=True)
class WaveVector:
    """Half-space wavevector: magnitude k, angle theta from the wall normal
    (in [0, pi/2] so k_z >= 0), azimuth phi, and TE/TM polarization."""

    k: float
    theta: float
    phi: float
    polarization: Polarization

    def __post_init__(self):
        if not (self.k > 0):
            raise ValueError(f"WaveVector.k must be > 0, got {self.k}")
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ValueError("WaveVector.theta must lie in [0, pi/2]")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValueError("WaveVector.phi must lie in [0, 2*pi)")

    @property
    def k_z(self) -> float:
        return self.k * math.cos(self.theta)

    @property
    def k_par(self) -> float:
        return self.k * math.sin(self.theta)


@dataclass(frozen=True)
class ModeGrid:
    """Truncated mode set for the desk-scale oracles.

    k_values : strictly increasing wavevector magnitudes
    box_side : quantization length L
    excited_states : fixed to 1 (two-level atom)
    """

    k_values: tuple
    box_side: float
    excited_states: int = 1

    def __post_init__(self):
        ks = tuple(float(k) for k in self.k_values)
        object.__setattr__(self, "k_values", ks)
        if len(ks) == 0:
            raise ValueError("ModeGrid.k_values must be nonempty")
        if any(k <= 0 for k in ks):
            raise ValueError("ModeGrid.k_values must be positive")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("ModeGrid.k_values must be strictly increasing")
        if self.box_side <= 0:
            raise ValueError("ModeGrid.box_side must be > 0")
        if self.excited_states != 1:
            raise ValueError("ModeGrid.excited_states is fixed to 1")


def mode_function(wv: WaveVector, x_par, z: float, box_side: float) -> np.ndarray:
    """Spatial mode function at (x_par, z) for a conducting wall at z = 0.

    TE:  sqrt(2/L^3) (khat_par x zhat) sin(k_z z) e^{i k_par . x_par}
    TM:  sqrt(2/L^3) (1/k) [k_par zhat cos(k_z z) - i k_z khat_par sin(k_z z)]
         e^{i k_par . x_par}

    Returns the complex 3-component amplitude.  The tangential components
    vanish at the conductor: TE entirely, TM's khat_par part.
    """
    if z < 0:
        raise ValueError(f"z = {z} is behind the wall (z >= 0 required)")
    if box_side <= 0:
        raise ValueError("box_side must be > 0")
    L = box_side
    amp = math.sqrt(2.0 / L**3)
    kz = wv.k_z
    kpar = wv.k_par
    khat_par = np.array([math.cos(wv.phi), math.sin(wv.phi), 0.0])
    zhat = np.array([0.0, 0.0, 1.0])
    x_par = np.asarray(x_par, dtype=float)
    phase = np.exp(1j * kpar * float(khat_par[:2] @ x_par[:2]))
    if wv.polarization is Polarization.TE:
        pol_vec = np.array([math.sin(wv.phi), -math.cos(wv.phi), 0.0])
        return amp * math.sin(kz * z) * phase * pol_vec.astype(complex)
    vec = (kpar * zhat * math.cos(kz * z)
           - 1j * kz * khat_par * math.sin(kz * z)) / wv.k
    return amp * phase * vec


# Golden-ratio angular increments for the deterministic half-space stencil.
_MU_STEP = 0.6180339887498949
_PHI_STEP = 2.399963229728653


def mode_stencil(grid: ModeGrid) -> tuple:
    """Expand a ModeGrid into concrete wavevectors on a fixed half-space
    stencil: each magnitude gets one low-discrepancy direction and an
    alternating polarization.  Deterministic, so both sides of any
    truncated-grid consistency check see the identical mode set."""
    out = []
    for i, k in enumerate(grid.k_values):
        mu = 0.05 + ((0.17 + i * _MU_STEP) % 1.0) * 0.9
        theta = math.acos(mu)
        phi = (i * _PHI_STEP) % (2 * math.pi)
        pol = Polarization.TE if i % 2 == 0 else Polarization.TM
        out.append(WaveVector(k=k, theta=theta, phi=phi, polarization=pol))
    return tuple(out)
