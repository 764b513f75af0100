"""Casimir-Polder atom-wall forces for stationary and adiabatically moving atoms.

Closed-form steady-state forces and potentials, switch-on transients with
the light-round-trip spike, the coherent factor-of-two correction for
adiabatic motion, and truncated-mode-grid oracles that validate the
analytic formulas from the time-sliced propagator.
"""

__version__ = "0.1.0"

from .adiabatic import (SeriesSumResult, Trajectory, adiabatic_potential,
                        adiabatic_retardation_force, adiabatic_total_force,
                        make_release_trajectory, series_sum,
                        series_term_nested, steady_state_expansion_term)
from .dressing import (PathSpec, PropagatorState, force_mode_sum,
                       generating_function_check, initial_state,
                       momentum_expectation, run_recursion, second_order_A,
                       step_recursion)
from .errors import (ConfigError, ConsistencyError, ConvergenceError,
                     TrajectoryError)
from .model import (ALKALI_ALPHA0_AU, ALKALI_OMEGA0_AU, ALKALI_OMEGA0_C1,
                    ATOMIC_UNITS_C, AtomParams, Kinematics, ModeGrid,
                    Polarization, WaveVector, make_atom_params, mode_function,
                    mode_stencil, scale_couplings)
from .specfun import (KernelEval, angular_sin_moment, auxiliary_f, auxiliary_g,
                      kernel_deriv, laplace_kernel, oscillatory_k_integral)
from .steady import (ForceValue, PotentialValue, classify_regime,
                     electrostatic_force, retardation_potential,
                     stationary_potential, stationary_retardation_force,
                     stationary_retardation_force_k_form,
                     stationary_total_force)
from .transient import (QuadratureConfig, SnapshotPoint, TransientCurve,
                        TransientSample, snapshot_sweep, transient_force,
                        transient_sweep)

__all__ = [
    "ALKALI_ALPHA0_AU", "ALKALI_OMEGA0_AU", "ALKALI_OMEGA0_C1",
    "ATOMIC_UNITS_C", "AtomParams", "ConfigError", "ConsistencyError",
    "ConvergenceError", "ForceValue", "KernelEval", "Kinematics", "ModeGrid",
    "PathSpec", "Polarization", "PotentialValue", "PropagatorState",
    "QuadratureConfig", "SeriesSumResult", "SnapshotPoint", "Trajectory",
    "TrajectoryError", "TransientCurve", "TransientSample", "WaveVector",
    "adiabatic_potential", "adiabatic_retardation_force",
    "adiabatic_total_force", "angular_sin_moment", "auxiliary_f",
    "auxiliary_g", "classify_regime", "electrostatic_force",
    "force_mode_sum", "generating_function_check", "initial_state",
    "kernel_deriv", "laplace_kernel", "make_atom_params",
    "make_release_trajectory", "mode_function", "mode_stencil",
    "momentum_expectation", "oscillatory_k_integral", "retardation_potential",
    "run_recursion", "scale_couplings", "second_order_A", "series_sum",
    "series_term_nested", "snapshot_sweep", "stationary_potential",
    "stationary_retardation_force", "stationary_retardation_force_k_form",
    "stationary_total_force", "steady_state_expansion_term", "step_recursion",
    "transient_force", "transient_sweep",
]
