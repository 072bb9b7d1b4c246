"""Pseudo-spectral laboratory for the bidirectional Whitham system.

The package verifies, at desk scale, the quantitative skeleton of a
constructive well-posedness argument for the two-way fully dispersive
shallow-water system: square-root symmetrization, mollified
regularization, frozen-coefficient linear solves, successive
approximation, and the energy bounds tying them together.
"""

__version__ = "0.1.0"

from .config import Settings, apply_overrides, default_settings, load_settings
from .energy import (EnergyReport, check_interpolation, check_interpolation_sobolev,
                     check_tame_product, l2_norm, lifespan_estimate, max_norm,
                     partial_energy, sobolev_norm, total_energy)
from .errors import (AdmissibilityError, AssumptionViolation, BlowUpError, ConfigError,
                     NonContractionError, ScenarioFailure, WhithamLabError)
from .initial_data import (build_initial_data, cosine_bump, gaussian_like,
                           random_bandlimited)
from .operators import (apply_whitham, apply_whitham_sqrt, bump_transform, kernel_convolve,
                        mollifier_multiplier, mollify, periodic_kernel, whitham_sqrt_symbol,
                        whitham_symbol)
from .reporting import (RunManifest, dump_trajectory, load_manifests, load_state_dump,
                        read_csv, resolve_out_root, trajectory_energy_csv, write_csv)
from .scenarios import (SCENARIOS, ScenarioResult, empirical_lifespans,
                        inequality_suite, mollifier_suite, picard_cascade,
                        run_scenario, sweep)
from .solvers import (DependenceReport, PicardDiagnostics, SolveConfig, Trajectory,
                      cfl_timestep, continuous_dependence_probe, hamiltonian,
                      hamiltonian_series, max_slope_series, picard_iterate,
                      rhs_regularized, solve_direct, solve_linearized,
                      solve_regularized, solve_unidirectional)
from .spectral import (Field, Grid, apply_multiplier, dealias, derivative, forward_transform,
                       from_function, inner, inverse_transform, make_grid)
from .symmetrize import (Admissibility, State, admissible_mu, advection_matrix,
                         dispersion_matrix, from_symmetric, symmetrize_state,
                         to_symmetric)
