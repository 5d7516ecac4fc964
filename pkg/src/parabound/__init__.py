"""parabound: a numerical laboratory for sup bounds of nonlinear
diffusion u_t = div(c |grad u|^{p-2} grad u).

The package solves the equation implicitly on space-time grids, runs
level-set truncation energetics over shrinking cylinders, and measures
how the resulting sup bounds behave as p crosses 2: the improved
estimates stay put while the classical two-regime exponents blow up
like 1/|p-2|.
"""

from ._kernels import BACKEND
from .cylinders import (Cylinder, ExpandSchedule, ShrinkSchedule,
                        average, ball_mask, ball_volume, cylinder_mask,
                        integrate, level_schedule, scale_factor_A,
                        shrinking_radii, sup_over, time_mask)
from .degiorgi import (DEFAULT_C0, BoundReport, IterationTrace,
                       RecursionConstants, VerifyResult, a_k_value,
                       choose_k, compute_Yi, geometric_lemma,
                       recursion_rhs, thm1_bound, thm1_exponent,
                       verify_degiorgi)
from .energy import (CaccioppoliSides, Cutoff, build_cutoff,
                     caccioppoli_sides, combined_energy_bound,
                     sobolev_sides)
from .errors import (AdmissibilityError, BoundaryError, ConfigError,
                     CylinderOutOfGrid, DimensionError, GridTooCoarse,
                     InsufficientData, NonConvergence, ParaboundError,
                     RangeError)
from .fields import (bump_field, constant_field, hat_field, random_nonneg,
                     random_zero_lateral, smooth_positive_initial,
                     zero_field)
from .grid import Grid, SpaceTimeField
from .iteration2 import (ClassicalBounds, SecondIterationConstants,
                         SecondIterationResult, classical_bounds,
                         degenerate_bound, delta0_root, eps0_admissible,
                         g_window, lambda_r, mn_value, second_iteration,
                         singular_bound, thm2_bound, thm2_exponent,
                         volume_ratio_bound)
from .levelset import (SuperlevelSet, TruncatedField, holder_2_chain,
                       holder_p_chain, measure_bound_check,
                       superlevel_set, trunc_power_integral, truncate)
from .runner import (Scenario, StabilityReport, load_scenario,
                     run_scenario, run_sweep, scenario_from_dict,
                     stability_report)
from .solver import (SolverConfig, StructureCheck, clipped_nonneg,
                     exact_power, flux_nodes, residual, solve,
                     steklov_average, step_implicit, structure_check)
from .structure import (StructureParams, default_eps0, eps0_window_ok,
                        second_eps0, sobolev_q)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
