"""Kinetic limits of relativistic plasma models: equilibria, stability
criteria, linearized response, spectral field solvers, split transport, and
the coupled model loops."""

__version__ = "0.1.0"

from .equilibria import Equilibrium, MomentConstants, equilibrium, moment_constants
from .phase_space import (DistField, FULL, MomentSet, PERTURBATION, PhaseGrid,
                          boundary_leakage, bootstrap_norm, deposit_moments,
                          rel_velocity, shift_to_g, unshift_from_g,
                          weighted_h_norm)
from .spectral_fields import (DarwinHierarchy, EMState, build_hierarchy,
                              d_dx, darwin_potentials, helmholtz_solve,
                              leray_project, poisson_solve, twisted_moment,
                              wave_step)
from .transport import SplitStepPlan, advect_v, advect_x, strang_step
from .penrose import (DispersionRoot, PenroseSymbol, StabilityReport,
                      dispersion_roots, stability_margin)
from .linear_response import (VolterraProblem, extract_rate,
                              free_streaming_source, make_problem,
                              volterra_kernel, volterra_residual,
                              volterra_solve)
from .solvers import (FullSnapshot, RunConfig, Trajectory, build_initial_f,
                      field_l2_difference, full_snapshots, rescale_spacetime,
                      rescale_velocity, run, system_residual, vd_run, vm_run,
                      vp_run, well_prepared_init, wp_residuals)

__all__ = [
    "__version__",
    "Equilibrium", "MomentConstants", "equilibrium", "moment_constants",
    "DistField", "FULL", "MomentSet", "PERTURBATION", "PhaseGrid",
    "boundary_leakage", "bootstrap_norm", "deposit_moments", "rel_velocity",
    "shift_to_g", "unshift_from_g", "weighted_h_norm",
    "DarwinHierarchy", "EMState", "build_hierarchy", "d_dx",
    "darwin_potentials", "helmholtz_solve", "leray_project", "poisson_solve",
    "twisted_moment", "wave_step",
    "SplitStepPlan", "advect_v", "advect_x", "strang_step",
    "DispersionRoot", "PenroseSymbol", "StabilityReport", "dispersion_roots",
    "stability_margin",
    "VolterraProblem", "extract_rate", "free_streaming_source", "make_problem",
    "volterra_kernel", "volterra_residual", "volterra_solve",
    "FullSnapshot", "RunConfig", "Trajectory", "build_initial_f",
    "field_l2_difference", "full_snapshots", "rescale_spacetime",
    "rescale_velocity", "run", "system_residual", "vd_run", "vm_run", "vp_run",
    "well_prepared_init", "wp_residuals",
]
