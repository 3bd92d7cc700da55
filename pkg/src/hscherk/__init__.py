"""Scherk-type barriers and radial solvers for prescribed mean curvature
graphs over the Poincare ball model of hyperbolic space."""

from .barriers import RadialBarrier, ScherkBarrier, SolverOptions, build_sub, \
    build_super, c0_threshold, envelope_barrier, eval_barrier, \
    explicit_scherk, profile_equation_residual, radial_barrier, \
    rho_tilde_eval, save_manifest, uniform_bound_experiment
from .envelope import DecaySpec, HeightSpec, PsiEnvelope, d_tilde, psi_eval, \
    psi_partials, psi_sup, psi_tail_integral, check_coth_global_bound
from .errors import BracketFailure, ConfigurationError, CothBoundViolated, \
    HscherkError, NoBracket, NonIntegrableTail, NotFound, NumericalError, \
    StepUnderflow, TooCloseToWall, ValidationError
from .hgeom import BallPoint, BoundaryPoint, GeodesicWall, \
    brute_force_wall_distance, geodesic_distance, origin, ray_point, \
    sample_wall_points, signed_wall_distance, wall_concentric_at
from .radial import FSpec, RadialProblem, RadialSolution, \
    compare_with_radial_barrier, constant_blowup_radius, flux_residual, \
    integrate_radial, save_outcome, solve_radial_dirichlet
from .shooting import Gamma0Result, OdeState, ShootingConfig, Trajectory, \
    blowup_witness, choose_d0, classify_gamma, ell, find_gamma0, \
    full_profile, integrate, residual_integral_forms, rho_eval, \
    rho_tail_bound, sigma_bound, solve_height, trajectory_to_csv
from .verify import VerificationPlan, report_json, run_plan

__version__ = "0.1.0"

__all__ = [
    "BallPoint", "BoundaryPoint", "BracketFailure", "ConfigurationError",
    "CothBoundViolated", "DecaySpec", "FSpec", "Gamma0Result", "GeodesicWall",
    "HeightSpec", "HscherkError", "NoBracket", "NonIntegrableTail",
    "NotFound", "NumericalError", "OdeState", "PsiEnvelope", "RadialBarrier",
    "RadialProblem", "RadialSolution", "ScherkBarrier", "ShootingConfig",
    "SolverOptions", "StepUnderflow", "TooCloseToWall", "Trajectory",
    "ValidationError", "VerificationPlan", "blowup_witness",
    "brute_force_wall_distance", "build_sub", "build_super", "c0_threshold",
    "check_coth_global_bound", "choose_d0", "classify_gamma",
    "compare_with_radial_barrier", "constant_blowup_radius", "d_tilde",
    "ell", "envelope_barrier", "eval_barrier", "explicit_scherk",
    "find_gamma0", "flux_residual", "full_profile", "geodesic_distance",
    "integrate", "integrate_radial", "origin", "profile_equation_residual",
    "psi_eval", "psi_partials", "psi_sup", "psi_tail_integral",
    "radial_barrier", "ray_point", "report_json", "residual_integral_forms",
    "rho_eval", "rho_tail_bound", "rho_tilde_eval", "run_plan",
    "sample_wall_points", "save_manifest", "save_outcome",
    "sigma_bound", "signed_wall_distance", "solve_height",
    "solve_radial_dirichlet", "trajectory_to_csv", "uniform_bound_experiment",
    "wall_concentric_at",
]
