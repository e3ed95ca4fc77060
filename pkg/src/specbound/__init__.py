"""Numerical realization of sup-norm eigenfunction bounds from isoperimetric data."""

from .bounds import (Ball, BoundScenario, VerificationReport, WholeManifold,
                     admissible_p_threshold, eigen_bound_constant,
                     energy_identity_check, hadamard_constant,
                     lp_lower_bound_check, torsion_bound_check,
                     verify_linfty_bound)
from .errors import (ConfigError, DomainError, InvalidModelError,
                     InvalidProfileError, NumericError, RangeError,
                     SearchError, SpecboundError)
from .geometry import (BallGeometry, WarpingModel, ball_area, ball_geometry,
                       ball_volume, inverse_ball_volume, sphere_measure,
                       unit_ball_volume, warping_eval)
from .isoperimetry import (AifEvaluator, IsoperimetricFunction, ModelProfile,
                           PowerLawProfile, TabulatedProfile, aif_eval,
                           aif_inverse, profile_eval)
from .radial import (DirichletEigenpair, GlobalSolution, RadialFunction,
                     distribution_function, level_radius, lp_norm,
                     principal_dirichlet_eigenvalue, solve_dirichlet_eigenpair,
                     solve_eigen_ivp, solve_torsion, solve_whole_manifold,
                     sup_norm)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
