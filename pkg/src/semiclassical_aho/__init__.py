"""Perturbative, semiclassical and variational tools for one-dimensional
anharmonic oscillators V(x) = V̂(g x)/g**2."""

from .approximant import (Approximant, MatchedApproximant, VariationalResult, build_approximant,
                          build_matched_approximant, match_constraints, matched_energy,
                          optimize_params, orthogonalize, variational_energy)
from .errors import AHOError, ConfigParse
from .flucton import (flucton_action, flucton_path, flucton_time, fluctuation_profile,
                      gy_det_ratio, gy_log_det_arm)
from .generalized_bloch import det_log, gb_origin_series, gb_series, large_u_series, z0, z2
from .potential import Frame, Potential, load_potential, make_potential, quartic_aho
from .reference_solver import SpectrumResult, eigensolve_shooting, eigensolve_spectral, shoot_level
from .riccati_bloch import eps_partial_sum, rb_ground_series, rb_residual, rb_small_v

__version__ = "0.1.0"
