"""Numerical laboratory for two-dimensional cylindrical acoustic cloaks."""

from .errors import CloakError, ResonantFrequency, TransmissionEigenvalue
from .estimator import ApproximateCloak, IdealCloak
from .fields import LimitField, ideal_limit_field, limit_coefficient, sample_grid, total_field
from .limits import boundary_residual, dn_deviation, run_sweep
from .modes import CloakParams, ModeInput, solve_all, solve_mode_closed, solve_mode_direct
from .oracle import OracleConfig, oracle_solve
from .resonance import check_nonresonant, find_resonances

__version__ = "0.1.0"

__all__ = [
    "ApproximateCloak",
    "CloakError",
    "CloakParams",
    "IdealCloak",
    "LimitField",
    "ModeInput",
    "OracleConfig",
    "ResonantFrequency",
    "TransmissionEigenvalue",
    "boundary_residual",
    "check_nonresonant",
    "dn_deviation",
    "find_resonances",
    "ideal_limit_field",
    "limit_coefficient",
    "oracle_solve",
    "run_sweep",
    "sample_grid",
    "solve_all",
    "solve_mode_closed",
    "solve_mode_direct",
    "total_field",
]
