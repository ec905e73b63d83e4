"""scikit-learn style front end for the truncated and ideal cloak.

``fit`` solves for the mode coefficients; ``predict`` evaluates the physical
field at rows of polar coordinates (r, theta). Nothing is learned from data,
so ``fit`` ignores ``X`` and ``y``.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .fields import LimitField, ideal_limit_field, total_field
from .modes import CloakParams, solve_all


def _polar_rows(X):
    X = check_array(X, dtype=float, ensure_min_samples=1)
    if X.shape[1] != 2:
        raise ValueError(f"expected rows of (r, theta), got {X.shape[1]} columns")
    return X


class ApproximateCloak(BaseEstimator):
    """Truncated cloak with regularisation radius R.

    Parameters
    ----------
    kappa, omega : float
        Interior wave-number ratio and frequency.
    R : float
        Truncation radius, 1 < R < 2.
    N : int
        Mode cutoff; modes -N..N are solved.
    source, boundary : dict, optional
        Sparse ``{n: value}`` maps of source coefficients p_n and
        Dirichlet data f_n.
    method : {"closed", "direct"}
    """

    def __init__(self, kappa=1.0, omega=1.0, R=1.1, N=0, source=None, boundary=None,
                 method="closed"):
        self.kappa = kappa
        self.omega = omega
        self.R = R
        self.N = N
        self.source = source
        self.boundary = boundary
        self.method = method

    def fit(self, X=None, y=None):
        params = CloakParams(self.kappa, self.omega, self.R, self.N)
        self.solution_ = solve_all(params, self.source, self.boundary, method=self.method)
        self.coefficients_ = {n: self.solution_.coeffs[n] for n in self.solution_.modes}
        return self

    def predict(self, X):
        """Complex field u_R at each (r, theta) row."""
        check_is_fitted(self, "solution_")
        X = _polar_rows(X)
        return np.array([total_field(self.solution_, (r, th)) for r, th in X], dtype=complex)


class IdealCloak(BaseEstimator):
    """Ideal-limit field: interior solution with the non-local condition, zero outside."""

    def __init__(self, kappa=1.0, omega=1.0, N=0, source=None):
        self.kappa = kappa
        self.omega = omega
        self.N = N
        self.source = source

    def fit(self, X=None, y=None):
        self.limit_ = LimitField.from_source(self.kappa, self.omega, self.N, self.source)
        self.coefficients_ = dict(self.limit_.a_tilde)
        return self

    def predict(self, X):
        check_is_fitted(self, "limit_")
        X = _polar_rows(X)
        return np.array([ideal_limit_field(self.limit_, (r, th)) for r, th in X], dtype=complex)
