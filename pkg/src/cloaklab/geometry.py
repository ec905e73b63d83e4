"""Blow-up maps and the cloak material parameters they induce.

All lengths are nondimensional: the cloaked disc is ``|x| < 1``, the cloak
shell ``1 < |x| < 2`` and the computational domain ``|x| < 3``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJacobian, DomainError, SingularPoint, SingularSurface

R_CLOAK_INNER = 1.0
R_CLOAK_OUTER = 2.0
R_DOMAIN = 3.0

IDEAL_EXCLUSION = 1e-9
JACOBIAN_STEP = 1e-6

REGIONS = ("interior", "shell", "exterior", "truncated_core")


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r >= 0.0:
            raise DomainError(f"radius must be nonnegative, got {self.r!r}")
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * math.pi))

    @classmethod
    def from_cartesian(cls, x, y):
        return cls(math.hypot(x, y), math.atan2(y, x))

    def to_cartesian(self):
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)


@dataclass(frozen=True)
class MaterialSample:
    sigma_radial: float
    sigma_tangential: float
    lam: float
    region: str


@dataclass(frozen=True)
class CloakGeometry:
    """Fixed radii 1, 2, 3 plus the truncation radius R in (1, 2)."""

    R: float
    r_cloak_inner: float = R_CLOAK_INNER
    r_cloak_outer: float = R_CLOAK_OUTER
    r_domain: float = R_DOMAIN

    def __post_init__(self):
        if not 1.0 < self.R < 2.0:
            raise DomainError(f"truncation radius must satisfy 1 < R < 2, got {self.R!r}")

    @property
    def rho(self):
        return 2.0 * (self.R - 1.0)


def _radius_forward(s):
    return 1.0 + 0.5 * s if s <= R_CLOAK_OUTER else s


def _radius_inverse(s):
    return 2.0 * (s - 1.0) if s <= R_CLOAK_OUTER else s


def forward_map(y):
    """Blow-up map F: radius |y| -> 1 + |y|/2 inside B_2, identity outside."""
    if y.r == 0.0:
        raise SingularPoint("the blow-up map is undefined at the origin")
    return PolarPoint(_radius_forward(y.r), y.theta)


def inverse_map(x):
    """Inverse of :func:`forward_map`, defined for |x| > 1."""
    if not x.r > R_CLOAK_INNER:
        raise DomainError(f"inverse map needs |x| > 1, got {x.r!r}")
    return PolarPoint(_radius_inverse(x.r), x.theta)


def truncated_map(y, R):
    """Truncated map F_R from |y| > rho onto |x| > R."""
    rho = CloakGeometry(R).rho
    if not y.r > rho:
        raise DomainError(f"truncated map needs |y| > rho = {rho!r}, got {y.r!r}")
    return PolarPoint(_radius_forward(y.r), y.theta)


def truncated_inverse(x, R):
    """Inverse of :func:`truncated_map`; maps |x| = R onto |y| = rho."""
    CloakGeometry(R)
    if not x.r >= R:
        raise DomainError(f"truncated inverse needs |x| >= R = {R!r}, got {x.r!r}")
    return PolarPoint(_radius_inverse(x.r), x.theta)


def push_forward(sigma, jacobian):
    """Return (DF sigma DF^T) / det DF for 2x2 arrays."""
    sigma = np.asarray(sigma, dtype=float)
    jac = np.asarray(jacobian, dtype=float)
    if sigma.shape != (2, 2) or jac.shape != (2, 2):
        raise ValueError("push_forward expects 2x2 matrices")
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if det == 0.0 or not math.isfinite(det):
        raise DegenerateJacobian(f"Jacobian determinant is {det!r}")
    out = np.einsum("jp,kq,pq->jk", jac, jac, sigma) / det
    return 0.5 * (out + out.T)


def blowup_cartesian(y):
    """Cartesian form of F, used for numerical Jacobians."""
    y = np.asarray(y, dtype=float)
    s = math.hypot(y[0], y[1])
    if s == 0.0:
        raise SingularPoint("the blow-up map is undefined at the origin")
    return y * (_radius_forward(s) / s)


def numerical_jacobian(func, y, step=JACOBIAN_STEP, order=2):
    """Centered-difference Jacobian of a map R^2 -> R^2.

    ``order=2`` is the three-point stencil; its roundoff floor is about
    eps / step. ``order=4`` uses the five-point stencil, which reaches
    1e-12 with a much larger step (1e-3 times the length scale of the map).
    """
    y = np.asarray(y, dtype=float)
    jac = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        if order == 2:
            jac[:, k] = (func(y + e) - func(y - e)) / (2.0 * step)
        elif order == 4:
            jac[:, k] = (
                8.0 * (func(y + e) - func(y - e)) - (func(y + 2 * e) - func(y - 2 * e))
            ) / (12.0 * step)
        else:
            raise ValueError("order must be 2 or 4")
    return jac


def _shell(s):
    return MaterialSample((s - 1.0) / s, s / (s - 1.0), s / (4.0 * (s - 1.0)), "shell")


def ideal_material(x, sigma_a=1.0, lambda_a=1.0):
    """Material of the ideal cloak at point x.

    Shell eigenvalues are (|x|-1)/|x| radially and |x|/(|x|-1) tangentially
    with bulk factor |x|/(4(|x|-1)); vacuum (1, 1, 1) outside B_2 and the
    constants (sigma_a, sigma_a, lambda_a) inside B_1.
    """
    s = x.r
    if s == R_CLOAK_INNER:
        raise SingularSurface("ideal cloak parameters are singular on |x| = 1")
    if s < R_CLOAK_INNER:
        return MaterialSample(sigma_a, sigma_a, lambda_a, "interior")
    if s < R_CLOAK_OUTER:
        return _shell(s)
    return MaterialSample(1.0, 1.0, 1.0, "exterior")


def approx_material(x, R, sigma_a=1.0, lambda_a=1.0):
    """Truncated cloak: ideal material for |x| > R, constants inside."""
    CloakGeometry(R)
    if x.r <= R:
        return MaterialSample(sigma_a, sigma_a, lambda_a, "truncated_core")
    return ideal_material(x, sigma_a, lambda_a)


def material_tensor(sample, theta):
    """Cartesian 2x2 tensor sigma_r Pi + sigma_t (I - Pi) at angle theta."""
    e = np.array([math.cos(theta), math.sin(theta)])
    proj = np.outer(e, e)
    return sample.sigma_radial * proj + sample.sigma_tangential * (np.eye(2) - proj)


def sample_materials(radii, thetas, R=None, sigma_a=1.0, lambda_a=1.0):
    """Material samples on a polar grid, ordered by (r, theta) index.

    With ``R=None`` the ideal cloak is sampled and points within
    ``IDEAL_EXCLUSION`` of |x| = 1 are skipped.
    Returns a list of ``(x, y, MaterialSample)``.
    """
    rows = []
    for r in radii:
        if R is None and abs(r - R_CLOAK_INNER) < IDEAL_EXCLUSION:
            continue
        for th in thetas:
            p = PolarPoint(float(r), float(th))
            if R is None:
                m = ideal_material(p, sigma_a, lambda_a)
            else:
                m = approx_material(p, R, sigma_a, lambda_a)
            x, y = p.to_cartesian()
            rows.append((x, y, m))
    return rows
