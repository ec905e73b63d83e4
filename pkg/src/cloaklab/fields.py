"""Field assembly from mode coefficients, and the ideal-limit field."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DomainError, OriginSingular, ResonantFrequency
from .geometry import R_CLOAK_INNER, R_CLOAK_OUTER, R_DOMAIN, PolarPoint, truncated_inverse
from .modes import cylinder_values

EPSILON_ORIGIN = 1e-6
RESONANCE_RTOL = 1e-12


def _mode_sum(orders, weights_j, weights_h, x, theta, with_h):
    """sum_n (wj_n J_|n|(x) + wh_n H_|n|(x)) e^{i n theta}."""
    if not orders:
        return 0j
    mmax = max(abs(n) for n in orders)
    if x == 0.0:
        j = np.zeros(mmax + 1)
        j[0] = 1.0
        y = None
    else:
        j, _, y, _ = specfun.jy_table(mmax, x)
    total = 0j
    for n, wj, wh in zip(orders, weights_j, weights_h):
        m = abs(n)
        val = wj * j[m]
        if with_h and wh != 0:
            val += wh * complex(j[m], y[m])
        total += val * complex(math.cos(n * theta), math.sin(n * theta))
    return total


def _point(point):
    return point if isinstance(point, PolarPoint) else PolarPoint(*point)


def interior_field(solution, point):
    """v^-(r, theta) = sum (a_n J(k w r) + p_n H(k w r)) e^{i n theta}, r <= R."""
    point = _point(point)
    params = solution.params
    if point.r > params.R:
        raise DomainError(f"interior field needs r <= R = {params.R!r}, got {point.r!r}")
    modes = solution.modes
    ps = [solution.inputs[n].p for n in modes]
    has_source = any(p != 0 for p in ps)
    if has_source and point.r < EPSILON_ORIGIN:
        raise OriginSingular(f"r = {point.r!r} is inside the excluded disc around the source")
    x = params.kappa * params.omega * point.r
    return _mode_sum(modes, [solution.coeffs[n].a for n in modes], ps, x, point.theta, has_source)


def virtual_field(solution, point):
    """v^+(r, theta) = sum (c_n H(w r) + b_n J(w r)) e^{i n theta}, rho <= r <= 3."""
    point = _point(point)
    params = solution.params
    if not params.rho <= point.r <= R_DOMAIN:
        raise DomainError(
            f"virtual field needs rho = {params.rho!r} <= r <= 3, got {point.r!r}"
        )
    modes = solution.modes
    x = params.omega * point.r
    return _mode_sum(
        modes,
        [solution.coeffs[n].b for n in modes],
        [solution.coeffs[n].c for n in modes],
        x,
        point.theta,
        True,
    )


def physical_field(solution, point):
    """u_R(x) = v^+(F_R^{-1}(x)) for R <= |x| <= 3."""
    point = _point(point)
    if not solution.params.R <= point.r <= R_DOMAIN:
        raise DomainError(f"physical exterior field needs R <= |x| <= 3, got {point.r!r}")
    return virtual_field(solution, truncated_inverse(point, solution.params.R))


def total_field(solution, point):
    """Physical field u_R anywhere in the domain (interior or cloak/exterior)."""
    point = _point(point)
    if point.r <= solution.params.R:
        return interior_field(solution, point)
    return physical_field(solution, point)


def source_field(p, kappa, omega, point):
    """Radiating wave w = sum p_n H(k w r) e^{i n theta}."""
    point = _point(point)
    if point.r <= 0.0:
        raise OriginSingular("the radiating wave is singular at the origin")
    modes = sorted(p)
    return _mode_sum(
        modes, [0.0] * len(modes), [p[n] for n in modes], kappa * omega * point.r, point.theta, True
    )


def limit_coefficient(n, kappa, omega, p_n):
    """Ideal-limit interior coefficient a~_n.

    It is the unique coefficient for which a~ J + p H satisfies the
    non-local condition k r d_r u + |n| u = 0 at r = 1.
    """
    m = abs(n)
    x = kappa * omega
    j, jp, h, hp = specfun.jh(m, x)
    den = kappa**2 * omega * jp + m * j
    # both terms can vanish together (J_0' = -J_1), so scale by the local
    # size of the cylinder functions instead
    scale = max(kappa**2 * omega, m) * max(abs(j), abs(jp))
    if den == 0.0 or abs(den) <= RESONANCE_RTOL * scale:
        raise ResonantFrequency(
            f"omega = {omega!r} is a resonance of mode {n} for kappa = {kappa!r}", n=n
        )
    if p_n == 0:
        return 0j
    return -p_n * (kappa**2 * omega * hp + m * h) / den


@dataclass
class LimitField:
    """Coefficients of the ideal-limit field u_1 inside the cloaked disc."""

    kappa: float
    omega: float
    a_tilde: dict = field(default_factory=dict)
    p: dict = field(default_factory=dict)

    @classmethod
    def from_source(cls, kappa, omega, N, source):
        source = {int(n): complex(v) for n, v in (source or {}).items()}
        for n in source:
            if abs(n) > N:
                raise DomainError(f"source mode {n} exceeds cutoff N = {N}")
        p = {n: source.get(n, 0j) for n in range(-N, N + 1)}
        a = {n: limit_coefficient(n, kappa, omega, p[n]) for n in p}
        return cls(kappa, omega, a, p)


def ideal_limit_field(limit, point):
    """u_1 = sum a~_n J(k w r) e^{i n theta} + w in B_1; exactly 0 outside."""
    point = _point(point)
    if point.r > R_CLOAK_INNER:
        return 0j
    modes = sorted(limit.a_tilde)
    ps = [limit.p[n] for n in modes]
    has_source = any(p != 0 for p in ps)
    if has_source and point.r < EPSILON_ORIGIN:
        raise OriginSingular(f"r = {point.r!r} is inside the excluded disc around the source")
    x = limit.kappa * limit.omega * point.r
    return _mode_sum(modes, [limit.a_tilde[n] for n in modes], ps, x, point.theta, has_source)


def transmission_residual(solution):
    """Worst normalised mismatch of field and flux across the interface.

    Per mode: |v+(rho) - v-(R)| and |rho d_r v+(rho) - k R d_r v-(R)|, each
    divided by the largest of its terms; the maxima over modes are returned.
    """
    params = solution.params
    worst_value = 0.0
    worst_flux = 0.0
    rw = params.rho * params.omega
    k2wR = params.kappa**2 * params.omega * params.R
    for n in solution.modes:
        v = cylinder_values(n, params)
        co = solution.coeffs[n]
        p = solution.inputs[n].p
        value_terms = (co.c * v.h2, co.b * v.j2, -co.a * v.j1, -p * v.h1)
        flux_terms = (rw * co.c * v.h2p, rw * co.b * v.j2p, -k2wR * co.a * v.j1p, -k2wR * p * v.h1p)
        worst_value = max(worst_value, _normalised(value_terms))
        worst_flux = max(worst_flux, _normalised(flux_terms))
    return worst_value, worst_flux


def _normalised(terms):
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0.0 else abs(sum(terms)) / scale


def region_of(r, R=None):
    """Region label of a physical radius for the truncated (or ideal) cloak."""
    if r < R_CLOAK_INNER:
        return "interior"
    if R is not None and r <= R:
        return "truncated_core"
    if r < R_CLOAK_OUTER:
        return "shell"
    return "exterior"


@dataclass
class FieldGrid:
    """Complex field samples on a polar grid in (r, theta) lexicographic order."""

    points: list
    values: np.ndarray
    region_tags: list
    params_snapshot: object

    def __post_init__(self):
        if not len(self.points) == len(self.values) == len(self.region_tags):
            raise ValueError("points, values and region_tags must have equal length")

    def rows(self):
        for p, u, tag in zip(self.points, self.values, self.region_tags):
            yield p.r, p.theta, u.real, u.imag, tag


def sample_grid(source, radii, thetas, threads=1):
    """Evaluate a solved cloak or a LimitField on a polar grid.

    Points closer than EPSILON_ORIGIN to the origin are dropped when a
    source is present.
    """
    if isinstance(source, LimitField):
        evaluate = lambda p: ideal_limit_field(source, p)
        R = None
        params = source
        has_source = any(v != 0 for v in source.p.values())
    else:
        evaluate = lambda p: total_field(source, p)
        R = source.params.R
        params = source.params
        has_source = any(inp.p != 0 for inp in source.inputs.values())
    points = [
        PolarPoint(float(r), float(th))
        for r in radii
        if not (has_source and r < EPSILON_ORIGIN)
        for th in thetas
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, points))
    else:
        values = [evaluate(p) for p in points]
    tags = [region_of(p.r, R) for p in points]
    return FieldGrid(points, np.array(values, dtype=complex), tags, params)
