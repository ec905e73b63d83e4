"""Interior resonances of the ideal cloak and blow-up probes.

A frequency w is resonant for mode n when

    g_n(w) = k^2 w J'_|n|(k w) + |n| J_|n|(k w) = 0,

i.e. when J_|n|(k w r) e^{i n theta} solves the interior Helmholtz problem
with the non-local boundary condition at r = 1. The angular operator
(-d^2/dtheta^2)^{1/2} acts on mode n as multiplication by |n|.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .errors import ScanWarning
from .modes import CloakParams, interior_gain

DEFAULT_SCAN_STEP = 0.01
ROOT_XTOL = 1e-13
MARGIN_FLOOR = 1e-8
NONDEGENERACY_FLOOR = 1e-6


def resonance_function(n, kappa, omega):
    """g_n(w) = k^2 w J'(k w) + |n| J(k w)."""
    m = abs(n)
    j, jp, _, _ = specfun.jh(m, kappa * omega)
    return kappa**2 * omega * jp + m * j


def companion_function(n, kappa, omega):
    """h_n(w) = k^2 w H'(k w) + |n| H(k w); nonzero wherever g_n vanishes."""
    m = abs(n)
    _, _, h, hp = specfun.jh(m, kappa * omega)
    return kappa**2 * omega * hp + m * h


@dataclass
class ResonanceReport:
    n: int
    kappa: float
    omega_range: tuple
    roots: list = field(default_factory=list)
    condition_values: list = field(default_factory=list)
    scan_step: float = DEFAULT_SCAN_STEP
    tolerance: float = ROOT_XTOL

    def to_dict(self):
        return {
            "n": self.n,
            "kappa": self.kappa,
            "omega_range": list(self.omega_range),
            "scan_step": self.scan_step,
            "tolerance": self.tolerance,
            "roots": [
                {"omega": w, "g_abs": g, "h_abs": h}
                for w, (g, h) in zip(self.roots, self.condition_values)
            ],
        }


def find_resonances(n, kappa, omega_range, scan_step=DEFAULT_SCAN_STEP):
    """Bracket sign changes of g_n on a uniform scan, then refine with Brent.

    Roots closer together than two scan steps trigger a ScanWarning: a pair
    of roots inside one scan cell would have been missed.
    """
    lo, hi = map(float, omega_range)
    if not 0.0 < lo < hi:
        raise ValueError(f"need 0 < omega_min < omega_max, got {omega_range!r}")
    if not scan_step > 0:
        raise ValueError("scan_step must be positive")
    count = int(math.floor((hi - lo) / scan_step + 1e-9))
    grid = [lo + i * scan_step for i in range(count + 1)]
    if grid[-1] < hi:
        grid.append(hi)
    g = lambda w: resonance_function(n, kappa, w)
    values = [g(w) for w in grid]
    roots = []
    for i, (w0, g0) in enumerate(zip(grid, values)):
        if g0 == 0.0:
            roots.append(w0)
        elif i + 1 < len(grid) and g0 * values[i + 1] < 0.0:
            roots.append(brentq(g, w0, grid[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    report = ResonanceReport(n, kappa, (lo, hi), scan_step=scan_step)
    for w in roots:
        report.roots.append(w)
        report.condition_values.append((abs(g(w)), abs(companion_function(n, kappa, w))))
    gaps = np.diff(roots)
    if len(gaps) and gaps.min() < 2.0 * scan_step:
        warnings.warn(
            ScanWarning(f"roots {gaps.min():.3g} apart; scan_step {scan_step} may miss pairs"),
            stacklevel=2,
        )
    return report


@dataclass(frozen=True)
class NonresonanceCheck:
    ok: bool
    min_margin: float
    violating_mode: object = None
    condition: object = None

    def __bool__(self):
        return self.ok


def check_nonresonant(params, margin_floor=MARGIN_FLOOR):
    """Check |g_n(w)| and |J_n(3w)| against margin_floor for every |n| <= N."""
    worst = (math.inf, None, None)
    j3 = specfun.jy_table(params.N, 3.0 * params.omega)[0]
    for m in range(params.N + 1):
        for value, name in (
            (abs(resonance_function(m, params.kappa, params.omega)), "resonance"),
            (abs(float(j3[m])), "dirichlet"),
        ):
            if value < worst[0]:
                worst = (value, m, name)
    margin, mode, name = worst
    if margin >= margin_floor:
        return NonresonanceCheck(True, margin)
    return NonresonanceCheck(False, margin, mode, name)


def _eigenfunction(m, kappa, omega, x, y):
    r = math.hypot(x, y)
    th = math.atan2(y, x)
    return specfun.bessel_j(m, kappa * omega * r) * complex(math.cos(m * th), math.sin(m * th))


def eigenfunction_residual_parts(n, kappa, omega_root, r_samples, step=1e-3, theta=0.7):
    """Return (interior, boundary) residuals of V = J_|n|(k w r) e^{i n theta}.

    interior: max five-point |(Lap_h + k^2 w^2) V| over r_samples at angle
    theta; boundary: |k d_r V + |n| V| at r = 1.
    """
    m = abs(n)
    k2w2 = (kappa * omega_root) ** 2
    interior = 0.0
    for r in r_samples:
        x0, y0 = r * math.cos(theta), r * math.sin(theta)
        v = lambda dx, dy: _eigenfunction(m, kappa, omega_root, x0 + dx, y0 + dy)
        lap = (v(step, 0) + v(-step, 0) + v(0, step) + v(0, -step) - 4 * v(0, 0)) / step**2
        interior = max(interior, abs(lap + k2w2 * v(0, 0)))
    j, jp, _, _ = specfun.jh(m, kappa * omega_root)
    boundary = abs(kappa * kappa * omega_root * jp + m * j)
    return interior, boundary


def eigenfunction_residual(n, kappa, omega_root, r_samples, step=1e-3):
    """Largest of the interior and boundary eigenfunction residuals."""
    return max(eigenfunction_residual_parts(n, kappa, omega_root, r_samples, step))


def dyadic_radii(k_min=4, k_max=14):
    return [1.0 + 2.0**-k for k in range(k_min, k_max + 1)]


def blowup_probe(n, kappa, omega_root, R_sequence=None, p_n=1.0):
    """|a_n(R)| with f = 0 along a sequence of truncation radii."""
    if R_sequence is None:
        R_sequence = dyadic_radii()
    out = []
    for R in R_sequence:
        params = CloakParams(kappa, omega_root, R, abs(n))
        out.append(0.0 if p_n == 0 else abs(interior_gain(n, params) * p_n))
    return out
