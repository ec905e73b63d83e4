"""Per-Fourier-mode solution of the truncated-cloak transmission problem.

For mode ``n`` the fields are

* interior ``|x| <= R``:   ``a_n J(k w r) + p_n H(k w r)``
* virtual exterior ``rho < |y| < 3``: ``c_n H(w r) + b_n J(w r)``

with all cylinder functions of order ``|n|``. The three unknowns follow
from the Dirichlet condition at ``r = 3`` and field/flux continuity across
``|x| = R`` (which maps to ``|y| = rho`` in virtual space).
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import specfun
from .errors import (
    DegenerateDenominator,
    DomainError,
    IllConditioned,
    ResonanceSingular,
    SingularSystem,
    TransmissionEigenvalue,
)
from .geometry import R_DOMAIN, CloakGeometry

DENOMINATOR_FLOOR = 1e-300
EIGENVALUE_RTOL = 1e-12
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class CloakParams:
    """Configuration of the truncated cloak.

    ``kappa**2 = 1 / (sigma_a * lambda_a)`` encodes the interior medium.
    """

    kappa: float
    omega: float
    R: float
    N: int = 0

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if int(self.N) != self.N or not 0 <= self.N <= specfun.MAX_ORDER:
            raise ValueError(f"mode cutoff N must be an integer in 0..{specfun.MAX_ORDER}")
        object.__setattr__(self, "N", int(self.N))
        CloakGeometry(self.R)

    @property
    def geometry(self):
        return CloakGeometry(self.R)

    @property
    def rho(self):
        return 2.0 * (self.R - 1.0)

    def with_R(self, R):
        return replace(self, R=R)


@dataclass(frozen=True)
class ModeInput:
    n: int
    f: complex = 0j
    p: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "f", complex(self.f))
        object.__setattr__(self, "p", complex(self.p))


@dataclass(frozen=True)
class Intermediates:
    l1: complex
    l2: complex
    s: complex
    t: complex
    s_tilde: complex
    t_tilde: complex
    D: complex
    A: complex
    B: complex


@dataclass(frozen=True)
class ModeCoefficients:
    a: complex
    b: complex
    c: complex

    def __add__(self, other):
        return ModeCoefficients(self.a + other.a, self.b + other.b, self.c + other.c)

    def as_tuple(self):
        return self.a, self.b, self.c


class _Cyl(NamedTuple):
    """Cylinder-function values of one order at the three radii of the problem."""

    j1: float
    j1p: float
    h1: complex
    h1p: complex
    j2: float
    j2p: float
    h2: complex
    h2p: complex
    j3: float
    j3p: float
    h3: complex
    h3p: complex


def _check_mode(n, params):
    if abs(n) > params.N:
        raise DomainError(f"mode {n} exceeds cutoff N = {params.N}")


def _cyl(m, kappa, omega, R, rho):
    return _Cyl(
        *specfun.jh(m, kappa * omega * R),
        *specfun.jh(m, omega * rho),
        *specfun.jh(m, R_DOMAIN * omega),
    )


def cylinder_values(n, params):
    """Cylinder functions of order |n| at k*w*R, w*rho and 3*w."""
    return _cyl(abs(n), params.kappa, params.omega, params.R, params.rho)


def intermediates(n, params):
    """Evaluate l1, l2, s, t, s~, t~, D, A, B for mode n."""
    _check_mode(n, params)
    v = cylinder_values(n, params)
    k2R = params.kappa**2 * params.R
    rho = params.rho
    D = k2R * v.j1p * v.h2 - rho * v.j1 * v.h2p
    if abs(D) < DENOMINATOR_FLOOR:
        raise DegenerateDenominator(f"|D_{n}| = {abs(D):.3e} underflowed")
    s = (rho * v.j1 * v.j2p - k2R * v.j1p * v.j2) / D
    t = (rho * v.h2 * v.j2p - rho * v.h2p * v.j2) / D
    s_tilde = (k2R * v.h1p * v.j1 - k2R * v.j1p * v.h1) / D
    t_tilde = (k2R * v.h2 * v.h1p - rho * v.h2p * v.h1) / D
    l1 = v.j2 * v.h3 - v.h2 * v.j3
    l2 = v.j2p * v.h3 - v.h2p * v.j3
    A = k2R * v.h1p * l1 - rho * v.h1 * l2
    B = rho * v.j1 * l2 - k2R * v.j1p * l1
    return Intermediates(l1, l2, s, t, s_tilde, t_tilde, D, A, B)


def solve_mode_closed(inp, params, inter=None):
    """Coefficients (a_n, b_n, c_n) from the closed-form elimination.

    Raises TransmissionEigenvalue when J(3w) + s_n H(3w) vanishes to
    relative precision 1e-12.
    """
    _check_mode(inp.n, params)
    if inter is None:
        inter = intermediates(inp.n, params)
    v = cylinder_values(inp.n, params)
    sh3 = inter.s * v.h3
    den = v.j3 + sh3
    if abs(den) <= EIGENVALUE_RTOL * max(abs(v.j3), abs(sh3)):
        raise TransmissionEigenvalue(
            f"omega^2 = {params.omega**2!r} is a transmission eigenvalue for mode {inp.n}",
            n=inp.n,
        )
    b = (inp.f + inter.s_tilde * v.h3 * inp.p) / den
    c = inter.s * b - inter.s_tilde * inp.p
    a = inter.t * b - inter.t_tilde * inp.p
    return ModeCoefficients(a, b, c)


def _system(v, kappa, omega, R, rho, inp):
    k2wR = kappa**2 * omega * R
    mat = np.array(
        [
            [0.0, v.j3, v.h3],
            [v.j1, -v.j2, -v.h2],
            [k2wR * v.j1p, -rho * omega * v.j2p, -rho * omega * v.h2p],
        ],
        dtype=complex,
    )
    rhs = np.array([inp.f, -inp.p * v.h1, -k2wR * inp.p * v.h1p], dtype=complex)
    return mat, rhs


def condition_estimate(mat):
    """2-norm condition number after row and column equilibration."""
    scaled, _, _ = _equilibrate(mat)
    return float(np.linalg.cond(scaled))


def _equilibrate(mat):
    rows = np.max(np.abs(mat), axis=1)
    rows[rows == 0.0] = 1.0
    scaled = mat / rows[:, None]
    cols = np.max(np.abs(scaled), axis=0)
    cols[cols == 0.0] = 1.0
    return scaled / cols[None, :], rows, cols


def solve_mode_direct(inp, params, vacuum=False):
    """Solve the 3x3 mode system by LU with partial pivoting.

    The system is row/column equilibrated first; if its condition estimate
    exceeds 1e14 an :class:`IllConditioned` warning carries the estimate and
    the (possibly inaccurate) solution is still returned.

    ``vacuum=True`` is a control run with the cloak replaced by vacuum:
    kappa = 1 and the interface at the same radius R on both sides, so the
    coefficients are continuous across it.
    """
    _check_mode(inp.n, params)
    m = abs(inp.n)
    if vacuum:
        kappa, rho = 1.0, params.R
    else:
        kappa, rho = params.kappa, params.rho
    v = _cyl(m, kappa, params.omega, params.R, rho)
    mat, rhs = _system(v, kappa, params.omega, params.R, rho, inp)
    if not np.any(rhs):
        return ModeCoefficients(0j, 0j, 0j)
    scaled, rows, cols = _equilibrate(mat)
    try:
        y = np.linalg.solve(scaled, rhs / rows)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"mode {inp.n} system is singular") from exc
    cond = float(np.linalg.cond(scaled))
    if not math.isfinite(cond):
        raise SingularSystem(f"mode {inp.n} system is singular")
    if cond > CONDITION_LIMIT:
        warnings.warn(
            IllConditioned(
                f"mode {inp.n}: condition estimate {cond:.3e} (near a resonance?)"
            ),
            stacklevel=2,
        )
    x = y / cols
    return ModeCoefficients(complex(x[0]), complex(x[1]), complex(x[2]))


def residuals(coeffs, inp, params):
    """Normalised residuals of the Dirichlet, continuity and flux equations.

    Each residual is |lhs - rhs| divided by the largest magnitude among the
    terms of its equation (0 when every term vanishes).
    """
    v = cylinder_values(inp.n, params)
    a, b, c = coeffs.as_tuple()
    k2wR = params.kappa**2 * params.omega * params.R
    rw = params.rho * params.omega
    equations = (
        (b * v.j3, c * v.h3, -inp.f),
        (a * v.j1, inp.p * v.h1, -b * v.j2, -c * v.h2),
        (k2wR * a * v.j1p, k2wR * inp.p * v.h1p, -rw * b * v.j2p, -rw * c * v.h2p),
    )
    out = []
    for terms in equations:
        scale = max(abs(t) for t in terms)
        out.append(0.0 if scale == 0.0 else abs(sum(terms)) / scale)
    return tuple(out)


def interior_gain(n, params, inter=None):
    """A_n / B_n, the interior response a_n / p_n when f = 0.

    Along R -> 1+ at a resonant frequency this ratio grows without bound.
    """
    if inter is None:
        inter = intermediates(n, params)
    if abs(inter.B) < DENOMINATOR_FLOOR:
        raise ResonanceSingular(f"|B_{n}| = {abs(inter.B):.3e} underflowed")
    return inter.A / inter.B


@dataclass
class CloakSolution:
    """Mode inputs and solved coefficients for every |n| <= N."""

    params: CloakParams
    inputs: dict = field(default_factory=dict)
    coeffs: dict = field(default_factory=dict)

    @property
    def modes(self):
        return sorted(self.coeffs)


def mode_inputs(params, source=None, boundary=None):
    """Build ModeInput for n = -N..N from sparse {n: value} mappings."""
    source = dict(source or {})
    boundary = dict(boundary or {})
    for n in list(source) + list(boundary):
        _check_mode(int(n), params)
    return [
        ModeInput(n, boundary.get(n, 0j), source.get(n, 0j))
        for n in range(-params.N, params.N + 1)
    ]


def solve_all(params, source=None, boundary=None, method="closed", threads=1):
    """Solve every mode; results are assembled in mode order.

    ``threads`` only changes how the independent mode solves are scheduled.
    """
    solver = {"closed": solve_mode_closed, "direct": solve_mode_direct}[method]
    inputs = mode_inputs(params, source, boundary)
    run = lambda inp: solver(inp, params)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, inputs))
    else:
        results = [run(inp) for inp in inputs]
    sol = CloakSolution(params)
    for inp, co in zip(inputs, results):
        sol.inputs[inp.n] = inp
        sol.coeffs[inp.n] = co
    return sol
