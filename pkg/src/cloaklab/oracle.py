"""Finite-difference verification path for single modes.

Each radial problem is discretised in the logarithmic variable s = ln r,
where the Bessel operator r^2 (v'' + v'/r) + (k^2 r^2 - n^2) v becomes
v_ss + (k^2 e^{2s} - n^2) v with no first-derivative term. Second-order
centred differences with ghost points close the boundary conditions.

The point source is removed analytically: in the interior only the
regular remainder u = a_n J(k w r) is discretised, and the radiating wave
p_n H(k w r) enters through the interface conditions. Coefficients are
recovered by least squares against the analytic basis at sample nodes and
refined by Richardson extrapolation over successive grid doublings.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from . import specfun
from .errors import OracleSingular
from .geometry import R_DOMAIN
from .modes import CloakParams, ModeCoefficients, ModeInput, solve_mode_closed


@dataclass(frozen=True)
class OracleConfig:
    grid_points_interior: int = 800
    grid_points_exterior: int = 800
    richardson_levels: int = 1
    r_inner_cut: float = 1e-3
    n_samples: int = 10

    def __post_init__(self):
        if self.grid_points_interior < 200 or self.grid_points_exterior < 200:
            raise ValueError("oracle grids need at least 200 points")
        if self.richardson_levels not in (1, 2, 3):
            raise ValueError("richardson_levels must be 1, 2 or 3")


@dataclass
class OracleResult:
    coefficients: ModeCoefficients
    levels: list
    r_interior: np.ndarray
    v_interior: np.ndarray
    r_exterior: np.ndarray
    v_exterior: np.ndarray


def _regular_log_slope(m, x):
    # r u'/u for J_m(x r) from the first two series terms
    return m - x * x / (2.0 * (m + 1))


def _solve(rows, cols, vals, rhs, size):
    mat = sp.csc_matrix((vals, (rows, cols)), shape=(size, size), dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            sol = spsolve(mat, rhs)
        except (MatrixRankWarning, RuntimeError) as exc:
            raise OracleSingular("finite-difference system is singular") from exc
    if not np.all(np.isfinite(sol)):
        raise OracleSingular("finite-difference system is singular")
    return sol


class _Builder:
    def __init__(self, size):
        self.rows, self.cols, self.vals = [], [], []
        self.rhs = np.zeros(size, dtype=complex)
        self.size = size
        self.row = 0

    def equation(self, entries, value=0.0):
        for col, v in entries:
            self.rows.append(self.row)
            self.cols.append(col)
            self.vals.append(v)
        self.rhs[self.row] = value
        self.row += 1

    def solve(self):
        assert self.row == self.size
        return _solve(self.rows, self.cols, self.vals, self.rhs, self.size)


def _helmholtz_rows(b, offset, s, h, wave, m):
    # node i sits at column offset + i + 1 (column offset holds the ghost)
    for i, si in enumerate(s):
        q = (wave * math.exp(si)) ** 2 - m * m
        c = offset + i + 1
        b.equation([(c - 1, 1.0), (c, -2.0 + h * h * q), (c + 1, 1.0)])


def discrete_mode(m, kappa, omega, R, rho, f, p, n_int, n_ext, r_cut):
    """Solve one mode on grids with n_int / n_ext intervals.

    Returns (s_int, u, s_ext, v): node coordinates and values of the
    interior remainder u and the virtual exterior field v.
    """
    s_int = np.linspace(math.log(r_cut), math.log(R), n_int + 1)
    s_ext = np.linspace(math.log(rho), math.log(R_DOMAIN), n_ext + 1)
    hi = s_int[1] - s_int[0]
    he = s_ext[1] - s_ext[0]
    ext0 = n_int + 3  # u ghost + n_int+1 nodes + u ghost
    size = ext0 + n_ext + 2
    b = _Builder(size)
    _helmholtz_rows(b, 0, s_int, hi, kappa * omega, m)
    g = _regular_log_slope(m, kappa * omega * r_cut)
    b.equation([(2, 1.0), (0, -1.0), (1, -2.0 * hi * g)])
    _helmholtz_rows(b, ext0, s_ext[:-1], he, omega, m)
    b.equation([(ext0 + n_ext + 1, 1.0)], f)
    _, _, h1, h1p = specfun.jh(m, kappa * omega * R)
    last = n_int + 1
    b.equation([(ext0 + 1, 1.0), (last, -1.0)], p * h1)
    b.equation(
        [
            (ext0 + 2, 1.0 / (2 * he)),
            (ext0, -1.0 / (2 * he)),
            (last + 1, -kappa / (2 * hi)),
            (last - 1, kappa / (2 * hi)),
        ],
        kappa * p * kappa * omega * R * h1p,
    )
    sol = b.solve()
    return s_int, sol[1: n_int + 2], s_ext, sol[ext0 + 1:]


def _sample_indices(count, n_samples):
    return np.unique(np.round(np.linspace(0, count, n_samples)).astype(int))


def _project(m, kappa, omega, p, s_int, u, s_ext, v, idx_int, idx_ext):
    r_int = np.exp(s_int[idx_int])
    r_ext = np.exp(s_ext[idx_ext])
    jin = np.array([specfun.bessel_j(m, kappa * omega * r) for r in r_int])
    a = np.vdot(jin, u[idx_int]) / np.vdot(jin, jin)
    basis = np.array([[specfun.bessel_j(m, omega * r), specfun.hankel1(m, omega * r)] for r in r_ext])
    (b, c), *_ = np.linalg.lstsq(basis, v[idx_ext], rcond=None)
    total_int = u[idx_int] + p * np.array([specfun.hankel1(m, kappa * omega * r) for r in r_int])
    return np.array([a, b, c]), r_int, total_int, r_ext, v[idx_ext]


def raw_estimate(n, inp, params, n_int, n_ext, config=OracleConfig()):
    """Coefficients and samples from a single grid, without extrapolation."""
    m = abs(n)
    s_int, u, s_ext, v = discrete_mode(
        m, params.kappa, params.omega, params.R, params.rho, inp.f, inp.p, n_int, n_ext,
        config.r_inner_cut,
    )
    base_int = config.grid_points_interior
    base_ext = config.grid_points_exterior
    idx_int = _sample_indices(base_int, config.n_samples) * (n_int // base_int)
    idx_ext = _sample_indices(base_ext, config.n_samples) * (n_ext // base_ext)
    return _project(m, params.kappa, params.omega, inp.p, s_int, u, s_ext, v, idx_int, idx_ext)


def _richardson(estimates):
    table = [np.asarray(e) for e in estimates]
    for j in range(1, len(estimates)):
        factor = 4.0**j
        table = [(factor * fine - coarse) / (factor - 1.0) for coarse, fine in zip(table, table[1:])]
    return table[0]


def oracle_solve(n, inp, params, config=OracleConfig()):
    """Finite-difference estimate of (a_n, b_n, c_n) plus field samples.

    ``config.richardson_levels`` extrapolation steps use that many grid
    doublings beyond the base grid.
    """
    levels = []
    coeffs, ints, exts = [], [], []
    for level in range(config.richardson_levels + 1):
        scale = 2**level
        est, r_int, v_int, r_ext, v_ext = raw_estimate(
            n, inp, params, config.grid_points_interior * scale,
            config.grid_points_exterior * scale, config,
        )
        levels.append(ModeCoefficients(*map(complex, est)))
        coeffs.append(est)
        ints.append(v_int)
        exts.append(v_ext)
    best = _richardson(coeffs)
    return OracleResult(
        ModeCoefficients(*map(complex, best)),
        levels,
        r_int,
        _richardson(ints),
        r_ext,
        _richardson(exts),
    )


def _vacuum_grid(m, omega, f_n, count, r_cut):
    s = np.linspace(math.log(r_cut), math.log(R_DOMAIN), count + 1)
    h = s[1] - s[0]
    b = _Builder(count + 2)
    _helmholtz_rows(b, 0, s[:-1], h, omega, m)
    g = _regular_log_slope(m, omega * r_cut)
    b.equation([(2, 1.0), (0, -1.0), (1, -2.0 * h * g)])
    b.equation([(count + 1, 1.0)], f_n)
    return np.exp(s), b.solve()[1:]


def vacuum_solve(n, omega, f_n, config=OracleConfig()):
    """Vacuum control: v'' + v'/r + (w^2 - n^2/r^2) v = 0 on (0, 3), v(3) = f_n.

    Returns (r, v) at the nodes of the base exterior grid, Richardson
    extrapolated like :func:`oracle_solve`.
    """
    m = abs(n)
    base = config.grid_points_exterior
    runs = []
    for level in range(config.richardson_levels + 1):
        scale = 2**level
        r, v = _vacuum_grid(m, omega, f_n, base * scale, config.r_inner_cut)
        runs.append(v[::scale])
        if level == 0:
            r_base = r
    return r_base, _richardson(runs)


COEFFICIENT_RTOL = 1e-4
VACUUM_TOL = 1e-6
ORDER_TARGET = 2.0
ORDER_TOL = 0.2


def _relative_gap(x, ref):
    x = np.asarray(x.as_tuple())
    ref = np.asarray(ref.as_tuple())
    return float(np.max(np.abs(x - ref)) / max(np.max(np.abs(ref)), 1e-300))


def observed_order(n, inp, params, config=OracleConfig()):
    """Convergence order of raw single-grid coefficients against the closed form."""
    exact = solve_mode_closed(inp, params)
    errs = []
    for scale in (1, 2, 4):
        est = raw_estimate(
            n, inp, params, config.grid_points_interior * scale,
            config.grid_points_exterior * scale, config,
        )[0]
        errs.append(_relative_gap(ModeCoefficients(*est), exact))
    return [math.log2(errs[i] / errs[i + 1]) for i in range(2)]


def verification_suite(kappa, omega, R_values, modes=(0, 1, 2, 3), f=1.0, p=1.0,
                       config=OracleConfig()):
    """Oracle comparisons behind the ``check`` command.

    Returns a list of dicts with keys name, value, tolerance, passed, in a
    fixed order.
    """
    out = []
    N = max(abs(n) for n in modes)
    for R in R_values:
        params = CloakParams(kappa, omega, R, N)
        for n in modes:
            inp = ModeInput(n, f, p)
            gap = _relative_gap(oracle_solve(n, inp, params, config).coefficients,
                                solve_mode_closed(inp, params))
            out.append(_entry(f"oracle R={R!r} n={n}", gap, COEFFICIENT_RTOL, gap <= COEFFICIENT_RTOL))
    params = CloakParams(kappa, omega, R_values[0], N)
    orders = observed_order(modes[-1], ModeInput(modes[-1], f, p), params, config)
    worst = max(abs(q - ORDER_TARGET) for q in orders)
    out.append(_entry("self-convergence order", orders, ORDER_TOL, worst <= ORDER_TOL))
    r, v = vacuum_solve(0, omega, 1.0, config)
    j3 = specfun.bessel_j(0, 3.0 * omega)
    err = float(np.max(np.abs(v - np.array([specfun.bessel_j(0, omega * x) for x in r]) / j3)))
    out.append(_entry("vacuum control", err, VACUUM_TOL, err <= VACUUM_TOL))
    return out


def _entry(name, value, tolerance, passed):
    return {"name": name, "value": value, "tolerance": tolerance, "passed": bool(passed)}
