"""Sweeps R -> 1+ along R_k = 1 + 2^-k and the limit quantities they measure."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import specfun
from .errors import ResonanceSingular, ResonantFrequency, VacuumDirichletEigenvalue
from .fields import limit_coefficient
from .modes import ModeInput, interior_gain, intermediates, solve_mode_closed, solve_mode_direct
from .resonance import MARGIN_FLOOR, check_nonresonant, resonance_function

NOISE_FLOOR = 1e-13
FIT_QUANTITIES = ("residual", "abs_b", "abs_c", "gap_a", "dn_dev")


def boundary_residual(n, params, p_n=1.0, zeroth_order="abs"):
    """Normalised |k R Phi'(R) + |n| Phi(R)| for Phi = (A/B) J(k w r) + H(k w r).

    ``zeroth_order="square"`` swaps the |n| weight for n**2, the variant of
    the boundary expression that is recorded but not expected to decay.
    """
    if abs(resonance_function(n, params.kappa, params.omega)) < MARGIN_FLOOR:
        raise ResonanceSingular(f"omega = {params.omega!r} is resonant for mode {n}")
    if p_n == 0:
        return 0.0
    m = abs(n)
    weight = m if zeroth_order == "abs" else m * m
    gain = interior_gain(n, params)
    kw = params.kappa * params.omega
    j, jp, h, hp = specfun.jh(m, kw * params.R)
    kR = params.kappa * params.R
    terms = (kR * kw * gain * jp, kR * kw * hp, weight * gain * j, weight * h)
    scale = max(abs(t) for t in terms)
    return abs(sum(terms)) / scale


def dn_map_cloak(n, params, f_n=1.0, vacuum=False):
    """w (b J'(3w) + c H'(3w)) / f_n for the cloak with p = 0."""
    inp = ModeInput(n, f_n, 0.0)
    co = solve_mode_direct(inp, params, vacuum=True) if vacuum else solve_mode_closed(inp, params)
    _, jp, _, hp = specfun.jh(abs(n), 3.0 * params.omega)
    return params.omega * (co.b * jp + co.c * hp) / f_n


def dn_map_vacuum(n, omega):
    j, jp, _, _ = specfun.jh(abs(n), 3.0 * omega)
    if abs(j) < MARGIN_FLOOR:
        raise VacuumDirichletEigenvalue(f"J_{abs(n)}(3 omega) = {j:.3e} vanishes")
    return omega * jp / j


def dn_deviation(n, params, f_n=1.0, vacuum=False):
    """|DN_cloak(n) - DN_vacuum(n)| at r = 3.

    ``vacuum=True`` runs the control with the cloak replaced by vacuum,
    which must reproduce the vacuum DN map exactly.
    """
    return abs(dn_map_cloak(n, params, f_n, vacuum) - dn_map_vacuum(n, params.omega))


def fit_order(rho, values, floor=NOISE_FLOOR):
    """Least-squares slope of ln(value) against ln(rho), ignoring the noise floor."""
    rho = np.asarray(rho, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = np.isfinite(values) & (values > floor)
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(rho[keep]), np.log(values[keep]), 1)[0])


@dataclass
class SweepRow:
    k: int
    R: float
    rho: float
    residual: float
    residual_n2: float
    abs_b: float
    abs_c: float
    gap_a: float
    dn_dev: float


@dataclass
class ModeSweep:
    n: int
    rows: list = field(default_factory=list)
    fitted_orders: dict = field(default_factory=dict)

    def column(self, name, k_min=None, k_max=None):
        return [getattr(r, name) for r in self.rows if _in(r.k, k_min, k_max)]

    def fit(self, name, k_min=None, k_max=None):
        return fit_order(self.column("rho", k_min, k_max), self.column(name, k_min, k_max))

    def log_product(self, omega, k_min=None, k_max=None):
        """residual * |ln(w rho / 2)|, the bounded quantity for n = 0."""
        return [
            r.residual * abs(math.log(omega * r.rho / 2.0))
            for r in self.rows
            if _in(r.k, k_min, k_max)
        ]


def _in(k, k_min, k_max):
    return (k_min is None or k >= k_min) and (k_max is None or k <= k_max)


@dataclass
class SweepReport:
    kappa: float
    omega: float
    k_range: tuple
    source: dict
    boundary: dict
    per_mode: list = field(default_factory=list)

    @property
    def R_values(self):
        return [1.0 + 2.0**-k for k in range(self.k_range[0], self.k_range[1] + 1)]

    def mode(self, n):
        for ms in self.per_mode:
            if ms.n == n:
                return ms
        raise KeyError(n)

    @property
    def n0_log_product(self):
        return self.mode(0).log_product(self.omega)

    def to_dict(self):
        return {
            "params": {"kappa": self.kappa, "omega": self.omega},
            "k_range": list(self.k_range),
            "per_mode": [
                {
                    "n": ms.n,
                    "rows": [
                        {
                            "k": r.k,
                            "rho": r.rho,
                            "residual": r.residual,
                            "residual_n2": r.residual_n2,
                            "abs_b": r.abs_b,
                            "abs_c": r.abs_c,
                            "gap_a": r.gap_a,
                            "dn_dev": r.dn_dev,
                        }
                        for r in ms.rows
                    ],
                    "fitted_orders": ms.fitted_orders,
                }
                for ms in self.per_mode
            ],
        }

    def flat_rows(self):
        for ms in self.per_mode:
            for r in ms.rows:
                yield {"n": ms.n, **asdict(r)}


def _sweep_row(params, n, k, p_n, f_n):
    R = 1.0 + 2.0**-k
    P = params.with_R(R)
    try:
        inter = intermediates(n, P)
        co = solve_mode_closed(ModeInput(n, f_n, p_n), P, inter)
        a_lim = limit_coefficient(n, P.kappa, P.omega, p_n)
        return SweepRow(
            k=k,
            R=R,
            rho=P.rho,
            residual=boundary_residual(n, P),
            residual_n2=boundary_residual(n, P, zeroth_order="square"),
            abs_b=abs(co.b),
            abs_c=abs(co.c),
            gap_a=abs(co.a - a_lim),
            dn_dev=dn_deviation(n, P),
        )
    except ArithmeticError as exc:
        annotated = type(exc)(f"k = {k}, mode {n}: {exc}")
        if hasattr(exc, "n"):
            annotated.n = exc.n
        raise annotated from exc


def run_sweep(params, k_range=(4, 14), modes=None, p=None, f=None, threads=1,
              require_nonresonant=True):
    """Solve every mode at R_k = 1 + 2^-k and fit log-log orders against rho.

    ``params.R`` is ignored; ``p`` defaults to p_n = 1 on every swept mode
    and ``f`` to zero. The boundary residual is linear in p_n and is always
    measured with p_n = 1. No polynomial order is fitted for the n = 0 residual,
    whose rate is logarithmic. ``require_nonresonant=False`` skips the
    up-front non-resonance guard.
    """
    check = check_nonresonant(params)
    if require_nonresonant and not check:
        raise ResonantFrequency(
            f"parameters violate the non-resonance condition ({check.condition}) "
            f"for mode {check.violating_mode}",
            n=check.violating_mode,
        )
    if modes is None:
        modes = range(params.N + 1)
    modes = list(modes)
    p = {n: 1.0 for n in modes} if p is None else dict(p)
    f = dict(f or {})
    ks = list(range(k_range[0], k_range[1] + 1))
    jobs = [(n, k) for n in modes for k in ks]
    run = lambda job: _sweep_row(params, job[0], job[1], p.get(job[0], 0.0), f.get(job[0], 0.0))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(job) for job in jobs]
    report = SweepReport(params.kappa, params.omega, (ks[0], ks[-1]), p, f)
    for i, n in enumerate(modes):
        ms = ModeSweep(n, rows[i * len(ks): (i + 1) * len(ks)])
        for name in FIT_QUANTITIES:
            ms.fitted_orders[name] = None if (name == "residual" and n == 0) else ms.fit(name)
        report.per_mode.append(ms)
    return report
