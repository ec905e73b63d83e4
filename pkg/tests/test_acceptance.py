"""Acceptance gate: one verdict line per criterion, at the stated tolerances.

Each test records a PASS/FAIL line through ``record_acceptance``; the lines
are repeated in the terminal summary so a plain ``pytest -v`` run shows them.
"""

import io
import json
import math

import numpy as np
import pytest

import mp_oracle
from conftest import record_acceptance
from test_modes import random_draws
from cloaklab import specfun
from cloaklab.cli import main
from cloaklab.errors import RangeError
from cloaklab.fields import LimitField, ideal_limit_field, limit_coefficient
from cloaklab.geometry import PolarPoint
from cloaklab.limits import run_sweep
from cloaklab.modes import CloakParams, ModeInput, intermediates, residuals, solve_mode_closed, solve_mode_direct
from cloaklab.oracle import verification_suite
from cloaklab.resonance import blowup_probe, dyadic_radii, find_resonances

DRAWS = random_draws(50)


@pytest.fixture(scope="module")
def sweep():
    return run_sweep(CloakParams(1.0, 1.0, 1.5, 2), (4, 14))


def test_criterion_1_special_functions():
    worst_w = worst_j = worst_y = 0.0
    for x in np.logspace(-6, 2, 200):
        for n in range(31):
            try:
                worst_w = max(worst_w, specfun.wronskian_residual(n, x) / (1 + 1 / x))
            except RangeError:
                pass
        j, _, y, _ = specfun.jy_table(31, x)
        jmax = np.max(np.abs(j))
        finite = np.isfinite(y)
        ymax = np.max(np.abs(y[finite]))
        for n in range(1, 31):
            worst_j = max(worst_j, abs(j[n - 1] + j[n + 1] - 2 * n / x * j[n]) / jmax)
            if finite[n + 1]:
                worst_y = max(worst_y, abs(y[n - 1] + y[n + 1] - 2 * n / x * y[n]) / ymax)
    passed = worst_w <= 1e-8 and max(worst_j, worst_y) <= 1e-9
    assert record_acceptance(
        1, passed,
        f"max wronskian/(1+1/x) = {worst_w:.2e} (tol 1e-8); "
        f"max recurrence closure J {worst_j:.2e}, Y {worst_y:.2e} (tol 1e-9)",
    )


def test_criterion_2_solver_equivalence():
    worst_gap = worst_res = 0.0
    for params, inp in DRAWS:
        closed = solve_mode_closed(inp, params)
        direct = solve_mode_direct(inp, params)
        for a, b in zip(closed.as_tuple(), direct.as_tuple()):
            worst_gap = max(worst_gap, abs(a - b) / abs(b))
        worst_res = max(worst_res, *residuals(closed, inp, params), *residuals(direct, inp, params))
    passed = worst_gap <= 1e-10 and worst_res <= 1e-9
    assert record_acceptance(
        2, passed,
        f"{len(DRAWS)} draws: max relative gap {worst_gap:.2e} (tol 1e-10); "
        f"max residual {worst_res:.2e} (tol 1e-9)",
    )


def test_criterion_3_wronskian_reductions():
    worst = 0.0
    for params, inp in DRAWS:
        inter = intermediates(inp.n, params)
        w, k = params.omega, params.kappa
        t_ref = -2j / (math.pi * w)
        s_ref = 2j * k / (math.pi * w)
        worst = max(worst, abs(inter.t * inter.D - t_ref) / abs(t_ref),
                    abs(inter.s_tilde * inter.D - s_ref) / abs(s_ref))
    assert record_acceptance(3, worst <= 1e-10, f"max relative deviation {worst:.2e} (tol 1e-10)")


def test_criterion_4_boundary_condition_emergence(sweep):
    orders = {n: sweep.mode(n).fit("residual", 6, 14) for n in (1, 2)}
    prod = sweep.mode(0).log_product(1.0, 6, 14)
    spread = max(prod) / min(prod)
    passed = all(abs(q - 2.0) <= 0.3 for q in orders.values()) and spread <= 3
    assert record_acceptance(
        4, passed,
        f"residual orders n=1 {orders[1]:.3f}, n=2 {orders[2]:.3f} (2 +- 0.3); "
        f"n=0 log-product max/min {spread:.3f} (<= 3)",
    )


def test_criterion_5_invisibility_decay(sweep):
    orders = {
        (name, n): sweep.mode(n).fitted_orders[name] for name in ("abs_b", "abs_c") for n in (1, 2)
    }
    orders_ok = all(abs(q - (n + 1)) <= 0.3 for (_, n), q in orders.items())
    dn = sweep.mode(1).column("dn_dev")
    drop = dn[0] / dn[-1]
    detail = ", ".join(f"{name[4:]}{n} {q:.3f}" for (name, n), q in orders.items())
    assert record_acceptance(
        5, orders_ok and drop >= 1e4,
        f"orders {detail} (target n+1 +- 0.3: {'ok' if orders_ok else 'MISSED'}); "
        f"DN deviation drop k=4..14 {drop:.2e} (>= 1e4)",
    )


def test_criterion_6_ideal_limit(sweep):
    gaps = {}
    for n in (1, 2):
        a_lim = limit_coefficient(n, 1.0, 1.0, 1.0)
        gaps[n] = sweep.mode(n).rows[-1].gap_a / abs(a_lim)
    limit = LimitField.from_source(1.0, 1.0, 2, {0: 1.0, 1: 1.0, -2: 0.5j})
    nonzero = 0
    samples = 0
    for r in np.linspace(1.0 + 1e-9, 3.0, 41):
        for th in np.linspace(0, 2 * math.pi, 17):
            samples += 1
            nonzero += ideal_limit_field(limit, PolarPoint(r, th)) != 0
    passed = max(gaps.values()) <= 1e-3 and nonzero == 0
    assert record_acceptance(
        6, passed,
        f"relative gap at k=14 n=1 {gaps[1]:.2e}, n=2 {gaps[2]:.2e} (tol 1e-3); "
        f"{nonzero} nonzero of {samples} exterior samples",
    )


def test_criterion_7_resonances():
    ref = {0: mp_oracle.bessel_zeros(1, 0.5, 8.0), 1: mp_oracle.bessel_zeros(0, 0.5, 6.0)}
    expected = {0: [3.8317059702, 7.0155866698], 1: [2.4048255577, 5.5200781103]}
    worst_root = 0.0
    min_h = math.inf
    counts_ok = True
    for n, span in ((0, (0.5, 8.0)), (1, (0.5, 6.0))):
        rep = find_resonances(n, 1.0, span)
        counts_ok &= len(rep.roots) == len(ref[n]) == 2
        for root, oracle_root, listed in zip(rep.roots, ref[n], expected[n]):
            worst_root = max(worst_root, abs(root - oracle_root))
            counts_ok &= abs(root - listed) <= 1e-8
        min_h = min(min_h, *(h for _, h in rep.condition_values))
    first = find_resonances(0, 1.0, (0.5, 8.0)).roots[0]
    seq = blowup_probe(0, 1.0, first, dyadic_radii(4, 12))
    increasing = all(b > a for a, b in zip(seq, seq[1:]))
    drops = [k for k, (a, b) in enumerate(zip(seq, seq[1:]), start=5) if b <= a]
    passed = counts_ok and worst_root <= 1e-8 and min_h >= 1e-6 and increasing
    assert record_acceptance(
        7, passed,
        f"max root gap to oracle {worst_root:.2e} (tol 1e-8); min |h| {min_h:.3f} (>= 1e-6); "
        f"|a0(R_k)| k=4..12 strictly increasing: {increasing}"
        + (f" (decreases at k={drops}, peak {max(seq):.1f})" if drops else ""),
    )


def test_criterion_8_oracle_cross_check():
    report = verification_suite(1.0, 1.0, [1.05, 1.2, 1.5], modes=(0, 1, 2, 3))
    gaps = [e["value"] for e in report if e["name"].startswith("oracle")]
    orders = next(e["value"] for e in report if e["name"] == "self-convergence order")
    passed = max(gaps) <= 1e-4 and all(abs(q - 2.0) <= 0.2 for q in orders)
    assert record_acceptance(
        8, passed,
        f"max coefficient gap {max(gaps):.2e} over {len(gaps)} cases (tol 1e-4); "
        f"orders {', '.join(f'{q:.3f}' for q in orders)} (2 +- 0.2)",
    )


def _run(command, path, threads):
    out = io.StringIO()
    code = main([command, "--config", path, "--threads", str(threads)], stdout=out, stderr=io.StringIO())
    return code, out.getvalue()


def test_criterion_9_determinism(tmp_path):
    cfg = {
        "kappa": 1.0, "omega": 1.0, "R": 1.1, "N": 2,
        "source": [[1, 1.0, 0.0], [-2, 0.0, 0.5]], "boundary": [[0, 1.0, 0.0]],
        "grid": {"r_min": 0.05, "r_max": 3.0, "n_r": 13, "n_theta": 8},
        "sweep": {"k_min": 4, "k_max": 10},
        "resonances": {"omega_min": 0.5, "omega_max": 6.0},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    mismatched = []
    for command in ("solve", "field", "resonances", "limit", "materials"):
        outputs = [_run(command, str(path), threads) for threads in (1, 1, 4)]
        if any(o != outputs[0] for o in outputs) or outputs[0][0] != 0:
            mismatched.append(command)
    assert record_acceptance(
        9, not mismatched,
        "byte-identical across repeats and --threads 1/4 for solve, field, resonances, limit, materials"
        + (f"; mismatched: {mismatched}" if mismatched else ""),
    )
