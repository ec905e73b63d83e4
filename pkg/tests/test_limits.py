import numpy as np
import pytest

from cloaklab.errors import ResonanceSingular, ResonantFrequency, VacuumDirichletEigenvalue
from cloaklab.limits import (
    SweepReport,
    boundary_residual,
    dn_deviation,
    dn_map_vacuum,
    fit_order,
    run_sweep,
)
from cloaklab.modes import CloakParams

BASE = CloakParams(1.0, 1.0, 1.5, 2)


def at_k(k, N=2, kappa=1.0, omega=1.0):
    return CloakParams(kappa, omega, 1 + 2.0**-k, N)


@pytest.fixture(scope="module")
def sweep():
    return run_sweep(BASE, (4, 14))


class TestBoundaryResidual:
    def test_quadratic_decay_mode1(self):
        ratio = boundary_residual(1, at_k(10)) / boundary_residual(1, at_k(6))
        assert 2.0**-8 / 2 <= ratio <= 2.0**-8 * 2

    def test_linear_in_source(self):
        # normalised by its own term magnitudes, so any nonzero p gives the same value
        assert boundary_residual(2, at_k(8), p_n=3.0) == boundary_residual(2, at_k(8))
        assert boundary_residual(2, at_k(8), p_n=0) == 0.0

    def test_mode0_log_product_bounded(self, sweep):
        prod = sweep.mode(0).log_product(1.0, 4, 14)
        assert max(prod) / min(prod) <= 3

    def test_resonance_rejected(self):
        with pytest.raises(ResonanceSingular):
            boundary_residual(0, CloakParams(1.0, 3.8317059702075125, 1.01, 0))

    def test_square_weight_variant_is_recorded(self, sweep):
        col = sweep.mode(2).column("residual_n2")
        assert all(np.isfinite(col)) and all(v > 0 for v in col)


class TestDirichletToNeumann:
    def test_monotone_trend(self):
        assert dn_deviation(1, at_k(12)) <= dn_deviation(1, at_k(4))

    def test_four_decades(self):
        assert dn_deviation(1, at_k(14)) <= 1e-4 * dn_deviation(1, at_k(4))

    def test_vacuum_control(self):
        for R in (1.05, 1.5):
            for n in (0, 1, 3):
                assert dn_deviation(n, CloakParams(1.3, 1.0, R, 3), vacuum=True) <= 1e-10

    def test_vacuum_dirichlet_eigenvalue(self):
        w = 2.404825557695773 / 3
        with pytest.raises(VacuumDirichletEigenvalue):
            dn_map_vacuum(0, w)


class TestFitOrder:
    def test_exact_power(self):
        rho = 2.0 ** -np.arange(4, 12)
        assert fit_order(rho, 3 * rho**2.5) == pytest.approx(2.5, abs=1e-12)

    def test_noise_floor_excluded(self):
        rho = 2.0 ** -np.arange(4, 12)
        values = rho**2
        values[-2:] = 1e-16
        assert fit_order(rho, values) == pytest.approx(2.0, abs=1e-12)

    def test_too_few_points(self):
        assert fit_order([0.1, 0.01], [1e-14, 1e-15]) is None


class TestSweep:
    def test_shape_and_alignment(self, sweep):
        assert isinstance(sweep, SweepReport)
        assert [ms.n for ms in sweep.per_mode] == [0, 1, 2]
        assert sweep.R_values == [1 + 2.0**-k for k in range(4, 15)]
        for ms in sweep.per_mode:
            assert [r.R for r in ms.rows] == sweep.R_values
            assert [r.rho for r in ms.rows] == pytest.approx([2 * (R - 1) for R in sweep.R_values])

    def test_no_polynomial_fit_for_mode0_residual(self, sweep):
        assert sweep.mode(0).fitted_orders["residual"] is None

    @pytest.mark.parametrize("n", [1, 2])
    def test_residual_order_over_tail(self, sweep, n):
        assert sweep.mode(n).fit("residual", 6, 14) == pytest.approx(2.0, abs=0.3)

    @pytest.mark.parametrize("n", [1, 2])
    def test_gap_to_limit_is_monotone(self, sweep, n):
        gaps = sweep.mode(n).column("gap_a")
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_gap_to_limit_small(self, sweep):
        from cloaklab.fields import limit_coefficient

        for n in (1, 2):
            row = sweep.mode(n).rows[-1]
            assert row.gap_a <= 1e-3 * abs(limit_coefficient(n, 1.0, 1.0, 1.0))

    @pytest.mark.parametrize("n", [1, 2])
    def test_exterior_coefficient_orders_measured(self, sweep, n):
        # measured decay with p_n = 1 is rho^n for both b_n and c_n
        ms = sweep.mode(n)
        assert ms.fitted_orders["abs_b"] == pytest.approx(n, abs=0.1)
        assert ms.fitted_orders["abs_c"] == pytest.approx(n, abs=0.1)

    def test_exterior_coefficients_vanish_in_the_limit(self, sweep):
        for n in (1, 2):
            b = sweep.mode(n).column("abs_b")
            c = sweep.mode(n).column("abs_c")
            assert b[-1] <= 1e-3 * b[0] and c[-1] <= 1e-3 * c[0]

    def test_resonant_parameters_rejected(self):
        with pytest.raises(ResonantFrequency) as info:
            run_sweep(CloakParams(1.0, 3.8317059702075125, 1.5, 1), (4, 6))
        assert info.value.n == 0

    def test_errors_are_annotated_with_k(self):
        params = CloakParams(1.0, 3.8317059702075125, 1.5, 0)
        with pytest.raises(ResonantFrequency, match="k = 4, mode 0") as info:
            run_sweep(params, (4, 6), require_nonresonant=False)
        assert info.value.n == 0

    def test_threads_are_deterministic(self, sweep):
        other = run_sweep(BASE, (4, 14), threads=4)
        assert other.to_dict() == sweep.to_dict()

    def test_exports(self, sweep):
        doc = sweep.to_dict()
        assert doc["k_range"] == [4, 14]
        assert set(doc["per_mode"][1]["rows"][0]) == {
            "k", "rho", "residual", "residual_n2", "abs_b", "abs_c", "gap_a", "dn_dev"
        }
        flat = list(sweep.flat_rows())
        assert len(flat) == 33
        assert flat[0]["n"] == 0 and flat[-1]["k"] == 14

    def test_custom_source_scales_coefficients(self):
        one = run_sweep(BASE, (6, 8), modes=[1])
        two = run_sweep(BASE, (6, 8), modes=[1], p={1: 2.0})
        for a, b in zip(one.mode(1).rows, two.mode(1).rows):
            assert b.abs_c == pytest.approx(2 * a.abs_c, rel=1e-12)
            assert b.residual == a.residual
