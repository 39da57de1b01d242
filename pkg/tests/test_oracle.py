import numpy as np
import pytest

from conftest import sinc_density, sinc_potential
from vpsteady import (
    InvalidArgumentError,
    NoZeroFoundError,
    PolytropeParams,
    RadialDensity,
    apply_T,
    center_bound,
    check_monotone_and_boundary,
    check_pointwise_lower_bound,
    compare,
    lane_emden_shoot,
    make_uniform_grid,
    oracle_steady_state,
)
from vpsteady.gravity import RadialPotential


class TestShoot:
    def test_n0(self):
        xi1, slope = lane_emden_shoot(0.0)
        assert xi1 == pytest.approx(np.sqrt(6), abs=1e-10)
        assert slope == pytest.approx(-np.sqrt(6) / 3, abs=1e-10)

    def test_n1(self):
        xi1, slope = lane_emden_shoot(1.0)
        assert xi1 == pytest.approx(np.pi, abs=1e-10)
        assert slope == pytest.approx(-1 / np.pi, abs=1e-10)

    @pytest.mark.parametrize("n", [5.0, 5.1, -0.5])
    def test_invalid_index(self, n):
        with pytest.raises(InvalidArgumentError):
            lane_emden_shoot(n)

    def test_no_zero(self):
        # xi_1 is about 169 for n = 4.9, beyond the search range
        with pytest.raises(NoZeroFoundError):
            lane_emden_shoot(4.9, step=1e-2)

    def test_n15_reference(self):
        # tabulated n = 3/2 polytrope: xi_1 = 3.65375, -xi^2 theta' = 2.71406
        xi1, slope = lane_emden_shoot(1.5)
        assert xi1 == pytest.approx(3.65375, abs=1e-5)
        assert -xi1**2 * slope == pytest.approx(2.71406, abs=1e-5)

    @pytest.mark.parametrize("n", [1.5, 1.0, 2.5])
    def test_step_halving(self, n):
        a, _ = lane_emden_shoot(n, 1e-5)
        b, _ = lane_emden_shoot(n, 5e-6)
        assert abs(a - b) <= 1e-8


class TestOracleState:
    def test_k_minus_half(self, grid1000):
        sol = oracle_steady_state(-0.5, grid1000)
        assert sol.y_center == pytest.approx(1.0, abs=1e-10)
        assert sol.amplitude == pytest.approx(1 / (8 * np.sqrt(2) * np.pi), rel=1e-10)
        np.testing.assert_allclose(sol.density_profile, sinc_density(grid1000.nodes), atol=1e-10)
        np.testing.assert_allclose(sol.potential_profile, sinc_potential(grid1000.nodes), atol=1e-10)
        assert sol.potential_profile[-1] == -1.0

    def test_k0_mass(self):
        g = make_uniform_grid(2000)
        sol = oracle_steady_state(0.0, g)
        assert sol.density().mass == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("k", [-0.9, -0.5, 0.0, 0.45, 1.0, 1.4])
    def test_self_consistency(self, k):
        # the trapezoid mass error at the support edge is O(h^(k + 5/2)); n = 10^4
        # keeps it under 1e-6 down to k = -0.9
        g = make_uniform_grid(10000)
        sol = oracle_steady_state(k, g, step=1e-4)
        rho = sol.density_profile
        assert sol.xi1 > 0 and sol.theta_prime_at_xi1 < 0
        assert np.all(np.diff(rho) <= 0) and rho.min() >= 0 and rho[-1] == 0
        assert sol.density().mass == pytest.approx(1.0, abs=1e-6)
        assert sol.potential_profile[-1] == -1.0
        U = RadialPotential(g, sol.potential_profile, -1.0)
        assert check_monotone_and_boundary(U, expect_unit_mass=True)
        assert check_pointwise_lower_bound(U)
        assert center_bound(U, 0.1).satisfied

    @pytest.mark.parametrize("k", [-0.5, 0.0, 0.25, 0.45])
    def test_oracle_is_fixed_point_of_T(self, k, grid1000):
        sol = oracle_steady_state(k, grid1000, step=1e-4)
        out, bounds = apply_T(sol.density(), PolytropeParams(k))
        assert np.max(np.abs(out.values - sol.density_profile)) <= 10 * grid1000.h**2
        assert bounds.observed == pytest.approx(sol.amplitude, rel=1e-4)

    @pytest.mark.parametrize("k", [-0.9, -0.8, -0.7, -0.6])
    def test_fixed_point_defect_order_below_minus_half(self, k):
        # (-1 - U)^(k + 3/2) has an unbounded slope at the edge for k < -1/2, so
        # the pointwise defect only falls like h^(2k + 3)
        errs = []
        for n in (1000, 2000, 4000):
            g = make_uniform_grid(n)
            sol = oracle_steady_state(k, g, step=1e-4)
            out, _ = apply_T(sol.density(), PolytropeParams(k))
            errs.append(np.max(np.abs(out.values - sol.density_profile)))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 0.95 * (2 * k + 3))

    def test_invalid_k(self, grid1000):
        with pytest.raises(InvalidArgumentError):
            oracle_steady_state(3.6, grid1000)


class TestCompare:
    def test_identity(self, grid1000):
        sol = oracle_steady_state(0.0, grid1000, step=1e-4)
        assert compare(sol.density(), sol) == (0.0, 0.0)

    def test_grid_mismatch(self, grid1000):
        sol = oracle_steady_state(0.0, grid1000, step=1e-4)
        g = make_uniform_grid(500)
        with pytest.raises(InvalidArgumentError):
            compare(RadialDensity(g, np.zeros(501)), sol)
