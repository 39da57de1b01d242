import numpy as np
import pytest
import sympy as sp

from conftest import sinc_density, sinc_potential
from vpsteady import (
    InvalidArgumentError,
    RadialDensity,
    RadialPotential,
    center_bound,
    check_monotone_and_boundary,
    check_pointwise_lower_bound,
    make_uniform_grid,
    potential,
    project_to_D,
)
from vpsteady.gravity import derivative_bound_ok
from vpsteady.samples import KINDS, random_density, random_densities

UNIFORM = 3 / (4 * np.pi)


def symbolic_potential(rho_expr):
    r, s = sp.symbols("r s", positive=True)
    rho_s = rho_expr(s)
    inner = sp.integrate(rho_s * s**2, (s, 0, r))
    outer = sp.integrate(rho_s * s, (s, r, 1))
    return r, sp.simplify(-4 * sp.pi / r * inner - 4 * sp.pi * outer)


def test_uniform_closed_form_symbolic():
    r, u = symbolic_potential(lambda s: sp.Rational(3, 4) / sp.pi)
    assert sp.simplify(u - (r**2 - 3) / 2) == 0


def test_sinc_closed_form_symbolic():
    r, u = symbolic_potential(lambda s: sp.sin(sp.pi * s) / (4 * s))
    assert sp.simplify(u - (-1 - sp.sin(sp.pi * r) / (sp.pi * r))) == 0


def uniform_potential(grid):
    return potential(RadialDensity(grid, np.full(grid.n + 1, UNIFORM)))


class TestPotential:
    def test_uniform_sphere(self, grid1000):
        U = uniform_potential(grid1000)
        r = grid1000.nodes
        assert np.max(np.abs(U.values - (r**2 - 3) / 2)) <= 10 * grid1000.h**2
        assert U.values[0] == pytest.approx(-1.5, abs=1e-5)
        assert U.boundary == pytest.approx(-1.0, abs=1e-5)

    def test_zero_source(self, grid1000):
        U = potential(RadialDensity(grid1000, np.zeros(1001)))
        assert np.all(U.values == 0.0)

    def test_sinc(self, grid1000):
        U = potential(RadialDensity(grid1000, sinc_density(grid1000.nodes)))
        assert np.max(np.abs(U.values - sinc_potential(grid1000.nodes))) <= 10 * grid1000.h**2
        assert U.values[0] == pytest.approx(-2.0, abs=1e-5)

    def test_grid_convergence_uniform(self):
        errs = []
        for n in (250, 500, 1000, 2000):
            g = make_uniform_grid(n)
            errs.append(np.max(np.abs(uniform_potential(g).values - (g.nodes**2 - 3) / 2)))
        for coarse, fine in zip(errs, errs[1:]):
            assert coarse / fine >= 3.5

    def test_linearity(self, grid1000):
        rng = np.random.default_rng(11)
        a, b = random_densities(grid1000, 2, seed=5)
        for alpha, beta in rng.uniform(0, 3, size=(5, 2)):
            combo = potential(RadialDensity(grid1000, alpha * a.values + beta * b.values))
            expected = alpha * potential(a).values + beta * potential(b).values
            np.testing.assert_allclose(combo.values, expected, rtol=1e-12, atol=1e-14)


class TestChecks:
    def test_monotone_uniform(self, grid1000):
        assert check_monotone_and_boundary(uniform_potential(grid1000), expect_unit_mass=True)

    def test_monotone_violation(self):
        g = make_uniform_grid(2)
        U = RadialPotential(g, np.array([-2.0, -2.1, -1.0]), -1.0)
        assert not check_monotone_and_boundary(U, expect_unit_mass=False)

    def test_zero_potential_vacuous(self, grid1000):
        U = RadialPotential(grid1000, np.zeros(1001), 0.0)
        assert check_monotone_and_boundary(U, expect_unit_mass=False)
        assert not check_monotone_and_boundary(U, expect_unit_mass=True)

    def test_lower_bound_uniform(self, grid1000):
        # the bound needs mass <= 1; the raw constant has discrete mass 1 + h^2/2
        unit = project_to_D(np.full(1001, UNIFORM), grid1000)
        assert check_pointwise_lower_bound(potential(unit))

    def test_lower_bound_violated(self, grid1000):
        r = grid1000.nodes
        vals = np.concatenate([[-1e6], -2.0 / r[1:]])
        assert not check_pointwise_lower_bound(RadialPotential(grid1000, vals, -2.0))

    def test_lower_bound_sinc_fine_grid(self):
        g = make_uniform_grid(20000)
        U = potential(RadialDensity(g, sinc_density(g.nodes)))
        assert check_pointwise_lower_bound(U)
        # and the analytic profile itself
        r = g.nodes[1:]
        assert np.all(sinc_potential(r) >= -1 / r - 1e-15)


class TestCenterBound:
    def test_constants(self, grid1000):
        cert = center_bound(uniform_potential(grid1000), 0.1)
        assert cert.r1 == pytest.approx(0.928318, abs=1e-6)
        assert cert.r1**3 >= 0.8 - 1e-15
        # min{1/10, (1/r1 - 1)/2} with r1 = cbrt(4/5), evaluated to 30 digits
        assert cert.delta == pytest.approx(0.0386086725079709, rel=1e-13)
        assert cert.delta == pytest.approx(0.038607, abs=5e-6)

    def test_uniform_satisfied(self, grid1000):
        cert = center_bound(uniform_potential(grid1000), 0.1)
        assert cert.observed == pytest.approx(-1.495, abs=1e-5)
        assert cert.satisfied

    @pytest.mark.parametrize("r0", [0.5, 0.0, -0.1, 0.1000001])
    def test_invalid_r0(self, grid1000, r0):
        with pytest.raises(InvalidArgumentError):
            center_bound(uniform_potential(grid1000), r0)


@pytest.mark.parametrize("kind", KINDS)
def test_bounds_hold_on_random_members_of_D(grid1000, kind):
    rng = np.random.default_rng(hash(kind) % 2**32)
    for _ in range(30):
        U = potential(random_density(grid1000, rng, kind))
        assert check_monotone_and_boundary(U, expect_unit_mass=True)
        assert check_pointwise_lower_bound(U)
        assert derivative_bound_ok(U)
        for r0 in (0.1, 0.05, 0.01):
            assert center_bound(U, r0).satisfied


def test_truncated_power_laws(grid1000):
    r = grid1000.nodes
    for a in (0.5, 1.5, 2.5, 2.95):
        rho = project_to_D(np.maximum(r, grid1000.h) ** (-a), grid1000)
        U = potential(rho)
        assert check_pointwise_lower_bound(U)
        assert center_bound(U, 0.1).satisfied
