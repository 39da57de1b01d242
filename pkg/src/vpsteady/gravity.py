"""Radial Poisson solve for the Newtonian potential of a spherical density,
and checks of the bounds every admissible potential must satisfy.

Units have G = 1, total mass 1 and support radius 1, so a unit-mass source
has U(1) = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vpsteady.errors import InvalidArgumentError
from vpsteady.radial_core import FOUR_PI, RadialDensity, RadialGrid

# r1 = cbrt(4/5) is the smallest radius allowed in the centre bound
R1_DEFAULT = (4.0 / 5.0) ** (1.0 / 3.0)
R0_MAX = 0.1

STEP_ATOL = 1e-12
LOWER_BOUND_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class RadialPotential:
    grid: RadialGrid
    values: np.ndarray
    boundary: float


@dataclass(frozen=True)
class CenterBoundCertificate:
    """Outcome of the centre estimate U(r0) <= -1 - delta."""

    r0: float
    r1: float
    delta: float
    satisfied: bool
    observed: float


def _cumtrapz(y: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * h * (y[1:] + y[:-1]), out=out[1:])
    return out


def potential(rho: RadialDensity) -> RadialPotential:
    """Evaluate U(r) = -(4 pi / r) int_0^r s^2 rho ds - 4 pi int_r^1 s rho ds.

    Both integrals are running trapezoid sums over the grid. The centre value
    comes from the even expansion U = a + b r^2 through the first two interior
    nodes, U(0) = (4 U(h) - U(2h)) / 3. Taking the analytic limit
    -4 pi int_0^1 s rho ds instead would give U(0) = U(h) exactly (the
    trapezoid enclosed mass on the first cell is 2 pi h^3 rho, not
    4 pi h^3 rho / 3) and leave an O(h^2) kink at the origin.
    """
    grid = rho.grid
    r = grid.nodes
    h = grid.h
    inner = FOUR_PI * _cumtrapz(r**2 * rho.values, h)
    outer_cum = FOUR_PI * _cumtrapz(r * rho.values, h)
    outer = outer_cum[-1] - outer_cum

    u = np.empty_like(r)
    u[1:] = -inner[1:] / r[1:] - outer[1:]
    u[0] = (4.0 * u[1] - u[2]) / 3.0
    u.setflags(write=False)
    return RadialPotential(grid=grid, values=u, boundary=float(u[-1]))


def check_monotone_and_boundary(U: RadialPotential, expect_unit_mass: bool) -> bool:
    steps = np.diff(U.values)
    if np.any(steps < -STEP_ATOL):
        return False
    if expect_unit_mass:
        return abs(U.boundary + 1.0) <= 10.0 * U.grid.h**2
    return True


def check_pointwise_lower_bound(U: RadialPotential) -> bool:
    """True iff U(r) >= -1/r at every positive node (sources of mass <= 1)."""
    r = U.grid.nodes[1:]
    return bool(np.all(U.values[1:] >= -1.0 / r - LOWER_BOUND_ATOL))


def derivative_bound_ok(U: RadialPotential) -> bool:
    """Forward differences of U lie in [0, 1/r_i^2] (unit-mass sources)."""
    r = U.grid.nodes
    slope = np.diff(U.values) / np.diff(r)
    tol = 10.0 * U.grid.h**2
    if np.any(slope < -STEP_ATOL / U.grid.h):
        return False
    return bool(np.all(slope[1:] <= 1.0 / r[1:-1] ** 2 + tol))


def interpolate(U: RadialPotential, r: float) -> float:
    return float(np.interp(r, U.grid.nodes, U.values))


def center_delta(r1: float = R1_DEFAULT) -> float:
    return min(0.1, 0.5 * (1.0 / r1 - 1.0))


def center_bound(U: RadialPotential, r0: float) -> CenterBoundCertificate:
    """Certify U(r0) <= -1 - delta with delta = min(1/10, (1/r1 - 1)/2).

    r0 must lie in (0, 1/10]; r1 is fixed to cbrt(4/5), which gives the
    largest admissible delta.
    """
    if not 0.0 < r0 <= R0_MAX:
        raise InvalidArgumentError(f"r0 must lie in (0, 1/10], got {r0}")
    r1 = R1_DEFAULT
    delta = center_delta(r1)
    observed = interpolate(U, r0)
    satisfied = observed <= -1.0 - delta + 10.0 * U.grid.h**2
    return CenterBoundCertificate(r0=float(r0), r1=r1, delta=delta, satisfied=bool(satisfied), observed=observed)
