"""Lane-Emden shooting oracle for the polytropic steady state.

At a fixed point of T the function y = -1 - U satisfies
Delta y = -4 pi A c_k y_+^n with y(1) = 0 and y'(1) = -1 (unit mass), where
n = k + 3/2. Writing y(r) = y_c theta(xi_1 r) turns this into the classical
Lane-Emden problem

    theta'' + (2/xi) theta' + theta^n = 0,  theta(0) = 1, theta'(0) = 0,

rescaled so that the first zero xi_1 of theta lands on r = 1. Matching
y'(1) = -1 gives y_c = 1 / (xi_1 |theta'(xi_1)|), and the Poisson equation
fixes the amplitude A = xi_1^2 / (4 pi c_k y_c^(n-1)).

The ODE is integrated by classical fixed-step RK4 started off the regular
singular point with the series theta = 1 - xi^2/6 + n xi^4/120. Nothing
here touches the discrete Poisson solver, so the profiles are an
independent check on the fixed-point iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vpsteady.ansatz import PolytropeParams
from vpsteady.errors import InvalidArgumentError, NoZeroFoundError
from vpsteady.radial_core import FOUR_PI, RadialDensity, RadialGrid

DEFAULT_STEP = 1e-5
XI_MAX = 100.0
ZERO_XTOL = 1e-12
# oracle density below this fraction of its centre is excluded from relative errors
EDGE_FRACTION = 1e-3


@dataclass(frozen=True, eq=False)
class LaneEmdenTrajectory:
    """RK4 samples of (theta, theta') on [xi_start, xi1] plus the launch data."""

    n_poly: float
    xi: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    xi1: float
    theta_prime_at_xi1: float

    def theta_at(self, x) -> np.ndarray:
        """Cubic Hermite dense output of theta; series below the launch point."""
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        n = self.n_poly
        low = x <= self.xi[0]
        out[low] = 1.0 - x[low] ** 2 / 6.0 + n * x[low] ** 4 / 120.0
        hi = ~low
        xs = np.minimum(x[hi], self.xi1)
        j = np.clip(np.searchsorted(self.xi, xs) - 1, 0, len(self.xi) - 2)
        a, b = self.xi[j], self.xi[j + 1]
        out[hi] = _hermite(xs, a, b, self.theta[j], self.theta[j + 1], self.dtheta[j], self.dtheta[j + 1])
        return out


def _hermite(x, a, b, fa, fb, da, db):
    h = b - a
    t = (x - a) / h
    t2 = t * t
    t3 = t2 * t
    return (
        (2 * t3 - 3 * t2 + 1) * fa
        + (t3 - 2 * t2 + t) * h * da
        + (-2 * t3 + 3 * t2) * fb
        + (t3 - t2) * h * db
    )


def _integrate(n_poly: float, step: float) -> LaneEmdenTrajectory:
    clamp = n_poly != int(n_poly)
    n = n_poly

    def accel(xi, th, dth):
        if clamp and th < 0.0:
            return -2.0 * dth / xi
        return -2.0 * dth / xi - th**n

    xi = 10.0 * step
    th = 1.0 - xi * xi / 6.0 + n * xi**4 / 120.0
    dth = -xi / 3.0 + n * xi**3 / 30.0
    xs, ths, dths = [xi], [th], [dth]
    h = step
    half = 0.5 * h
    while th > 0.0:
        if xi > XI_MAX:
            raise NoZeroFoundError(f"theta has no zero below xi={XI_MAX} for n={n_poly}")
        k1t = dth
        k1d = accel(xi, th, dth)
        k2t = dth + half * k1d
        k2d = accel(xi + half, th + half * k1t, k2t)
        k3t = dth + half * k2d
        k3d = accel(xi + half, th + half * k2t, k3t)
        k4t = dth + h * k3d
        k4d = accel(xi + h, th + h * k3t, k4t)
        th = th + h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        dth = dth + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        # accumulate xi from the start index to avoid drift
        xi = xs[0] + len(xs) * h
        xs.append(xi)
        ths.append(th)
        dths.append(dth)

    a, b = xs[-2], xs[-1]
    fa, fb, da, db = ths[-2], ths[-1], dths[-2], dths[-1]
    lo, hi = a, b
    while hi - lo > ZERO_XTOL:
        mid = 0.5 * (lo + hi)
        if _hermite(mid, a, b, fa, fb, da, db) > 0.0:
            lo = mid
        else:
            hi = mid
    xi1 = 0.5 * (lo + hi)

    # theta' interpolated with its own Hermite data (theta'' from the ODE)
    dda = -2.0 * da / a - fa**n
    ddb = -2.0 * db / b - (max(fb, 0.0) if clamp else fb) ** n
    slope = _hermite(xi1, a, b, da, db, dda, ddb)

    return LaneEmdenTrajectory(
        n_poly=n_poly,
        xi=np.array(xs),
        theta=np.array(ths),
        dtheta=np.array(dths),
        xi1=xi1,
        theta_prime_at_xi1=float(slope),
    )


def lane_emden_shoot(n_poly: float, step: float = DEFAULT_STEP) -> tuple[float, float]:
    """First zero xi_1 of the Lane-Emden solution of index n and theta'(xi_1)."""
    traj = _shoot(n_poly, step)
    return traj.xi1, traj.theta_prime_at_xi1


def _shoot(n_poly: float, step: float) -> LaneEmdenTrajectory:
    if not 0.0 <= n_poly < 5.0:
        raise InvalidArgumentError(f"Lane-Emden index must lie in [0, 5), got {n_poly}")
    if not step > 0.0:
        raise InvalidArgumentError(f"step must be positive, got {step}")
    return _integrate(float(n_poly), float(step))


@dataclass(frozen=True, eq=False)
class OracleSolution:
    grid: RadialGrid
    n_poly: float
    xi1: float
    theta_prime_at_xi1: float
    y_center: float
    amplitude: float
    density_profile: np.ndarray
    potential_profile: np.ndarray

    def density(self) -> RadialDensity:
        return RadialDensity(self.grid, self.density_profile)


def oracle_steady_state(k: float, grid: RadialGrid, step: float = DEFAULT_STEP) -> OracleSolution:
    params = PolytropeParams(k, strict=False)
    n = params.n_poly
    traj = _shoot(n, step)
    xi1 = traj.xi1
    y_c = 1.0 / (xi1 * abs(traj.theta_prime_at_xi1))
    amp = xi1**2 / (FOUR_PI * params.c_k * y_c ** (n - 1.0))

    theta = np.clip(traj.theta_at(xi1 * grid.nodes), 0.0, 1.0)
    theta[-1] = 0.0
    # Hermite rounding can leave ulp-level bumps
    theta = np.minimum.accumulate(theta)
    y = y_c * theta
    rho = amp * params.c_k * y**n
    u = -1.0 - y
    for arr in (rho, u):
        arr.setflags(write=False)
    return OracleSolution(
        grid=grid,
        n_poly=n,
        xi1=xi1,
        theta_prime_at_xi1=traj.theta_prime_at_xi1,
        y_center=y_c,
        amplitude=amp,
        density_profile=rho,
        potential_profile=u,
    )


def compare(fixed_point: RadialDensity, oracle: OracleSolution) -> tuple[float, float]:
    """Sup relative error away from the support edge, and the L^2(B) error."""
    if not fixed_point.grid.same_as(oracle.grid):
        raise InvalidArgumentError("fixed point and oracle live on different grids")
    ref = oracle.density_profile
    got = fixed_point.values
    mask = ref > EDGE_FRACTION * ref[0]
    sup_rel = float(np.max(np.abs(got[mask] - ref[mask]) / ref[mask]))
    g = fixed_point.grid
    l2 = math.sqrt(float(FOUR_PI * np.sum(g.weights * g.nodes**2 * (got - ref) ** 2)))
    return sup_rel, l2
