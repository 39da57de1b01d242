"""Polytropic ansatz f = (-1 - E)_+^k and the mass-preserving map T.

For a potential U the ansatz induces the spatial density
``c_k * (-1 - U)_+^(k + 3/2)``; T rescales it back to unit mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from vpsteady.errors import DegenerateDensityError, ExponentOutOfRangeError, InvalidArgumentError
from vpsteady.gravity import R0_MAX, RadialPotential, center_delta, potential
from vpsteady.radial_core import FOUR_PI, RadialDensity, lp_norm, project_to_D

K_STRICT_MAX = 0.5
K_EXTENDED_MAX = 1.5


def compute_ck(k: float) -> float:
    """c_k = 4 pi sqrt(2) * int_0^1 eta^k sqrt(1 - eta) d eta = 4 pi sqrt(2) B(k+1, 3/2)."""
    if not k > -1.0:
        raise InvalidArgumentError(f"c_k diverges for k <= -1, got k={k}")
    log_beta = gammaln(k + 1.0) + gammaln(1.5) - gammaln(k + 2.5)
    return float(FOUR_PI * np.sqrt(2.0) * np.exp(log_beta))


@dataclass(frozen=True)
class PolytropeParams:
    """Exponent k of the ansatz and derived constants.

    With ``strict`` (the default) k must lie in (-1, 1/2), where a fixed
    point is guaranteed; otherwise (-1, 3/2) is accepted.
    """

    k: float
    strict: bool = True
    n_poly: float = field(init=False)
    c_k: float = field(init=False)

    def __post_init__(self):
        k = float(self.k)
        upper = K_STRICT_MAX if self.strict else K_EXTENDED_MAX
        if not -1.0 < k < upper:
            raise InvalidArgumentError(f"k={k} outside the allowed window (-1, {upper})")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n_poly", k + 1.5)
        object.__setattr__(self, "c_k", compute_ck(k))

    @property
    def p_upper(self) -> float:
        """Supremum of Lebesgue exponents for which T(D) is bounded in L^p."""
        return 3.0 / self.n_poly


@dataclass(frozen=True)
class AmplitudeBounds:
    c1: float
    c2: float
    observed: float

    def contains(self, rtol: float = 0.0) -> bool:
        return self.c1 * (1.0 - rtol) <= self.observed <= self.c2 * (1.0 + rtol)


def amplitude_limits(params: PolytropeParams, r0: float = R0_MAX) -> tuple[float, float]:
    """Uniform lower and upper bounds (C1, C2) on A over the admissible set."""
    n = params.n_poly
    c1 = 1.0 / (params.c_k * FOUR_PI / (1.5 - params.k))
    c2 = 1.0 / (params.c_k * (FOUR_PI / 3.0) * r0**3 * center_delta() ** n)
    return c1, c2


def report_exponent(k: float) -> float | None:
    """Exponent used for reported L^p norms: min(2, 0.99 * 3/(k + 3/2)).

    Falls back to the midpoint of (3/2, 3/(k + 3/2)) when the 0.99 rule leaves
    the window, and returns None when the window is empty (k >= 1/2).
    """
    upper = 3.0 / (k + 1.5)
    if upper <= 1.5:
        return None
    p = min(2.0, 0.99 * upper)
    if p <= 1.5:
        p = 0.5 * (1.5 + upper)
    return p


def ansatz_density(U: RadialPotential, params: PolytropeParams) -> RadialDensity:
    """Unnormalised density c_k * max(0, -1 - U)^(k + 3/2) on U's grid."""
    y = np.maximum(-1.0 - U.values, 0.0)
    return RadialDensity(U.grid, params.c_k * y**params.n_poly)


def amplitude(rho_tilde: RadialDensity) -> float:
    if not rho_tilde.mass > 0.0:
        raise DegenerateDensityError("ansatz density has zero mass")
    return 1.0 / rho_tilde.mass


@dataclass(frozen=True, eq=False)
class MapEvaluation:
    """All intermediate quantities of one application of T."""

    potential: RadialPotential
    rho_tilde: RadialDensity
    bounds: AmplitudeBounds
    image: RadialDensity


def evaluate_T(rho: RadialDensity, params: PolytropeParams) -> MapEvaluation:
    U = potential(rho)
    rho_tilde = ansatz_density(U, params)
    a = amplitude(rho_tilde)
    c1, c2 = amplitude_limits(params)
    image = project_to_D(a * rho_tilde.values, rho.grid)
    return MapEvaluation(U, rho_tilde, AmplitudeBounds(c1, c2, a), image)


def apply_T(rho: RadialDensity, params: PolytropeParams) -> tuple[RadialDensity, AmplitudeBounds]:
    ev = evaluate_T(rho, params)
    return ev.image, ev.bounds


def range_bound(params: PolytropeParams, p: float) -> float:
    """Explicit L^p bound on T(D): C2 * c_k * (4 pi / (3 - p (k + 3/2)))^(1/p).

    Uses rho_tilde <= c_k r^-(k+3/2), which follows from U >= -1/r.
    """
    if not 1.5 < p < params.p_upper:
        raise ExponentOutOfRangeError(
            f"p={p} outside the admissible window (3/2, {params.p_upper:.6g})"
        )
    _, c2 = amplitude_limits(params)
    return c2 * params.c_k * (FOUR_PI / (3.0 - p * params.n_poly)) ** (1.0 / p)


def check_range_bound(rho_out: RadialDensity, params: PolytropeParams, p: float) -> bool:
    bound = range_bound(params, p)
    return lp_norm(rho_out, p).value <= bound
