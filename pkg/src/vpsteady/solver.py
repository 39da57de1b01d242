"""Damped Picard iteration for fixed points of the mass-preserving map T.

Each step forms rho <- P((1 - w) rho + w T(rho)) where P is the projection
onto unit-mass decreasing densities. Every iterate is checked against the
centre bound, U >= -1/r, the amplitude window [C1, C2] and the L^p range
bound; failures are logged, not raised.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from vpsteady.ansatz import (
    MapEvaluation,
    PolytropeParams,
    amplitude_limits,
    check_range_bound,
    evaluate_T,
    report_exponent,
)
from vpsteady.errors import DegenerateDensityError, InvalidArgumentError, IterationCollapsedError
from vpsteady.gravity import (
    R0_MAX,
    RadialPotential,
    center_bound,
    check_monotone_and_boundary,
    check_pointwise_lower_bound,
)
from vpsteady.radial_core import (
    RadialDensity,
    RadialGrid,
    lp_distance,
    make_uniform_grid,
    project_to_D,
)

log = logging.getLogger(__name__)

MASS_ATOL = 1e-12
DAMPING_FLOOR = 1.0 / 64.0

CHECK_NAMES = ("mass", "monotone_boundary", "lower_bound", "lemma41", "amplitude", "range_bound")


@dataclass(frozen=True)
class SolverConfig:
    k: float
    grid_n: int = 1000
    tol: float = 1e-9
    max_iter: int = 5000
    damping: float = 0.5
    adaptive_damping: bool = False
    report_p: float | None = None
    allow_extended_k: bool = False

    def __post_init__(self):
        if not self.tol > 0.0:
            raise InvalidArgumentError(f"tol must be positive, got {self.tol}")
        if not 0.0 < self.damping <= 1.0:
            raise InvalidArgumentError(f"damping must lie in (0, 1], got {self.damping}")
        if self.max_iter < 0:
            raise InvalidArgumentError(f"max_iter must be >= 0, got {self.max_iter}")
        if self.grid_n < 2:
            raise InvalidArgumentError(f"grid_n must be >= 2, got {self.grid_n}")
        if self.report_p is None:
            p = report_exponent(self.k)
            object.__setattr__(self, "report_p", 2.0 if p is None else p)
        elif not self.report_p >= 1.0:
            raise InvalidArgumentError(f"report_p must be >= 1, got {self.report_p}")

    def params(self) -> PolytropeParams:
        return PolytropeParams(self.k, strict=not self.allow_extended_k)

    def range_check_enabled(self) -> bool:
        """The L^p range bound applies only for p inside (3/2, 3/(k+3/2))."""
        return 1.5 < self.report_p < 3.0 / (self.k + 1.5)


@dataclass(eq=False)
class IterationReport:
    config: SolverConfig
    iterations: int
    residual_history: list[float]
    lp_residual_history: list[float]
    amplitude_history: list[float]
    mass_history: list[float]
    damping_history: list[float]
    bound_violations: list[tuple[int, str]]
    converged: bool
    final_density: RadialDensity
    final_potential: RadialPotential
    c1: float
    c2: float
    checks: dict[str, bool | None] = field(default_factory=dict)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]

    @property
    def final_amplitude(self) -> float:
        return self.amplitude_history[-1]


def initial_guess(grid: RadialGrid) -> RadialDensity:
    """Uniform density 3/(4 pi), renormalised to unit discrete mass."""
    return project_to_D(np.full(grid.n + 1, 3.0 / (4.0 * np.pi)), grid)


def _evaluate(rho: RadialDensity, params: PolytropeParams) -> MapEvaluation:
    try:
        return evaluate_T(rho, params)
    except DegenerateDensityError as exc:
        raise IterationCollapsedError(str(exc)) from exc


def _sup(ev: MapEvaluation, rho: RadialDensity) -> float:
    return float(np.max(np.abs(ev.image.values - rho.values)))


def residual(rho: RadialDensity, params: PolytropeParams) -> float:
    """Fixed-point defect max_i |T(rho)_i - rho_i|."""
    return _sup(_evaluate(rho, params), rho)


def _diagnose(rho: RadialDensity, ev: MapEvaluation, params: PolytropeParams, config: SolverConfig):
    h2 = rho.grid.h**2
    U = ev.potential
    result = {
        "mass": abs(rho.mass - 1.0) <= MASS_ATOL,
        "monotone_boundary": check_monotone_and_boundary(U, expect_unit_mass=True),
        "lower_bound": check_pointwise_lower_bound(U),
        "lemma41": center_bound(U, R0_MAX).satisfied,
        "amplitude": ev.bounds.contains(rtol=10.0 * h2),
        "range_bound": None,
    }
    if config.range_check_enabled():
        result["range_bound"] = check_range_bound(ev.image, params, config.report_p)
    return result


def solve(config: SolverConfig) -> IterationReport:
    params = config.params()
    grid = make_uniform_grid(config.grid_n)
    c1, c2 = amplitude_limits(params)

    residuals: list[float] = []
    lp_residuals: list[float] = []
    amplitudes: list[float] = []
    masses: list[float] = []
    dampings: list[float] = []
    violations: list[tuple[int, str]] = []
    summary: dict[str, bool | None] = {name: True for name in CHECK_NAMES}
    if not config.range_check_enabled():
        summary["range_bound"] = None

    def record(it, rho, ev, res, omega):
        residuals.append(res)
        lp_residuals.append(lp_distance(ev.image, rho, config.report_p))
        amplitudes.append(ev.bounds.observed)
        masses.append(rho.mass)
        dampings.append(omega)
        for name, ok in _diagnose(rho, ev, params, config).items():
            if ok is False:
                violations.append((it, name))
                summary[name] = False

    rho = initial_guess(grid)
    ev = _evaluate(rho, params)
    res = _sup(ev, rho)
    omega = config.damping
    record(0, rho, ev, res, omega)

    accepted = 0
    attempts = 0
    while res > config.tol and attempts < config.max_iter:
        attempts += 1
        mixed = (1.0 - omega) * rho.values + omega * ev.image.values
        try:
            cand = project_to_D(mixed, grid)
        except DegenerateDensityError as exc:
            raise IterationCollapsedError(str(exc)) from exc
        cand_ev = _evaluate(cand, params)
        cand_res = _sup(cand_ev, cand)
        if config.adaptive_damping and cand_res > res and omega > DAMPING_FLOOR:
            omega = max(0.5 * omega, DAMPING_FLOOR)
            log.debug("step %d rejected, damping -> %g", attempts, omega)
            continue
        rho, ev, res = cand, cand_ev, cand_res
        accepted += 1
        record(accepted, rho, ev, res, omega)
        if config.adaptive_damping:
            omega = min(config.damping, 2.0 * omega)

    converged = res <= config.tol
    log.info(
        "k=%g n=%d: %s after %d steps, residual %.3e",
        config.k, config.grid_n, "converged" if converged else "not converged", accepted, res,
    )
    return IterationReport(
        config=config,
        iterations=accepted,
        residual_history=residuals,
        lp_residual_history=lp_residuals,
        amplitude_history=amplitudes,
        mass_history=masses,
        damping_history=dampings,
        bound_violations=violations,
        converged=converged,
        final_density=rho,
        final_potential=ev.potential,
        c1=c1,
        c2=c2,
        checks=summary,
    )
