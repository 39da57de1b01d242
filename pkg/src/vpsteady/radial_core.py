"""Radial grid, trapezoid quadrature, norms and projection onto the
admissible set of unit-mass, non-negative, radially decreasing densities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vpsteady.errors import DegenerateDensityError, ExponentOutOfRangeError, InvalidArgumentError

FOUR_PI = 4.0 * np.pi

# relative slack allowed when validating monotonicity of stored samples
MONOTONE_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform nodes on [0, 1] with composite trapezoid weights."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def same_as(self, other: "RadialGrid") -> bool:
        return self is other or (self.n == other.n and np.array_equal(self.nodes, other.nodes))


def make_uniform_grid(n: int) -> RadialGrid:
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"grid needs at least 2 cells, got n={n}")
    n = int(n)
    nodes = np.arange(n + 1, dtype=float) / n
    nodes[-1] = 1.0
    weights = np.full(n + 1, 1.0 / n)
    weights[0] = weights[-1] = 0.5 / n
    return RadialGrid(n=n, nodes=_frozen(nodes), weights=_frozen(weights))


def _shell_weights(grid: RadialGrid) -> np.ndarray:
    # quadrature weights for 4*pi*int r^2 g(r) dr
    return FOUR_PI * grid.nodes**2 * grid.weights


@dataclass(frozen=True, eq=False)
class RadialDensity:
    """Node samples of a non-negative, radially non-increasing density.

    The total mass is computed once at construction and cached.
    """

    grid: RadialGrid
    values: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.grid.nodes.shape:
            raise InvalidArgumentError(
                f"expected {self.grid.n + 1} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("density samples must be finite")
        if np.any(values < 0.0):
            raise InvalidArgumentError("density samples must be non-negative")
        slack = MONOTONE_RTOL * max(float(values.max()), 1.0)
        if np.any(np.diff(values) > slack):
            raise InvalidArgumentError("density samples must be non-increasing in r")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mass", float(_shell_weights(self.grid) @ values))

    @property
    def central(self) -> float:
        return float(self.values[0])


@dataclass(frozen=True)
class LpNorm:
    p: float
    value: float


def mass(rho: RadialDensity) -> float:
    """Total mass 4*pi*int_0^1 r^2 rho(r) dr by trapezoid quadrature."""
    return rho.mass


def lp_norm(rho: RadialDensity, p: float) -> LpNorm:
    if not p > 1.5:
        raise ExponentOutOfRangeError(f"Lp norm needs p > 3/2, got p={p}")
    integral = float(_shell_weights(rho.grid) @ rho.values**p)
    return LpNorm(p=float(p), value=integral ** (1.0 / p))


def lp_distance(a: RadialDensity, b: RadialDensity, p: float) -> float:
    """(4 pi int_0^1 r^2 |a - b|^p dr)^(1/p) for two densities on one grid."""
    if not p >= 1.0:
        raise ExponentOutOfRangeError(f"p must be >= 1, got {p}")
    diff = np.abs(a.values - b.values)
    return float(_shell_weights(a.grid) @ diff**p) ** (1.0 / p)


def pava_nonincreasing(y, w) -> np.ndarray:
    """Weighted least-squares antitonic regression by pool-adjacent-violators.

    Minimises sum w_i (x_i - y_i)^2 subject to x_0 >= x_1 >= ... >= x_n.
    Zero-weight points are free in the objective; they take the mean of the
    block they are pooled into, which is the limit of a vanishing positive
    weight. The weighted sum sum w_i x_i equals sum w_i y_i.
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.all(np.diff(y) <= 0.0):
        return y.copy()

    # each block: [start, stop, weight, weighted sum, mean]
    blocks: list[list] = []
    for i, (yi, wi) in enumerate(zip(y.tolist(), w.tolist())):
        blocks.append([i, i + 1, wi, wi * yi, yi])
        while len(blocks) > 1 and blocks[-2][4] < blocks[-1][4]:
            _, stop, wt, ws, mean = blocks.pop()
            prev = blocks[-1]
            prev[1] = stop
            if prev[2] == 0.0 and wt == 0.0:
                prev[4] = 0.5 * (prev[4] + mean)
            elif prev[2] == 0.0:
                prev[4] = mean
            elif wt > 0.0:
                prev[4] = (prev[3] + ws) / (prev[2] + wt)
            prev[2] += wt
            prev[3] += ws

    out = np.empty_like(y)
    for start, stop, _, _, mean in blocks:
        out[start:stop] = mean
    return out


def project_to_D(values, grid: RadialGrid) -> RadialDensity:
    """Map raw samples to a unit-mass, non-negative, non-increasing density.

    Negative samples are clamped to zero, monotonicity is restored by
    antitonic regression weighted with r^2 times the quadrature weight (which
    leaves the discrete mass unchanged), and the result is rescaled to mass 1.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != grid.nodes.shape:
        raise InvalidArgumentError(f"expected {grid.n + 1} samples, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError("values must be finite")
    v = np.maximum(v, 0.0)
    shell = _shell_weights(grid)
    v = pava_nonincreasing(v, shell)
    m = float(shell @ v)
    if not m > 0.0:
        raise DegenerateDensityError("density has zero mass after clamping")
    return RadialDensity(grid, v / m)
