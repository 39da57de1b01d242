"""Seeded random members of the admissible set, for property checks."""

from __future__ import annotations

import numpy as np

from vpsteady.radial_core import RadialDensity, RadialGrid, project_to_D

KINDS = ("step", "power", "uniform")


def _step(r: np.ndarray, rng: np.random.Generator, h: float) -> np.ndarray:
    m = int(rng.integers(1, 6))
    edges = np.sort(rng.uniform(5 * h, 1.0, size=m))
    levels = np.cumsum(rng.exponential(1.0, size=m + 1))[::-1]
    if rng.random() < 0.5:
        levels[-1] = 0.0
    return levels[np.searchsorted(edges, r, side="right")]


def _power(r: np.ndarray, rng: np.random.Generator, h: float) -> np.ndarray:
    a = rng.uniform(0.0, 3.0)
    core = rng.uniform(h, 0.3)
    vals = np.maximum(r, core) ** (-a)
    if rng.random() < 0.5:
        vals[r > rng.uniform(0.2, 1.0)] = 0.0
    return vals


def _uniform(r: np.ndarray, rng: np.random.Generator, h: float) -> np.ndarray:
    radius = rng.uniform(max(0.05, 5 * h), 1.0) if rng.random() < 0.7 else 1.0
    return np.where(r <= radius, 1.0, 0.0)


_MAKERS = {"step": _step, "power": _power, "uniform": _uniform}


def random_density(grid: RadialGrid, rng: np.random.Generator, kind: str | None = None) -> RadialDensity:
    """A unit-mass decreasing density: step function, cored power law or uniform ball."""
    if kind is None:
        kind = KINDS[int(rng.integers(len(KINDS)))]
    raw = _MAKERS[kind](grid.nodes, rng, grid.h)
    return project_to_D(raw, grid)


def random_densities(grid: RadialGrid, count: int, seed: int) -> list[RadialDensity]:
    rng = np.random.default_rng(seed)
    return [random_density(grid, rng) for _ in range(count)]
