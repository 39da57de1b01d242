"""Command-line front end: ``solve``, ``verify``, ``oracle`` and ``sweep``.

Exit codes: 0 success, 1 usage or configuration error, 2 a run that did not
reach its goal (no convergence, failed checks, oracle disagreement).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import tomli

from vpsteady import __version__
from vpsteady.ansatz import PolytropeParams, check_range_bound, evaluate_T
from vpsteady.errors import IterationCollapsedError
from vpsteady.gravity import (
    R0_MAX,
    center_bound,
    check_monotone_and_boundary,
    check_pointwise_lower_bound,
    derivative_bound_ok,
)
from vpsteady.io import atomic_write_text, dumps_json, read_profile, rows_to_csv, write_json, write_profile
from vpsteady.oracle import DEFAULT_STEP, compare, oracle_steady_state
from vpsteady.radial_core import RadialDensity, make_uniform_grid
from vpsteady.samples import random_densities
from vpsteady.solver import MASS_ATOL, IterationReport, SolverConfig, solve

log = logging.getLogger("vpsteady")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_REACHED = 2

SOLVER_DEFAULTS = {
    "k": None,
    "n": 1000,
    "tol": 1e-9,
    "max_iter": 5000,
    "damping": 0.5,
    "adaptive_damping": False,
    "report_p": None,
    "allow_extended_k": False,
}

SWEEP_COLUMNS = (
    "k",
    "converged",
    "iterations",
    "final_residual",
    "amplitude",
    "central_density",
    "oracle_sup_rel_error",
    "c1",
    "c2",
    "amplitude_min",
    "amplitude_max",
    "violations",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunManifest:
    command: str
    config: dict
    artifact_paths: list[str] = field(default_factory=list)
    tool_version: str = __version__
    wall_time_ms: int = 0


def _add_solver_flags(p: argparse.ArgumentParser):
    # defaults stay None so that config-file values can be told apart from flags
    p.add_argument("--k", type=float, default=None, help="ansatz exponent k")
    p.add_argument("--n", type=int, default=None, help="number of grid cells")
    p.add_argument("--tol", type=float, default=None, help="sup-norm residual target")
    p.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    p.add_argument("--damping", type=float, default=None, help="Picard damping in (0, 1]")
    p.add_argument("--adaptive-damping", action="store_const", const=True, default=None,
                   dest="adaptive_damping")
    p.add_argument("--report-p", type=float, default=None, dest="report_p")
    p.add_argument("--allow-extended-k", action="store_const", const=True, default=None,
                   dest="allow_extended_k", help="accept 1/2 <= k < 3/2")
    p.add_argument("--config", default=None, help="TOML file with default settings")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vpsteady", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="iterate T to a fixed point")
    _add_solver_flags(p)
    p.add_argument("--out", default=None, help="profile CSV path")
    p.add_argument("--report", default=None, help="JSON report path (stdout if omitted)")
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("verify", help="check the potential and amplitude bounds on random densities")
    _add_solver_flags(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("oracle", help="Lane-Emden reference profile and comparison")
    _add_solver_flags(p)
    p.add_argument("--step", type=float, default=DEFAULT_STEP, help="RK4 step in xi")
    p.add_argument("--out", default=None, help="oracle profile CSV path")
    p.add_argument("--compare", default=None, help="profile CSV written by solve")
    p.add_argument("--rtol", type=float, default=5e-4)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("sweep", help="solve over a grid of k values")
    _add_solver_flags(p)
    p.add_argument("--k-min", type=float, required=True, dest="k_min")
    p.add_argument("--k-max", type=float, required=True, dest="k_max")
    p.add_argument("--k-step", type=float, required=True, dest="k_step")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--oracle-step", type=float, default=1e-4, dest="oracle_step")
    p.add_argument("--out", default=None, help="summary CSV path (stdout if omitted)")
    p.add_argument("--manifest", default=None)
    return parser


def effective_settings(args) -> dict:
    """Defaults, then the config file, then explicitly given flags."""
    settings = dict(SOLVER_DEFAULTS)
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                from_file = tomli.load(fh)
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        for key, value in from_file.items():
            key = key.replace("-", "_")
            if key == "grid_n":
                key = "n"
            if key not in settings:
                raise UsageError(f"unknown config key {key!r}")
            settings[key] = value
    for key in SOLVER_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _solver_config(settings: dict, k=None) -> SolverConfig:
    k = settings["k"] if k is None else k
    if k is None:
        raise UsageError("--k is required")
    cfg = SolverConfig(
        k=float(k),
        grid_n=int(settings["n"]),
        tol=float(settings["tol"]),
        max_iter=int(settings["max_iter"]),
        damping=float(settings["damping"]),
        adaptive_damping=bool(settings["adaptive_damping"]),
        report_p=None if settings["report_p"] is None else float(settings["report_p"]),
        allow_extended_k=bool(settings["allow_extended_k"]),
    )
    cfg.params()  # validates the k window
    return cfg


def config_echo(cfg: SolverConfig) -> dict:
    return asdict(cfg)


def report_to_dict(report: IterationReport, wall_time_ms: int) -> dict:
    cfg = report.config
    rho = report.final_density
    return {
        "k": cfg.k,
        "n": cfg.grid_n,
        "tol": cfg.tol,
        "damping": cfg.damping,
        "iterations": report.iterations,
        "converged": report.converged,
        "residual_history": report.residual_history,
        "amplitude_history": report.amplitude_history,
        "bounds": {"c1": report.c1, "c2": report.c2},
        "checks": {
            "lemma41": report.checks["lemma41"],
            "lower_bound": report.checks["lower_bound"],
            "range_bound": report.checks["range_bound"],
            "mass": report.checks["mass"],
            "monotone_boundary": report.checks["monotone_boundary"],
            "amplitude": report.checks["amplitude"],
        },
        "mass": rho.mass,
        "central_density": rho.central,
        "report_p": cfg.report_p,
        "lp_residual_history": report.lp_residual_history,
        "mass_history": report.mass_history,
        "damping_history": report.damping_history,
        "bound_violations": [[it, name] for it, name in report.bound_violations],
        "config": config_echo(cfg),
        "wall_time_ms": wall_time_ms,
        "version": __version__,
    }


def _finish_manifest(args, manifest: RunManifest, t0: float):
    manifest.wall_time_ms = int(round((time.perf_counter() - t0) * 1000))
    if args.manifest:
        write_json(args.manifest, asdict(manifest))


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    cfg = _solver_config(effective_settings(args))
    try:
        report = solve(cfg)
    except IterationCollapsedError as exc:
        print(f"iteration collapsed: {exc}", file=sys.stderr)
        return EXIT_NOT_REACHED
    wall = int(round((time.perf_counter() - t0) * 1000))
    manifest = RunManifest("solve", config_echo(cfg))
    rho = report.final_density
    if args.out:
        write_profile(args.out, rho.grid.nodes, rho.values, report.final_potential.values)
        manifest.artifact_paths.append(str(args.out))
    payload = report_to_dict(report, wall)
    if args.report:
        write_json(args.report, payload)
        manifest.artifact_paths.append(str(args.report))
    else:
        sys.stdout.write(dumps_json(payload))
    print(
        f"k={cfg.k:g} n={cfg.grid_n}: {'converged' if report.converged else 'NOT converged'} "
        f"after {report.iterations} iterations, residual {report.final_residual:.3e}",
        file=sys.stderr,
    )
    _finish_manifest(args, manifest, t0)
    return EXIT_OK if report.converged else EXIT_NOT_REACHED


VERIFY_CHECKS = (
    "in_D",
    "monotone_boundary",
    "derivative_bound",
    "lower_bound",
    "lemma41",
    "amplitude",
    "range_bound",
)


def verify_densities(densities: list[RadialDensity], params: PolytropeParams, p: float | None) -> dict:
    """Count violations of each bound over the given members of D."""
    counts = {name: 0 for name in VERIFY_CHECKS}
    if p is None:
        counts["range_bound"] = None
    for rho in densities:
        ev = evaluate_T(rho, params)
        U = ev.potential
        h2 = rho.grid.h**2
        img = ev.image.values
        ok = {
            "in_D": abs(ev.image.mass - 1.0) <= MASS_ATOL and img.min() >= 0.0
            and bool(np.all(np.diff(img) <= 0.0)),
            "monotone_boundary": check_monotone_and_boundary(U, expect_unit_mass=True),
            "derivative_bound": derivative_bound_ok(U),
            "lower_bound": check_pointwise_lower_bound(U),
            "lemma41": center_bound(U, R0_MAX).satisfied,
            "amplitude": ev.bounds.contains(rtol=10.0 * h2),
        }
        if p is not None:
            ok["range_bound"] = check_range_bound(ev.image, params, p)
        for name, passed in ok.items():
            if not passed:
                counts[name] += 1
    return counts


def format_verify_table(counts: dict, samples: int) -> str:
    lines = [f"{'check':<20}{'samples':>8}{'violations':>12}  result"]
    for name, bad in counts.items():
        if bad is None:
            lines.append(f"{name:<20}{samples:>8}{'-':>12}  n/a")
        else:
            lines.append(f"{name:<20}{samples:>8}{bad:>12}  {'PASS' if bad == 0 else 'FAIL'}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    settings = effective_settings(args)
    if settings["k"] is None:
        settings["k"] = 0.0
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    cfg = _solver_config(settings)
    params = cfg.params()
    grid = make_uniform_grid(cfg.grid_n)
    p = cfg.report_p if cfg.range_check_enabled() else None
    densities = random_densities(grid, args.samples, args.seed)
    counts = verify_densities(densities, params, p)
    print(f"k={cfg.k:g} n={cfg.grid_n} seed={args.seed} p={'-' if p is None else format(p, 'g')}")
    print(format_verify_table(counts, args.samples))
    _finish_manifest(args, RunManifest("verify", config_echo(cfg)), t0)
    failed = any(bad for bad in counts.values() if bad is not None)
    return EXIT_NOT_REACHED if failed else EXIT_OK


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    settings = effective_settings(args)
    if settings["k"] is None:
        raise UsageError("--k is required")
    k = float(settings["k"])
    manifest = RunManifest("oracle", {"k": k, "n": settings["n"], "step": args.step})

    profile = None
    n = int(settings["n"])
    if args.compare:
        try:
            profile = read_profile(args.compare)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read profile: {exc}") from exc
        n_file = len(profile[0]) - 1
        if args.n is not None and args.n != n_file:
            raise UsageError(f"grid mismatch: --n {args.n} but {args.compare} has {n_file} cells")
        n = n_file
    grid = make_uniform_grid(n)
    sol = oracle_steady_state(k, grid, step=args.step)
    print(
        f"n_poly={sol.n_poly:.17g} xi1={sol.xi1:.17g} theta'(xi1)={sol.theta_prime_at_xi1:.17g} "
        f"y_center={sol.y_center:.17g} amplitude={sol.amplitude:.17g}"
    )
    if args.out:
        write_profile(args.out, grid.nodes, sol.density_profile, sol.potential_profile)
        manifest.artifact_paths.append(str(args.out))

    code = EXIT_OK
    if profile is not None:
        r, rho, _ = profile
        if not np.array_equal(r, grid.nodes):
            raise UsageError(f"grid mismatch: {args.compare} is not a uniform grid on [0, 1]")
        try:
            fixed = RadialDensity(grid, rho)
        except ValueError as exc:
            raise UsageError(f"{args.compare}: {exc}") from exc
        sup_rel, l2 = compare(fixed, sol)
        print(f"sup_rel_error={sup_rel:.17g}")
        print(f"l2_error={l2:.17g}")
        code = EXIT_OK if sup_rel <= args.rtol else EXIT_NOT_REACHED
    _finish_manifest(args, manifest, t0)
    return code


def k_grid(k_min: float, k_max: float, k_step: float) -> list[float]:
    if not k_step > 0.0:
        raise UsageError("--k-step must be positive")
    if not k_min < k_max:
        raise UsageError("empty k range: need --k-min < --k-max")
    count = int(math.floor((k_max - k_min) / k_step + 1e-9)) + 1
    return [round(k_min + i * k_step, 12) for i in range(count)]


def sweep_one(cfg: SolverConfig, oracle_step: float) -> dict:
    row = {"k": cfg.k, "c1": None, "c2": None}
    try:
        report = solve(cfg)
    except IterationCollapsedError:
        row.update(converged=False, iterations=None, final_residual=math.nan, violations=None,
                   collapsed=True)
        return row
    sol = oracle_steady_state(cfg.k, report.final_density.grid, step=oracle_step)
    sup_rel, _ = compare(report.final_density, sol)
    row.update(
        converged=report.converged,
        iterations=report.iterations,
        final_residual=report.final_residual,
        amplitude=report.final_amplitude,
        central_density=report.final_density.central,
        oracle_sup_rel_error=sup_rel,
        c1=report.c1,
        c2=report.c2,
        amplitude_min=min(report.amplitude_history),
        amplitude_max=max(report.amplitude_history),
        violations=len(report.bound_violations),
        collapsed=False,
    )
    return row


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    settings = effective_settings(args)
    ks = k_grid(args.k_min, args.k_max, args.k_step)
    configs = [_solver_config(settings, k=k) for k in ks]
    workers = args.workers or os.cpu_count() or 1
    if workers < 1:
        raise UsageError("--workers must be positive")
    if workers == 1:
        rows = [sweep_one(cfg, args.oracle_step) for cfg in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_one, configs, [args.oracle_step] * len(configs)))

    text = rows_to_csv(SWEEP_COLUMNS, ([row.get(c) for c in SWEEP_COLUMNS] for row in rows))
    manifest = RunManifest("sweep", {**config_echo(configs[0]), "k_values": ks})
    if args.out:
        atomic_write_text(args.out, text)
        manifest.artifact_paths.append(str(args.out))
    else:
        sys.stdout.write(text)
    _finish_manifest(args, manifest, t0)
    return EXIT_NOT_REACHED if any(row["collapsed"] for row in rows) else EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "oracle": cmd_oracle, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # invalid arguments surfaced by the library (k window, grid size, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
