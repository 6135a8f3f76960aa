"""Command-line front end.

All tables are comma-separated with a header row; metadata lines start with '#'
and every float is written with 17 significant digits.
"""
from __future__ import annotations

import argparse
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .core import DomainMode, PotentialSpec, RunConfig, parse_config
from .errors import ConfigError, NoBoundState, NoConvergence, NoRoot, NotNormalizable
from .oracle import oracle_levels, self_consistent_level
from .spectrum import enumerate_levels, solve_level
from .wavefunction import excited_state_R, max_abs_difference, ode_residual

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_MISSING_LEVEL = 4
EXIT_VERIFY_FAILED = 5

EIGENVECTOR_TOL = 1e-4
SWEEP_PARAMS = ("v1", "v2", "alpha", "mass")

EPILOG = """exit codes:
  0  success
  2  configuration or usage error
  3  solver did not converge
  4  requested level is not bound
  5  verification failed for at least one level
"""

log = logging.getLogger("kgeckart")


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _row(*items) -> str:
    return ",".join(i if isinstance(i, str) else fmt(i) for i in items)


def _spec_lines(config: RunConfig, domain: DomainMode) -> list[str]:
    s = config.spec
    return [f"# {k} = {fmt(getattr(s, k))}" for k in ("v1", "v2", "alpha", "mass")] + [
        f"# domain_mode = {domain.value}"
    ]


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(EXIT_CONFIG, f"cannot read config: {exc}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise CommandError(EXIT_CONFIG, f"config error: {type(exc).__name__}: {exc}") from None


def _domain(args, config: RunConfig) -> DomainMode:
    return DomainMode(args.domain) if args.domain else config.grid.domain_mode


def _grid_overrides(config: RunConfig, pairs) -> RunConfig:
    grid = config.grid
    for item in pairs or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        try:
            if not sep:
                raise ValueError
            if key == "n_points":
                grid = replace(grid, n_points=int(value))
            elif key == "r_max_factor":
                grid = replace(grid, r_max_factor=float(value))
            elif key == "domain_mode":
                grid = replace(grid, domain_mode=DomainMode(value.strip().lower()))
            else:
                raise CommandError(EXIT_CONFIG, f"unknown grid key {key!r}")
        except ValueError:
            raise CommandError(EXIT_CONFIG, f"bad --grid override {item!r}") from None
    if not grid.r_max_factor > 0:
        raise CommandError(EXIT_CONFIG, "r_max_factor must be positive")
    return replace(config, grid=grid)


def _grid(config: RunConfig, domain: DomainMode):
    try:
        return config.grid.grid_for(config.spec, domain)
    except ConfigError as exc:
        raise CommandError(EXIT_CONFIG, f"grid error: {exc}") from None


def _levels(spec: PotentialSpec, config: RunConfig):
    failures: list = []
    levels = enumerate_levels(spec, config.solver, failures)
    if failures:
        n, exc = failures[0]
        raise CommandError(EXIT_CONVERGENCE, str(exc))
    return levels


# --- commands ---------------------------------------------------------------

def cmd_spectrum(args, out) -> int:
    config = load_config(args.config)
    levels = _levels(config.spec, config)
    print("# kgeckart spectrum", file=out)
    for line in _spec_lines(config, _domain(args, config)):
        print(line, file=out)
    print("n,E_n,lambda_n,delta_n,p,w,residual,iterations", file=out)
    for lv in levels:
        print(_row(lv.n, lv.energy, lv.lam, lv.delta, lv.p_param, lv.w_param, lv.residual, lv.iterations),
              file=out)
    print(f"# {len(levels)} bound states", file=out)
    return EXIT_OK


def cmd_wavefunction(args, out) -> int:
    config = _grid_overrides(load_config(args.config), args.grid)
    domain = _domain(args, config)
    grid = _grid(config, domain)
    try:
        level = solve_level(config.spec, args.level, config.solver)
        rf = excited_state_R(config.spec, level, grid)
    except (NoRoot, NotNormalizable) as exc:
        raise CommandError(EXIT_MISSING_LEVEL, f"level {args.level} is not bound: {exc}") from None
    except NoConvergence as exc:
        raise CommandError(EXIT_CONVERGENCE, str(exc)) from None

    meta = ["# kgeckart wavefunction", *_spec_lines(config, domain),
            f"# n_points = {grid.n_points}", f"# r_max = {fmt(grid.r_max)}",
            f"# level = {level.n}", f"# E_n = {fmt(level.energy)}", f"# lambda_n = {fmt(level.lam)}",
            f"# node_count = {rf.node_count}", f"# ode_residual = {fmt(ode_residual(config.spec, level, rf))}"]
    if args.no_oracle:
        meta.append("# oracle_comparison = skipped")
    elif domain is DomainMode.HALF:
        meta.append("# oracle_comparison = skipped (half-line samples are offset from the oracle grid)")
    else:
        try:
            report = self_consistent_level(config.spec, level.n, grid, config.solver)
        except (NoBoundState, NoConvergence) as exc:
            meta.append(f"# oracle_comparison = unavailable ({type(exc).__name__})")
        else:
            diff = max_abs_difference(rf, report.eigenvector)
            meta += [f"# oracle_max_abs_difference = {fmt(diff)}",
                     f"# oracle_tolerance = {fmt(EIGENVECTOR_TOL)}",
                     f"# oracle_match = {'pass' if diff < EIGENVECTOR_TOL else 'fail'}"]
    out.write("\n".join(meta) + "\n")
    out.write("r,amplitude\n")
    for r, v in zip(rf.r, rf.values):
        out.write(f"{fmt(r)},{fmt(v)}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    config = load_config(args.config)
    domain = _domain(args, config)
    grid = _grid(config, domain)
    levels = _levels(config.spec, config)
    try:
        reports = oracle_levels(config.spec, grid, config.solver)
    except NoConvergence as exc:
        raise CommandError(EXIT_CONVERGENCE, f"oracle: {exc}") from None

    print("# kgeckart verify", file=out)
    for line in _spec_lines(config, domain):
        print(line, file=out)
    print(f"# rtol = {fmt(args.rtol)}", file=out)
    print("n,E_analytic,E_oracle,rel_diff,status", file=out)
    analytic = {lv.n: lv.energy for lv in levels}
    oracle = {rep.level_index: rep.energy for rep in reports}
    failed = 0
    for n in range(max(len(analytic), len(oracle))):
        ea, eo = analytic.get(n), oracle.get(n)
        if ea is None or eo is None:
            failed += 1
            print(_row(n, "" if ea is None else fmt(ea), "" if eo is None else fmt(eo), "", "fail"), file=out)
            continue
        rel = abs(ea - eo) / abs(eo) if eo != 0 else abs(ea - eo)
        ok = rel < args.rtol
        failed += not ok
        print(_row(n, ea, eo, rel, "pass" if ok else "fail"), file=out)
    total = max(len(analytic), len(oracle))
    if total == 0:
        print("# 0 levels, vacuously pass", file=out)
    elif failed:
        print(f"# {failed} of {total} levels fail", file=out)
    else:
        print(f"# all {total} levels pass", file=out)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _sweep_point(spec: PotentialSpec, param: str, value: float, config: RunConfig):
    try:
        point = spec.with_param(param, value)
    except ConfigError as exc:
        raise CommandError(EXIT_CONFIG, f"{param} = {value!r}: {exc}") from None
    return [(value, lv.n, lv.energy) for lv in _levels(point, config)]


def cmd_sweep(args, out) -> int:
    config = load_config(args.config)
    if args.param not in SWEEP_PARAMS:
        raise CommandError(EXIT_CONFIG, f"--param must be one of {', '.join(SWEEP_PARAMS)}")
    if args.steps < 1:
        raise CommandError(EXIT_CONFIG, "empty sweep range (--steps must be >= 1)")
    values = np.linspace(args.start, args.stop, args.steps)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        # map keeps input order regardless of completion order
        results = list(pool.map(lambda v: _sweep_point(config.spec, args.param, float(v), config), values))
    print("# kgeckart sweep", file=out)
    for line in _spec_lines(config, _domain(args, config)):
        print(line, file=out)
    print(f"# param = {args.param}", file=out)
    print("param_value,n,E_n", file=out)
    for rows in results:
        for value, n, energy in rows:
            print(_row(value, n, energy), file=out)
    return EXIT_OK


# --- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgeckart",
        description="Klein-Gordon bound states of the Eckart potential: analytic levels, "
                    "wavefunctions and finite-difference verification.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="INI config with [potential], [solver], [grid] sections")
    common.add_argument("--domain", choices=[m.value for m in DomainMode], default=None,
                        help="override grid.domain_mode")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], epilog=EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter,
                   help="table of bound levels").set_defaults(func=cmd_spectrum)

    p = sub.add_parser("wavefunction", parents=[common], epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="sampled normalized wavefunction of one level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--grid", action="append", metavar="KEY=VALUE",
                   help="grid override (n_points, r_max_factor, domain_mode); repeatable")
    p.add_argument("--no-oracle", action="store_true", help="skip the eigenvector comparison")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("verify", parents=[common], epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="compare analytic levels with the finite-difference oracle")
    p.add_argument("--rtol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="levels over a range of one potential parameter")
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except CommandError as exc:
        print(f"kgeckart: {exc}", file=sys.stderr)
        return exc.code
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head)
            sys.stderr.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
