"""Command-line front end: single runs, sweeps, bound tables, repro presets.

Subcommands
-----------
run    one policy run; prints a JSON summary to stdout
sweep  Monte Carlo grid from an INI config file; writes the harness CSV
bounds closed-form bound table over a budget grid; CSV to stdout/file
repro  canned experiment presets (fig2a, fig2bc-sh-only, zero-noise-suite)

Exit codes are stable: 0 success, 2 configuration/parse error, 3 policy
error, 4 I/O error. Inline flags always override config-file values. The
environment variable ``CPBANDIT_WORKERS`` supplies the default worker
count.

Config file format (INI)::

    [environment]
    mu1 = 0
    mu2 = 2
    x_star = 0.7
    sigma = 8
    noise = gaussian

    [sweep]
    eta = 1e-8
    budgets = 2000, 4000, 8000
    replications = 1000
    master_seed = 1
    confidence_level = 0.90
    workers = 2

    [policy.sh]
    [policy.sha]
    gamma = 120
    L_fraction = 0.05

Policy sections are ``[policy.NAME]`` with NAME in {sh, shb, sha,
grid_ls}; their keys become policy parameters. Section order fixes the
row order of the output CSV.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

from . import bounds as bounds_mod
from .adaptive import ShaConfig, run_sha
from .env import make_environment
from .errors import ConfigError, CpBanditError, DomainError, PolicyError
from .halving import Decision, run_sh, run_shb
from .harness import (
    ExperimentConfig,
    PolicySpec,
    run_sweep,
    write_rows_csv,
)
from .offline import default_grid_size, run_grid_ls

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POLICY = 3
EXIT_IO = 4

PRESETS = ("fig2a", "fig2bc-sh-only", "zero-noise-suite")

# Budget grids for the repro presets. The source figures never tabulate
# their grids, so these were chosen from pilot Monte Carlo runs to
# bracket the observed SH/SHB crossover (fig2a) and to match the small
# budgets where all policies are runnable (fig2bc).
FIG2A_BUDGETS = [
    2000, 6000, 12000, 16000, 20000, 30000, 48000, 54000, 60000, 72000, 80000,
]
FIG2BC_BUDGETS = [9, 12, 15, 18, 24, 30, 36, 45, 60]
ZERO_NOISE_BUDGETS = [27, 190, 202, 1001, 2000]


def _default_workers() -> int:
    raw = os.environ.get("CPBANDIT_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parse_number(text: str) -> float | int:
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_budgets(text: str) -> list[int]:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    budgets = []
    for p in parts:
        if p:
            budgets.append(int(p))
    return budgets


def parse_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    """Read an INI sweep config; ``overrides`` wins over file values."""
    overrides = overrides or {}
    cp = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc

    try:
        env_sec = cp["environment"]
        environment = make_environment(
            mu1=float(env_sec["mu1"]),
            mu2=float(env_sec["mu2"]),
            x_star=float(env_sec["x_star"]),
            sigma=float(env_sec["sigma"]),
            noise_kind=env_sec.get("noise", "gaussian"),
        )
        sweep = cp["sweep"]
        eta = float(overrides.get("eta", sweep["eta"]))
        budgets = overrides.get("budgets") or _parse_budgets(sweep["budgets"])
        replications = int(overrides.get("replications", sweep["replications"]))
        master_seed = int(overrides.get("master_seed", sweep.get("master_seed", "0")))
        confidence = float(
            overrides.get("confidence_level", sweep.get("confidence_level", "0.90"))
        )
        workers = int(
            overrides.get("workers", sweep.get("workers", str(_default_workers())))
        )
        policies = []
        for section in cp.sections():
            if not section.startswith("policy."):
                continue
            name = section[len("policy."):]
            params = {k: _parse_number(v) for k, v in cp[section].items()}
            policies.append(PolicySpec(name, params))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from exc
    if not (0.0 < eta < 0.5):
        raise ConfigError(f"eta={eta} outside (0, 1/2)")
    return ExperimentConfig(
        environment=environment,
        eta=eta,
        policies=policies,
        budgets=budgets,
        replications=replications,
        master_seed=master_seed,
        confidence_level=confidence,
        workers=workers,
    )


def _trace_summary(trace) -> dict:
    return {
        "phases": len(trace),
        "zoom_left": sum(d is Decision.ZOOM_LEFT for d in trace),
        "zoom_right": sum(d is Decision.ZOOM_RIGHT for d in trace),
        "backtrack": sum(d is Decision.BACKTRACK for d in trace),
    }


def cmd_run(args: argparse.Namespace) -> int:
    try:
        if not (0.0 < args.eta < 0.5):
            raise ConfigError(f"eta={args.eta} outside (0, 1/2)")
        env = make_environment(args.mu1, args.mu2, args.xstar, args.sigma, args.noise)
    except (CpBanditError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .env import RngStream

    rng = RngStream(args.seed, args.stream)
    decision = None
    try:
        if args.policy == "sh":
            result = run_sh(env, args.T, args.eta, rng)
        elif args.policy == "shb":
            result = run_shb(env, args.T, args.eta, rng)
        elif args.policy == "sha":
            sigma = args.sha_sigma if args.sha_sigma is not None else (
                env.effective_sigma() or 1.0
            )
            from .adaptive import default_exploration_pulls

            L = args.L if args.L is not None else default_exploration_pulls(
                args.T, args.l_fraction
            )
            cfg = ShaConfig(gamma=args.gamma, L=L, sigma=sigma)
            result, decision = run_sha(env, args.T, args.eta, cfg, rng)
        elif args.policy == "grid_ls":
            G = args.G if args.G is not None else default_grid_size(args.eta)
            result = run_grid_ls(env, args.T, args.eta, G, rng)
        else:  # argparse choices prevent this
            raise ConfigError(f"unknown policy {args.policy!r}")
    except PolicyError as exc:
        print(f"policy error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except CpBanditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    payload = {
        "policy": args.policy,
        "T": args.T,
        "eta": args.eta,
        "estimate": result.estimate,
        "abs_error": abs(result.estimate - env.x_star),
        "pulls_used": result.pulls_used,
        "trace_summary": _trace_summary(result.trace),
    }
    if decision is not None:
        payload["dispatch"] = {
            "delta_hat": decision.delta_hat,
            "tau": decision.tau,
            "chosen": decision.chosen.value,
        }
    print(json.dumps(payload))
    if args.trace_out:
        try:
            with open(args.trace_out, "w", encoding="utf-8") as fh:
                for record in result.phases:
                    fh.write(json.dumps(record.as_dict()) + "\n")
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def _write_sweep_csv(rows, output: str | None) -> int:
    try:
        if output in (None, "-"):
            write_rows_csv(rows, sys.stdout)
        else:
            with open(output, "w", encoding="utf-8", newline="") as fh:
                write_rows_csv(rows, fh)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{len(rows)} rows", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    overrides: dict = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.replications is not None:
        overrides["replications"] = args.replications
    try:
        cfg = parse_config(args.config, overrides)
    except (ConfigError, CpBanditError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = run_sweep(cfg)
    return _write_sweep_csv(rows, args.output)


BOUNDS_HEADER = (
    "T,t1,shb_upper,shb_upper_valid,sh_upper,sh_upper_valid,"
    "large_lower,large_lower_valid,small_lower,small_lower_valid"
)


def cmd_bounds(args: argparse.Namespace) -> int:
    try:
        t_grid = _parse_budgets(args.T_grid)
        if not t_grid:
            raise ConfigError("empty T grid")
        queries = [
            bounds_mod.BoundQuery(T=t, delta=args.delta, sigma=args.sigma, eta=args.eta)
            for t in t_grid
        ]
        t1 = bounds_mod.t1_threshold(args.delta, args.sigma, args.eta)
    except (DomainError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    lines = [BOUNDS_HEADER]
    for q in queries:
        cells = [f"{q.T}", f"{t1:.10g}"]
        for fn in (
            bounds_mod.shb_upper,
            bounds_mod.sh_upper,
            bounds_mod.large_budget_lower,
            bounds_mod.small_budget_lower,
        ):
            b = fn(q)
            cells.append(f"{b.value:.10g}")
            cells.append("true" if b.valid else "false")
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    try:
        if args.output in (None, "-"):
            sys.stdout.write(text)
        else:
            Path(args.output).write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _preset_configs(preset: str, replications: int | None, workers: int,
                    seed: int) -> list[tuple[str, ExperimentConfig]]:
    if preset == "fig2a":
        env = make_environment(0.0, 2.0, 0.7, 8.0, "gaussian")
        cfg = ExperimentConfig(
            environment=env,
            eta=1e-8,
            policies=[
                PolicySpec("sh"),
                PolicySpec("shb"),
                PolicySpec("sha", {"gamma": 120.0, "L_fraction": 0.05, "sigma": 8.0}),
            ],
            budgets=list(FIG2A_BUDGETS),
            replications=replications or 1000,
            master_seed=seed,
            workers=workers,
        )
        return [("fig2a.csv", cfg)]
    if preset == "fig2bc-sh-only":
        out = []
        for x_star in (0.7, 0.01):
            env = make_environment(0.0, 2.0, x_star, 1.0, "gaussian")
            cfg = ExperimentConfig(
                environment=env,
                eta=0.1,
                policies=[PolicySpec("sh"), PolicySpec("grid_ls")],
                budgets=list(FIG2BC_BUDGETS),
                replications=replications or 500,
                master_seed=seed,
                workers=workers,
            )
            out.append((f"fig2bc_xstar_{x_star}.csv", cfg))
        return out
    if preset == "zero-noise-suite":
        env = make_environment(0.0, 2.0, 0.7, 0.0, "none")
        cfg = ExperimentConfig(
            environment=env,
            eta=1e-3,
            policies=[
                PolicySpec("sh"),
                PolicySpec("shb"),
                PolicySpec("sha", {"sigma": 1.0}),
                PolicySpec("grid_ls", {"G": 1001}),
            ],
            budgets=list(ZERO_NOISE_BUDGETS),
            replications=replications or 50,
            master_seed=seed,
            workers=workers,
        )
        return [("zero-noise-suite.csv", cfg)]
    raise ConfigError(f"unknown preset {preset!r}; expected one of {PRESETS}")


def cmd_repro(args: argparse.Namespace) -> int:
    workers = args.workers if args.workers is not None else _default_workers()
    try:
        configs = _preset_configs(args.preset, args.replications, workers, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for filename, cfg in configs:
        rows = run_sweep(cfg)
        try:
            with open(outdir / filename, "w", encoding="utf-8", newline="") as fh:
                write_rows_csv(rows, fh)
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {outdir / filename} ({len(rows)} rows)", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpbandit",
        description="Change-point bandit simulations, bound tables, repro presets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one policy once, print JSON summary")
    p_run.add_argument("--policy", required=True,
                       choices=["sh", "shb", "sha", "grid_ls"])
    p_run.add_argument("--mu1", type=float, required=True)
    p_run.add_argument("--mu2", type=float, required=True)
    p_run.add_argument("--xstar", type=float, required=True)
    p_run.add_argument("--sigma", type=float, required=True)
    p_run.add_argument("--noise", default="gaussian",
                       choices=["gaussian", "uniform", "none"])
    p_run.add_argument("--eta", type=float, required=True)
    p_run.add_argument("--T", type=int, required=True)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--stream", type=int, default=0)
    p_run.add_argument("--gamma", type=float, default=120.0,
                       help="sha threshold multiplier")
    p_run.add_argument("--l-fraction", type=float, default=0.05,
                       help="sha exploration fraction of T")
    p_run.add_argument("--L", type=int, default=None,
                       help="sha exploration pulls (overrides --l-fraction)")
    p_run.add_argument("--sha-sigma", type=float, default=None,
                       help="known noise scale for sha (default: env sigma, or 1)")
    p_run.add_argument("--G", type=int, default=None,
                       help="grid_ls point count (default 2*ceil(1/(2*eta)))")
    p_run.add_argument("--trace-out", default=None,
                       help="write per-phase JSON lines to this file")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--output", default=None, help="CSV path ('-' = stdout)")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override [sweep] master_seed")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="override [sweep] workers")
    p_sweep.add_argument("--replications", type=int, default=None,
                         help="override [sweep] replications")
    p_sweep.set_defaults(func=cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="tabulate closed-form bounds over T")
    p_bounds.add_argument("--delta", type=float, required=True)
    p_bounds.add_argument("--sigma", type=float, required=True)
    p_bounds.add_argument("--eta", type=float, required=True)
    p_bounds.add_argument("--T-grid", dest="T_grid", required=True,
                          help="comma/space separated budgets")
    p_bounds.add_argument("--output", default=None, help="CSV path ('-' = stdout)")
    p_bounds.set_defaults(func=cmd_bounds)

    p_repro = sub.add_parser("repro", help="run a canned reproduction preset")
    p_repro.add_argument("preset", help=f"one of {', '.join(PRESETS)}")
    p_repro.add_argument("outdir", help="output directory for CSV files")
    p_repro.add_argument("--replications", type=int, default=None,
                         help="override the preset replication count")
    p_repro.add_argument("--workers", type=int, default=None)
    p_repro.add_argument("--seed", type=int, default=20240901)
    p_repro.set_defaults(func=cmd_repro)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
