"""Command-line experiment runner.

Subcommands: generate, solve, evaluate, sweep, outlier-sweep, robustness,
cdma-compare, bench. Data series are emitted as CSV and single-instance
results as JSON. Every flag can also be set from an INI config file
(section per subcommand plus a [common] section); command-line flags win
over the file. The default seed comes from the RANGESCHED_SEED environment
variable when set.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments, io as rio
from .core import MessageParams, Schedule, evaluate
from .estimators import SCHEDULER_REGISTRY, make_scheduler
from .grid_search import GridSearchError
from .path_inflation import InflationConvergenceError
from .topology import TopologyConfig, distances, generate_gaussian, generate_mixture

SEED_ENV_VAR = "RANGESCHED_SEED"


def _default_seed() -> int:
    value = os.environ.get(SEED_ENV_VAR)
    return int(value) if value else 0


def _add_common(parser):
    parser.add_argument("--tau", type=float, default=10.0, help="packet duration [ns]")
    parser.add_argument(
        "--mu", type=float, default=0.3, help="propagation speed [m/ns]"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)",
    )
    parser.add_argument("--output", type=Path, default=None, help="output file (default: stdout)")


def _add_algorithm(parser, include_grid=True):
    choices = sorted(SCHEDULER_REGISTRY) if include_grid else sorted(set(SCHEDULER_REGISTRY) - {"grid"})
    parser.add_argument("--algorithm", default=None, choices=choices)
    parser.add_argument("--order", type=str, default=None, help="ca: comma-separated node order")
    parser.add_argument("--grid-step", type=float, default=0.1, help="grid: resolution [ns]")
    parser.add_argument("--max-delay", type=float, default=None, help="grid: delay bound [ns]")
    parser.add_argument("--exact-threshold", type=int, default=13, help="tsp: exact-solver size cap")
    parser.add_argument("--restarts", type=int, default=8, help="tsp: local-search restarts")
    parser.add_argument("--max-iterations", type=int, default=None, help="ipa: pass cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rangesched",
        description="Interference-free transmission schedules from range information",
    )
    parser.add_argument("--config", type=Path, default=None, help="INI config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random topology CSV")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--sigma", type=float, default=5.0, help="coordinate std [m]")
    p.add_argument("--sigma-outlier", type=float, default=None, help="outlier std [m]")
    p.add_argument("--outlier-prob", type=float, default=0.0)
    _add_common(p)

    p = sub.add_parser("solve", help="schedule one network from a topology/distance file")
    p.add_argument("--input", type=Path, default=None, help="topology or distance CSV")
    p.add_argument("--schedule-output", type=Path, default=None, help="also write schedule CSV here")
    _add_algorithm(p)
    _add_common(p)

    p = sub.add_parser("evaluate", help="check a schedule file against a network")
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--schedule", type=Path, default=None, help="schedule CSV")
    p.add_argument("--tolerance", type=float, default=1e-6, help="collision tolerance [ns]")
    _add_common(p)

    for name, help_text in (
        ("sweep", "Monte-Carlo sweep over N (Gaussian topologies)"),
        ("outlier-sweep", "Monte-Carlo sweep over N (mixture topologies)"),
        ("cdma-compare", "per-sensor throughput versus the code-division scheme"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n-values", type=str, default="10:100:10", help="list '10,20' or range 'lo:hi:step'")
        p.add_argument("--trials", type=int, default=32)
        p.add_argument("--sigma", type=float, default=5.0)
        p.add_argument("--sigma-outlier", type=float, default=30.0)
        p.add_argument("--outlier-prob", type=float, default=1.0 / 3.0)
        p.add_argument(
            "--algorithms",
            type=str,
            default="orthogonal,ca,tsp,ipa",
            help="comma-separated subset of orthogonal,ca,tsp,ipa,cdma",
        )
        p.add_argument("--r-b", type=float, default=1e9, help="channel rate [bps]")
        p.add_argument("--code-length", type=int, default=None, help="cdma code length")
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--exact-threshold", type=int, default=13)
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
        _add_common(p)

    p = sub.add_parser("robustness", help="interference fraction under arrival jitter")
    p.add_argument("--input", type=Path, default=None, help="topology or distance CSV")
    p.add_argument("--nodes", type=int, default=20)
    p.add_argument("--sigma", type=float, default=5.0)
    p.add_argument("--topologies", type=int, default=100, help="generated topologies when no --input")
    p.add_argument("--sigma-e", type=float, action="append", default=None, help="jitter std [ns]; repeatable")
    p.add_argument(
        "--p-target",
        type=str,
        action="append",
        default=None,
        help="guard target in (0,1) or 'none'; repeatable",
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--algorithm", default="ca", choices=sorted(set(SCHEDULER_REGISTRY) - {"grid"}))
    _add_common(p)

    p = sub.add_parser("bench", help="time an algorithm and fit polynomials in N")
    p.add_argument("--algorithm", default=None, choices=sorted(SCHEDULER_REGISTRY))
    p.add_argument("--n-values", type=str, default="5:50:5")
    p.add_argument("--trials", type=int, default=32)
    p.add_argument("--degree-max", type=int, default=4)
    p.add_argument("--sigma", type=float, default=5.0)
    p.add_argument("--fit-output", type=Path, default=None, help="fit CSV (default: stdout)")
    _add_common(p)

    return parser


def _parse_args_with_config(argv):
    """Parse argv, letting an INI file supply values flags did not set."""
    parser = build_parser()
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", type=Path, default=None)
    known, _ = probe.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config is not None:
        ini = configparser.ConfigParser()
        if not ini.read(known.config):
            parser.error(f"cannot read config file {known.config}")
        # collect file-supplied values for [common] and the subcommand section
        supplied = {}
        for section in ("common", args.command):
            if ini.has_section(section):
                for key, value in ini.items(section):
                    supplied[key.replace("-", "_")] = value
        explicit = _explicit_dests(argv)
        for dest, raw in supplied.items():
            if dest in explicit or not hasattr(args, dest):
                continue
            setattr(args, dest, _convert_config_value(getattr(args, dest), raw, dest))
    return args


def _explicit_dests(argv) -> set[str]:
    """Destinations the user set on the command line (by flag inspection)."""
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return explicit


# conversions for options whose parsed default is None or a repeated list,
# where the target type cannot be inferred from the current value
_CONFIG_TYPES = {
    "max_delay": float,
    "code_length": int,
    "max_iterations": int,
    "seed": int,
    "sigma_outlier": float,
    "order": str,
    "input": Path,
    "output": Path,
    "fit_output": Path,
    "schedule_output": Path,
    "schedule": Path,
    "sigma_e": lambda raw: [float(x) for x in raw.split(",")],
    "p_target": lambda raw: [x.strip() for x in raw.split(",")],
}


def _convert_config_value(current, raw: str, dest: str):
    """Convert a config-file string to the type the option expects."""
    if raw.lower() in ("none", ""):
        return None
    if dest in _CONFIG_TYPES:
        return _CONFIG_TYPES[dest](raw)
    if isinstance(current, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, Path):
        return Path(raw)
    return raw


def _parse_n_values(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ":" in text:
        lo, hi, step = (int(x) for x in text.split(":"))
        return tuple(range(lo, hi + 1, step))
    return tuple(int(x) for x in text.split(","))


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _load_matrix(path: Path) -> np.ndarray:
    """Accept either a topology CSV or a distance CSV."""
    with open(path, newline="") as fh:
        header = fh.readline().strip()
    if header == ",".join(rio.TOPOLOGY_HEADER):
        return distances(rio.read_topology(path))
    return rio.read_distances(path)


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValueError(f"{args.command} requires {flags} (as a flag or in the config file)")


def _cmd_generate(args) -> int:
    _require(args, "nodes", "output")
    cfg = TopologyConfig(
        n=args.nodes,
        sigma_m=args.sigma,
        sigma_outlier_m=args.sigma_outlier,
        outlier_prob=args.outlier_prob,
        seed=_seed(args),
    )
    topo = generate_gaussian(cfg) if cfg.outlier_prob == 0 else generate_mixture(cfg)
    rio.write_topology(topo, args.output)
    return 0


def _scheduler_from_args(args):
    order = None
    if args.order is not None:
        order = tuple(int(x) for x in args.order.split(","))
    return make_scheduler(
        args.algorithm,
        tau_ns=args.tau,
        mu_m_per_ns=args.mu,
        order=order,
        step_ns=args.grid_step,
        max_delay_ns=args.max_delay,
        exact_threshold=args.exact_threshold,
        restarts=args.restarts,
        max_passes=args.max_iterations,
        seed=_seed(args),
    )


def _cmd_solve(args) -> int:
    _require(args, "input", "algorithm")
    d = _load_matrix(args.input)
    scheduler = _scheduler_from_args(args)
    t0 = time.perf_counter_ns()
    scheduler.fit(d)
    ticks = time.perf_counter_ns() - t0
    params = MessageParams(args.tau, args.mu)
    report = evaluate(d, scheduler.delays_ns_, params)
    payload = {
        "algorithm": args.algorithm,
        "n": int(d.shape[0]),
        "delays_ns": [float(x) for x in scheduler.delays_ns_],
        "report_cycle_ns": float(scheduler.report_cycle_ns_),
        "tau_ns": args.tau,
        "mu_m_per_ns": args.mu,
        "solve_time_ticks": int(ticks),
    }
    _emit(rio.report_to_json(report, **payload) + "\n", args.output)
    if args.schedule_output is not None:
        rio.write_schedule(Schedule(scheduler.delays_ns_), args.schedule_output)
    return 0 if report.valid else 1


def _cmd_evaluate(args) -> int:
    _require(args, "input", "schedule")
    d = _load_matrix(args.input)
    schedule = rio.read_schedule(args.schedule)
    report = evaluate(d, schedule.delays_ns, MessageParams(args.tau, args.mu), args.tolerance)
    _emit(rio.report_to_json(report, n=int(d.shape[0])) + "\n", args.output)
    return 0 if report.valid else 1


def _sweep_config(args, topology: str) -> experiments.SweepConfig:
    return experiments.SweepConfig(
        n_values=_parse_n_values(args.n_values),
        trials_per_n=args.trials,
        topology=topology,
        sigma_m=args.sigma,
        sigma_outlier_m=args.sigma_outlier if topology == "mixture" else None,
        outlier_prob=args.outlier_prob if topology == "mixture" else 0.0,
        algorithms=tuple(args.algorithms.split(",")),
        tau_ns=args.tau,
        mu_m_per_ns=args.mu,
        r_b_bps=args.r_b,
        cdma_code_length=args.code_length,
        seed=_seed(args),
        restarts=args.restarts,
        exact_threshold=args.exact_threshold,
        n_jobs=args.jobs,
    )


def _cmd_sweep(args, topology: str) -> int:
    records = experiments.run_sweep(_sweep_config(args, topology))
    _emit(experiments.sweep_to_csv(records), args.output)
    return 0


def _cmd_cdma_compare(args) -> int:
    rows = experiments.run_cdma_compare(_sweep_config(args, "gaussian"))
    _emit(experiments.cdma_compare_to_csv(rows), args.output)
    return 0


def _cmd_robustness(args) -> int:
    _require(args, "sigma_e")
    p_targets = []
    for raw in args.p_target if args.p_target else ["none"]:
        p_targets.append(None if raw.lower() == "none" else float(raw))
    if args.input is not None:
        from .robustness import GuardedParams, RobustnessConfig, guard_interval_ns, jitter_fraction_samples

        d = _load_matrix(args.input)
        params = MessageParams(args.tau, args.mu)
        rows = []
        for sigma_e in args.sigma_e:
            for p_target in p_targets:
                eps = guard_interval_ns(sigma_e, p_target) if p_target and sigma_e > 0 else 0.0
                guarded = GuardedParams(base=params, epsilon_ns=eps)
                scheduler = make_scheduler(
                    args.algorithm,
                    tau_ns=guarded.effective.tau_ns,
                    mu_m_per_ns=args.mu,
                    seed=_seed(args),
                )
                scheduler.fit(d)
                samples = jitter_fraction_samples(
                    d,
                    scheduler.delays_ns_,
                    guarded,
                    RobustnessConfig(sigma_e_ns=sigma_e, trials=args.trials, seed=_seed(args)),
                )
                rows.append(
                    (
                        float(sigma_e),
                        p_target,
                        float(samples.mean()),
                        float(samples.std(ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else 0.0,
                    )
                )
    else:
        rows = experiments.robustness_curve(
            n=args.nodes,
            topologies=args.topologies,
            sigma_e_values=tuple(args.sigma_e),
            p_targets=tuple(p_targets),
            trials=args.trials,
            algorithm=args.algorithm,
            sigma_m=args.sigma,
            tau_ns=args.tau,
            mu_m_per_ns=args.mu,
            seed=_seed(args),
        )
    _emit(experiments.robustness_to_csv(rows), args.output)
    return 0


def _cmd_bench(args) -> int:
    _require(args, "algorithm")
    rows, fits = experiments.bench_complexity(
        args.algorithm,
        _parse_n_values(args.n_values),
        trials=args.trials,
        degree_max=args.degree_max,
        sigma_m=args.sigma,
        tau_ns=args.tau,
        mu_m_per_ns=args.mu,
        seed=_seed(args),
    )
    data_csv, fit_csv = experiments.bench_to_csv(rows, fits)
    _emit(data_csv, args.output)
    if args.fit_output is not None:
        args.fit_output.write_text(fit_csv)
    else:
        sys.stdout.write(fit_csv)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _parse_args_with_config(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "sweep":
            return _cmd_sweep(args, "gaussian")
        if args.command == "outlier-sweep":
            return _cmd_sweep(args, "mixture")
        if args.command == "cdma-compare":
            return _cmd_cdma_compare(args)
        if args.command == "robustness":
            return _cmd_robustness(args)
        if args.command == "bench":
            return _cmd_bench(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (rio.FileFormatError, GridSearchError, InflationConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
