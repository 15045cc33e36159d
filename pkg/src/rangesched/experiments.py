"""Seeded Monte-Carlo experiments: sweeps, throughput comparison, benchmarks.

All experiments follow a paired protocol: for a given (node count, trial)
the same generated topology is handed to every algorithm, so per-instance
comparisons are meaningful. Topology seeds derive from
(seed, node count, trial), which makes result tables byte-identical across
runs and independent of execution order; only the solve-time column is
machine-dependent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from .core import (
    CdmaConfig,
    MessageParams,
    cdma_code_length,
    cdma_throughput,
    evaluate,
    tdma_slot_ns,
    throughput_per_sensor,
)
from .estimators import make_scheduler
from .io import rows_to_csv
from .robustness import GuardedParams, RobustnessConfig, guard_interval_ns, jitter_fraction_samples
from .topology import Topology, TopologyConfig, distances, generate_mixture

SWEEP_HEADER = ["n", "trial", "algorithm", "t_r_ns", "r_s_bps", "solve_time_ticks"]
CDMA_HEADER = ["n", "algorithm", "mean_r_s_bps"]
ROBUSTNESS_HEADER = ["sigma_e", "p_target", "mean_F", "stderr_F"]
BENCH_DATA_HEADER = ["n", "mean_ticks"]
BENCH_FIT_HEADER = ["degree", "residual_sq", "coefficients"]

SCHEDULE_ALGORITHMS = ("orthogonal", "ca", "tsp", "ipa")


@dataclass(frozen=True)
class SweepConfig:
    """Monte-Carlo sweep settings over network sizes and random topologies."""

    n_values: tuple[int, ...] = tuple(range(10, 101, 10))
    trials_per_n: int = 32
    topology: str = "gaussian"
    sigma_m: float = 5.0
    sigma_outlier_m: float | None = None
    outlier_prob: float = 0.0
    algorithms: tuple[str, ...] = ("orthogonal", "ca", "tsp", "ipa")
    tau_ns: float = 10.0
    mu_m_per_ns: float = 0.3
    r_b_bps: float = 1e9
    cdma_code_length: int | None = None
    seed: int = 0
    restarts: int = 8
    exact_threshold: int = 13
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if self.trials_per_n < 1:
            raise ValueError("trials_per_n must be at least 1")
        if self.topology not in ("gaussian", "mixture"):
            raise ValueError(f"unknown topology family {self.topology!r}")
        unknown = set(self.algorithms) - set(SCHEDULE_ALGORITHMS) - {"cdma"}
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if not self.algorithms:
            raise ValueError("algorithms must be nonempty")


@dataclass(frozen=True)
class SweepRecord:
    n: int
    trial: int
    algorithm: str
    t_r_ns: float
    r_s_bps: float
    solve_time_ticks: int


def topology_seed(seed: int, n: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(int(n), int(trial)))


def trial_topology(cfg: SweepConfig, n: int, trial: int) -> Topology:
    """The topology shared by all algorithms for this (n, trial) pair."""
    # SeedSequence-derived integer keeps TopologyConfig hashable/printable
    derived = int(topology_seed(cfg.seed, n, trial).generate_state(1)[0])
    tc = TopologyConfig(
        n=n,
        sigma_m=cfg.sigma_m,
        sigma_outlier_m=cfg.sigma_outlier_m,
        outlier_prob=cfg.outlier_prob,
        seed=derived,
    )
    return generate_mixture(tc)


def _solver_seed(cfg: SweepConfig, n: int, trial: int) -> int:
    return int(topology_seed(cfg.seed, n, trial).generate_state(2)[1])


def _run_trial(cfg: SweepConfig, params: MessageParams, n: int, trial: int) -> list[SweepRecord]:
    d = distances(trial_topology(cfg, n, trial))
    records = []
    for algorithm in cfg.algorithms:
        if algorithm == "cdma":
            t0 = time.perf_counter_ns()
            slot = tdma_slot_ns(d, params)
            m = cfg.cdma_code_length if cfg.cdma_code_length is not None else cdma_code_length(n)
            r_s = cdma_throughput(d, params, CdmaConfig(cfg.r_b_bps, m))
            ticks = time.perf_counter_ns() - t0
            # the throughput-equivalent cycle: every node sends once per m slots
            t_r = m * slot
        else:
            scheduler = make_scheduler(
                algorithm,
                tau_ns=cfg.tau_ns,
                mu_m_per_ns=cfg.mu_m_per_ns,
                restarts=cfg.restarts,
                exact_threshold=cfg.exact_threshold,
                seed=_solver_seed(cfg, n, trial),
            )
            t0 = time.perf_counter_ns()
            scheduler.fit(d)
            ticks = time.perf_counter_ns() - t0
            report = evaluate(d, scheduler.delays_ns_, params)
            if not report.valid:
                raise RuntimeError(
                    f"algorithm {algorithm!r} produced a colliding schedule at "
                    f"n={n} trial={trial}: total overlap {report.total_overlap_ns} ns"
                )
            t_r = scheduler.report_cycle_ns_
            r_s = throughput_per_sensor(t_r, params, cfg.r_b_bps)
        records.append(
            SweepRecord(
                n=n,
                trial=trial,
                algorithm=algorithm,
                t_r_ns=float(t_r),
                r_s_bps=float(r_s),
                solve_time_ticks=int(ticks),
            )
        )
    return records


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Run all (n, trial) cells; rows come back sorted by (n, trial, algorithm).

    Every schedule is validated inline; a colliding schedule aborts the
    sweep. Trials may run in parallel (``n_jobs``) without changing output.
    """
    params = MessageParams(cfg.tau_ns, cfg.mu_m_per_ns)
    cells = [(n, t) for n in cfg.n_values for t in range(cfg.trials_per_n)]
    chunks = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_run_trial)(cfg, params, n, t) for n, t in cells
    )
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.n, r.trial, r.algorithm))
    return records


def run_outlier_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Sweep over the two-spread mixture family (defaults: 1/3 outliers, 30 m)."""
    if cfg.topology != "mixture":
        cfg = replace(
            cfg,
            topology="mixture",
            sigma_outlier_m=cfg.sigma_outlier_m if cfg.sigma_outlier_m is not None else 30.0,
            outlier_prob=cfg.outlier_prob if cfg.outlier_prob > 0 else 1.0 / 3.0,
        )
    return run_sweep(cfg)


def sweep_to_csv(records: list[SweepRecord]) -> str:
    rows = [
        [r.n, r.trial, r.algorithm, repr(r.t_r_ns), repr(r.r_s_bps), r.solve_time_ticks]
        for r in records
    ]
    return rows_to_csv(SWEEP_HEADER, rows)


def mean_report_cycles(records: list[SweepRecord]) -> dict[tuple[int, str], float]:
    """Mean report cycle per (n, algorithm)."""
    sums: dict[tuple[int, str], list[float]] = {}
    for r in records:
        sums.setdefault((r.n, r.algorithm), []).append(r.t_r_ns)
    return {key: float(np.mean(vals)) for key, vals in sums.items()}


def mean_throughputs(records: list[SweepRecord]) -> dict[tuple[int, str], float]:
    sums: dict[tuple[int, str], list[float]] = {}
    for r in records:
        sums.setdefault((r.n, r.algorithm), []).append(r.r_s_bps)
    return {key: float(np.mean(vals)) for key, vals in sums.items()}


def run_cdma_compare(cfg: SweepConfig) -> list[tuple[int, str, float]]:
    """Per-sensor throughput of each algorithm plus the code-division scheme."""
    algorithms = tuple(cfg.algorithms)
    if "cdma" not in algorithms:
        cfg = replace(cfg, algorithms=algorithms + ("cdma",))
    means = mean_throughputs(run_sweep(cfg))
    return [
        (n, algorithm, means[(n, algorithm)])
        for n in cfg.n_values
        for algorithm in cfg.algorithms
        if (n, algorithm) in means
    ]


def cdma_compare_to_csv(rows) -> str:
    return rows_to_csv(CDMA_HEADER, [[n, a, repr(v)] for n, a, v in rows])


@dataclass(frozen=True)
class ComplexityFit:
    """Least-squares polynomial fit of solve time versus network size."""

    degree: int
    coefficients: tuple[float, ...]
    residual_sq: float


def polynomial_fits(n_values, mean_ticks, degree_max: int) -> list[ComplexityFit]:
    """Least-squares fits for degrees 1..degree_max with squared-L2 residuals."""
    x = np.asarray(n_values, dtype=float)
    y = np.asarray(mean_ticks, dtype=float)
    fits = []
    for degree in range(1, degree_max + 1):
        if x.size < degree + 1:
            raise ValueError(
                f"{x.size} data points cannot determine a degree-{degree} fit"
            )
        poly = np.polynomial.Polynomial.fit(x, y, degree)
        residual = float(((poly(x) - y) ** 2).sum())
        fits.append(
            ComplexityFit(
                degree=degree,
                coefficients=tuple(float(c) for c in poly.convert().coef),
                residual_sq=residual,
            )
        )
    return fits


def bench_complexity(
    algorithm,
    n_values,
    trials: int = 32,
    degree_max: int = 4,
    sigma_m: float = 5.0,
    tau_ns: float = 10.0,
    mu_m_per_ns: float = 0.3,
    seed: int = 0,
):
    """Time an algorithm over network sizes and fit polynomials to the means.

    ``algorithm`` is a registry name or any callable taking a distance
    matrix. Returns (timing rows, fits); timing rows are (n, mean ticks).
    Absolute tick values are machine-dependent.
    """
    n_values = tuple(n_values)
    if list(n_values) != sorted(set(n_values)):
        raise ValueError("n_values must be strictly ascending")
    if callable(algorithm):
        def solve(d, n, trial):
            algorithm(d)
    else:
        def solve(d, n, trial):
            cfg = SweepConfig(n_values=n_values, seed=seed)
            make_scheduler(
                algorithm,
                tau_ns=tau_ns,
                mu_m_per_ns=mu_m_per_ns,
                seed=_solver_seed(cfg, n, trial),
            ).fit(d)

    rows = []
    base_cfg = SweepConfig(
        n_values=n_values,
        trials_per_n=trials,
        sigma_m=sigma_m,
        tau_ns=tau_ns,
        mu_m_per_ns=mu_m_per_ns,
        seed=seed,
    )
    # untimed warm-up so the first timed point does not pay one-off costs
    solve(distances(trial_topology(base_cfg, n_values[0], 0)), n_values[0], 0)
    for n in n_values:
        ticks = []
        for trial in range(trials):
            d = distances(trial_topology(base_cfg, n, trial))
            t0 = time.perf_counter_ns()
            solve(d, n, trial)
            ticks.append(time.perf_counter_ns() - t0)
        rows.append((n, float(np.mean(ticks))))
    fits = polynomial_fits([r[0] for r in rows], [r[1] for r in rows], degree_max)
    return rows, fits


def bench_to_csv(rows, fits) -> tuple[str, str]:
    data_csv = rows_to_csv(BENCH_DATA_HEADER, [[n, repr(t)] for n, t in rows])
    fit_rows = [
        [f.degree, repr(f.residual_sq), " ".join(repr(c) for c in f.coefficients)]
        for f in fits
    ]
    return data_csv, rows_to_csv(BENCH_FIT_HEADER, fit_rows)


def robustness_curve(
    n: int = 20,
    topologies: int = 100,
    sigma_e_values=(0.0, 0.5, 1.0, 2.0),
    p_targets=(None, 0.95, 0.99),
    trials: int = 32,
    algorithm: str = "ca",
    sigma_m: float = 5.0,
    tau_ns: float = 10.0,
    mu_m_per_ns: float = 0.3,
    seed: int = 0,
):
    """Mean interference-free fraction across jitter levels and guard targets.

    For each topology and guard target the schedule is recomputed with the
    widened packet duration, then simulated with the true duration under
    per-arrival Gaussian jitter. ``p_targets`` may include ``None`` for the
    guardless schedule. Returns rows (sigma_e, p_target, mean_F, stderr_F).
    """
    params = MessageParams(tau_ns, mu_m_per_ns)
    cfg = SweepConfig(
        n_values=(n,), sigma_m=sigma_m, tau_ns=tau_ns, mu_m_per_ns=mu_m_per_ns, seed=seed
    )
    mats = [distances(trial_topology(cfg, n, t)) for t in range(topologies)]
    rows = []
    for sigma_e in sigma_e_values:
        for p_target in p_targets:
            samples = []
            for t, d in enumerate(mats):
                eps = guard_interval_ns(sigma_e, p_target) if p_target and sigma_e > 0 else 0.0
                guarded = GuardedParams(base=params, epsilon_ns=eps)
                scheduler = make_scheduler(
                    algorithm,
                    tau_ns=guarded.effective.tau_ns,
                    mu_m_per_ns=mu_m_per_ns,
                    seed=_solver_seed(cfg, n, t),
                )
                scheduler.fit(d)
                rob = RobustnessConfig(
                    sigma_e_ns=sigma_e,
                    trials=trials,
                    seed=int(topology_seed(seed, n, t).generate_state(3)[2]),
                    p_target=p_target,
                )
                samples.append(jitter_fraction_samples(d, scheduler.delays_ns_, guarded, rob))
            pooled = np.concatenate(samples)
            rows.append(
                (
                    float(sigma_e),
                    p_target,
                    float(pooled.mean()),
                    float(pooled.std(ddof=1) / np.sqrt(pooled.size)),
                )
            )
    return rows


def robustness_to_csv(rows) -> str:
    out = [
        [repr(sigma), "" if p is None else repr(float(p)), repr(mean), repr(err)]
        for sigma, p, mean, err in rows
    ]
    return rows_to_csv(ROBUSTNESS_HEADER, out)
