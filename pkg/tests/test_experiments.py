import time

import numpy as np
import pytest

from rangesched import (
    SweepConfig,
    bench_complexity,
    mean_report_cycles,
    mean_throughputs,
    polynomial_fits,
    run_cdma_compare,
    run_outlier_sweep,
    run_sweep,
    sweep_to_csv,
)
from rangesched.experiments import trial_topology


SMALL = SweepConfig(
    n_values=(4, 6),
    trials_per_n=3,
    algorithms=("orthogonal", "ca", "ipa", "cdma"),
    seed=321,
)


def test_records_sorted_and_complete():
    records = run_sweep(SMALL)
    keys = [(r.n, r.trial, r.algorithm) for r in records]
    assert keys == sorted(keys)
    assert len(records) == 2 * 3 * 4
    assert len(set(keys)) == len(keys)
    assert all(r.t_r_ns > 0 and r.r_s_bps > 0 for r in records)


def test_paired_protocol_reuses_topology():
    a = trial_topology(SMALL, 6, 2).positions_m
    b = trial_topology(SMALL, 6, 2).positions_m
    assert np.array_equal(a, b)
    assert not np.array_equal(a, trial_topology(SMALL, 6, 1).positions_m)


def _strip_ticks(csv_text: str) -> str:
    lines = csv_text.splitlines()
    return "\n".join(",".join(line.split(",")[:-1]) for line in lines)


def test_csv_is_deterministic_modulo_ticks():
    a = sweep_to_csv(run_sweep(SMALL))
    b = sweep_to_csv(run_sweep(SMALL))
    assert _strip_ticks(a) == _strip_ticks(b)
    assert a.splitlines()[0] == "n,trial,algorithm,t_r_ns,r_s_bps,solve_time_ticks"


def test_parallel_execution_does_not_change_bytes():
    serial = sweep_to_csv(run_sweep(SMALL))
    parallel = sweep_to_csv(run_sweep(SweepConfig(**{**SMALL.__dict__, "n_jobs": 2})))
    assert _strip_ticks(serial) == _strip_ticks(parallel)


def test_outlier_sweep_defaults_to_mixture():
    records = run_outlier_sweep(
        SweepConfig(n_values=(6,), trials_per_n=2, algorithms=("orthogonal", "tsp"), seed=5)
    )
    assert len(records) == 4
    # outliers widen the network, so the slot is much larger than for the
    # matching plain-gaussian sweep
    plain = run_sweep(
        SweepConfig(n_values=(6,), trials_per_n=2, algorithms=("orthogonal",), seed=5)
    )
    mixed = [r for r in records if r.algorithm == "orthogonal"]
    assert np.mean([r.t_r_ns for r in mixed]) > np.mean([r.t_r_ns for r in plain])


def test_outlier_sweep_with_zero_probability_degenerates():
    cfg = SweepConfig(
        n_values=(5,),
        trials_per_n=2,
        topology="mixture",
        sigma_outlier_m=30.0,
        outlier_prob=0.0,
        algorithms=("ca",),
        seed=9,
    )
    mixture_records = run_outlier_sweep(cfg)
    gaussian_records = run_sweep(
        SweepConfig(n_values=(5,), trials_per_n=2, algorithms=("ca",), seed=9)
    )
    assert [r.t_r_ns for r in mixture_records] == [r.t_r_ns for r in gaussian_records]


def test_every_emitted_schedule_is_validated(monkeypatch):
    import rangesched.experiments as exp

    class Broken:
        def fit(self, d):
            self.delays_ns_ = np.zeros(d.shape[0])
            self.report_cycle_ns_ = 1.0
            return self

    monkeypatch.setattr(exp, "make_scheduler", lambda *a, **k: Broken())
    with pytest.raises(RuntimeError, match="colliding schedule"):
        # a dense cluster makes the all-zero schedule certainly collide
        run_sweep(
            SweepConfig(n_values=(5,), trials_per_n=1, algorithms=("ca",), sigma_m=0.5, seed=0)
        )


def test_cdma_compare_rows():
    cfg = SweepConfig(
        n_values=(4, 8),
        trials_per_n=2,
        algorithms=("orthogonal", "ca"),
        seed=77,
    )
    rows = run_cdma_compare(cfg)
    algos = {a for _, a, _ in rows}
    assert algos == {"orthogonal", "ca", "cdma"}
    # per-sensor rate of the baseline is r_b * tau / (n * slot); in the
    # zero-extent limit the slot collapses to tau and the rate to r_b / n
    tiny = SweepConfig(
        n_values=(4,), trials_per_n=2, sigma_m=1e-9, algorithms=("orthogonal",), seed=6
    )
    for n, algorithm, r_s in run_cdma_compare(tiny):
        if algorithm == "orthogonal":
            assert r_s == pytest.approx(tiny.r_b_bps / n, rel=1e-6)


def test_schedulers_beat_cdma_at_scale():
    cfg = SweepConfig(
        n_values=(100,),
        trials_per_n=3,
        algorithms=("orthogonal", "ca", "tsp", "ipa", "cdma"),
        seed=14,
    )
    means = mean_throughputs(run_sweep(cfg))
    for algorithm in ("ca", "tsp", "ipa"):
        assert means[(100, algorithm)] > means[(100, "cdma")]


def test_throughput_summary_consistency():
    records = run_sweep(SMALL)
    means = mean_throughputs(records)
    cycles = mean_report_cycles(records)
    assert set(means) == set(cycles)


def test_polynomial_fits_residuals_decrease():
    x = np.arange(5, 55, 5)
    y = 2.0 * x**3 + 10.0 * x + np.linspace(-3, 3, x.size)
    fits = polynomial_fits(x, y, degree_max=4)
    residuals = [f.residual_sq for f in fits]
    assert all(b <= a + 1e-6 for a, b in zip(residuals, residuals[1:]))
    assert fits[2].residual_sq < 0.05 * fits[0].residual_sq
    with pytest.raises(ValueError):
        polynomial_fits([1, 2], [1.0, 2.0], degree_max=3)


def test_bench_constant_time_callable_has_flat_fit():
    def constant_work(d):
        time.sleep(0.002)

    rows, fits = bench_complexity(
        constant_work, (5, 10, 15, 20), trials=4, degree_max=2, seed=1
    )
    ticks = np.array([t for _, t in rows])
    linear = fits[0]
    # slope over the whole range stays well under the mean level
    assert abs(linear.coefficients[1]) * (20 - 5) < 0.5 * ticks.mean()


def test_bench_requires_ascending_sizes():
    with pytest.raises(ValueError):
        bench_complexity("ca", (10, 5), trials=1)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(n_values=())
    with pytest.raises(ValueError):
        SweepConfig(trials_per_n=0)
    with pytest.raises(ValueError):
        SweepConfig(topology="ring")
    with pytest.raises(ValueError):
        SweepConfig(algorithms=("ca", "magic"))
