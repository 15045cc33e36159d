"""Interference-free transmission scheduling from inter-node ranges.

Computes per-node transmit delays so that packets broadcast on a shared
channel in a fully connected network never overlap at any receiver, by
exploiting the differences in propagation delay between node pairs. Ships
four schedulers (closed-form fixed order, tour-ordered, iterative path
inflation, and an exhaustive grid oracle), a sequential-TDMA baseline, a
code-division throughput comparison, guard-interval design against arrival
jitter, and a seeded Monte-Carlo experiment harness with a CLI.
"""

from .core import (
    DEFAULT_COLLISION_TOLERANCE_NS,
    DEFAULT_MU_M_PER_NS,
    CdmaConfig,
    InterferenceReport,
    MessageParams,
    Schedule,
    arrival_intervals,
    cdma_code_length,
    cdma_throughput,
    concurrency_ok,
    evaluate,
    orthogonal_schedule,
    report_cycle,
    tdma_slot_ns,
    throughput_per_sensor,
)
from .topology import (
    Topology,
    TopologyConfig,
    distances,
    generate_gaussian,
    generate_mixture,
    validate_distance_matrix,
)
from .fixed_order import all_orders, best_over_orders, fixed_order_delays
from .grid_search import GridSearchConfig, GridSearchError, GridSearchResult, grid_search
from .atsp import Tour, TspInstance, cost_matrix, rotation_schedule, solve_exact, solve_heuristic
from .path_inflation import (
    InflationConvergenceError,
    InflationResult,
    InflationState,
    inflation_pass,
    initial_state,
    solve_path_inflation,
)
from .robustness import (
    GuardedParams,
    RobustnessConfig,
    adjacent_avoidance_rate,
    crlb_toa_variance_s2,
    erfc_inverse,
    guard_interval_ns,
    jitter_fraction,
    jitter_fraction_samples,
)
from .estimators import (
    FixedOrderScheduler,
    GridSearchScheduler,
    OrthogonalScheduler,
    PathInflationScheduler,
    TspScheduler,
    make_scheduler,
)
from .experiments import (
    ComplexityFit,
    SweepConfig,
    SweepRecord,
    bench_complexity,
    mean_report_cycles,
    mean_throughputs,
    polynomial_fits,
    robustness_curve,
    run_cdma_compare,
    run_outlier_sweep,
    run_sweep,
    sweep_to_csv,
)

__version__ = "0.1.0"
