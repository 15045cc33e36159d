"""Scikit-learn style estimators wrapping the schedulers.

Every scheduler is an estimator whose ``fit`` takes a precomputed pairwise
distance matrix (meters) and exposes the learned schedule through fitted
attributes:

    delays_ns_         per-node transmit delays
    report_cycle_ns_   duration of one full exchange cycle
    n_nodes_           network size

``get_params`` / ``set_params`` / ``clone`` behave as usual, so schedulers
drop into pipelines, grid searches over their own hyperparameters, and
joblib-parallel experiment sweeps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import atsp
from .core import (
    DEFAULT_MU_M_PER_NS,
    MessageParams,
    evaluate,
    orthogonal_schedule,
    report_cycle,
    tdma_slot_ns,
)
from .fixed_order import fixed_order_delays
from .grid_search import GridSearchConfig, grid_search
from .path_inflation import solve_path_inflation
from .topology import validate_distance_matrix


class BaseScheduler(BaseEstimator):
    """Shared fit plumbing; subclasses implement ``_solve``."""

    def fit(self, X, y=None):
        """Compute a schedule for the distance matrix ``X`` (n x n, meters)."""
        d = validate_distance_matrix(np.asarray(X, dtype=float))
        params = self._params()
        delays = self._solve(d, params)
        self.n_nodes_ = d.shape[0]
        self.delays_ns_ = delays
        self.report_cycle_ns_ = report_cycle(d, delays, params)
        return self

    def _params(self) -> MessageParams:
        return MessageParams(tau_ns=self.tau_ns, mu_m_per_ns=self.mu_m_per_ns)

    def _solve(self, d: np.ndarray, params: MessageParams) -> np.ndarray:
        raise NotImplementedError

    def interference_report(self, X, tolerance_ns: float = 1e-6):
        """Evaluate the fitted schedule against a distance matrix."""
        if not hasattr(self, "delays_ns_"):
            raise NotFittedError("call fit before interference_report")
        d = validate_distance_matrix(np.asarray(X, dtype=float))
        return evaluate(d, self.delays_ns_, self._params(), tolerance_ns)


class OrthogonalScheduler(BaseScheduler):
    """Sequential TDMA baseline: one worst-case slot per node.

    Fitted attributes additionally include ``slot_ns_``; the reported cycle
    is ``n_nodes_ * slot_ns_`` (the defining quantity of this baseline, an
    upper bound on the last arrival).
    """

    def __init__(self, tau_ns: float = 10.0, mu_m_per_ns: float = DEFAULT_MU_M_PER_NS):
        self.tau_ns = tau_ns
        self.mu_m_per_ns = mu_m_per_ns

    def fit(self, X, y=None):
        d = validate_distance_matrix(np.asarray(X, dtype=float))
        params = self._params()
        delays, t_r = orthogonal_schedule(d, params)
        self.n_nodes_ = d.shape[0]
        self.delays_ns_ = delays
        self.slot_ns_ = tdma_slot_ns(d, params)
        self.report_cycle_ns_ = t_r
        return self


class FixedOrderScheduler(BaseScheduler):
    """Closed-form minimal delays for a fixed transmission order.

    ``order`` is a permutation of node indices; ``None`` means index order.
    """

    def __init__(
        self,
        tau_ns: float = 10.0,
        mu_m_per_ns: float = DEFAULT_MU_M_PER_NS,
        order=None,
    ):
        self.tau_ns = tau_ns
        self.mu_m_per_ns = mu_m_per_ns
        self.order = order

    def _solve(self, d, params):
        return fixed_order_delays(d, params, self.order)


class GridSearchScheduler(BaseScheduler):
    """Exhaustive delay-grid oracle for tiny networks.

    Also exposes ``bound_ns_`` and ``extended_bound_`` describing the delay
    range that was searched.
    """

    def __init__(
        self,
        tau_ns: float = 10.0,
        mu_m_per_ns: float = DEFAULT_MU_M_PER_NS,
        step_ns: float = 0.1,
        max_delay_ns: float | None = None,
        max_nodes: int = 5,
        tolerance_ns: float = 1e-6,
    ):
        self.tau_ns = tau_ns
        self.mu_m_per_ns = mu_m_per_ns
        self.step_ns = step_ns
        self.max_delay_ns = max_delay_ns
        self.max_nodes = max_nodes
        self.tolerance_ns = tolerance_ns

    def _solve(self, d, params):
        cfg = GridSearchConfig(
            step_ns=self.step_ns,
            max_delay_ns=self.max_delay_ns,
            max_nodes=self.max_nodes,
            tolerance_ns=self.tolerance_ns,
        )
        result = grid_search(d, params, cfg)
        self.bound_ns_ = result.bound_ns
        self.extended_bound_ = result.extended_bound
        return result.delays_ns


class TspScheduler(BaseScheduler):
    """Order transmissions along a cheap directed tour, then pick the best
    rotation of the cyclic order.

    Uses the exact subset-DP solver up to ``exact_threshold`` nodes and the
    seeded multi-start local search beyond. Two-node networks bypass the
    tour entirely. Fitted attributes additionally include ``tour_``,
    ``tour_cost_ns_`` and ``rotation_``.
    """

    def __init__(
        self,
        tau_ns: float = 10.0,
        mu_m_per_ns: float = DEFAULT_MU_M_PER_NS,
        exact_threshold: int = 13,
        restarts: int = 8,
        seed: int = 0,
    ):
        self.tau_ns = tau_ns
        self.mu_m_per_ns = mu_m_per_ns
        self.exact_threshold = exact_threshold
        self.restarts = restarts
        self.seed = seed

    def _solve(self, d, params):
        n = d.shape[0]
        if n == 2:
            self.tour_ = None
            self.tour_cost_ns_ = None
            self.rotation_ = (0, 1)
            return fixed_order_delays(d, params, (0, 1))
        inst = atsp.cost_matrix(d, params)
        if n <= self.exact_threshold:
            tour = atsp.solve_exact(inst, max_nodes=self.exact_threshold)
        else:
            tour = atsp.solve_heuristic(inst, seed=self.seed, restarts=self.restarts)
        delays, rotation = atsp.rotation_schedule(d, params, tour, inst.costs_ns)
        self.tour_ = tour
        self.tour_cost_ns_ = tour.cost_ns
        self.rotation_ = rotation
        return delays


class PathInflationScheduler(BaseScheduler):
    """Receiver-order-free schedule from iterative path inflation.

    Fitted attributes additionally include ``cum_adjust_m_`` (added virtual
    path length per node) and ``n_passes_``.
    """

    def __init__(
        self,
        tau_ns: float = 10.0,
        mu_m_per_ns: float = DEFAULT_MU_M_PER_NS,
        max_passes: int | None = None,
    ):
        self.tau_ns = tau_ns
        self.mu_m_per_ns = mu_m_per_ns
        self.max_passes = max_passes

    def _solve(self, d, params):
        result = solve_path_inflation(d, params, max_passes=self.max_passes)
        self.cum_adjust_m_ = result.cum_adjust_m
        self.n_passes_ = result.n_passes
        return result.delays_ns


SCHEDULER_REGISTRY = {
    "orthogonal": OrthogonalScheduler,
    "ca": FixedOrderScheduler,
    "tsp": TspScheduler,
    "ipa": PathInflationScheduler,
    "grid": GridSearchScheduler,
}


def make_scheduler(algorithm: str, **params) -> BaseScheduler:
    """Instantiate a scheduler by its command-line algorithm name."""
    try:
        cls = SCHEDULER_REGISTRY[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; expected one of "
            f"{sorted(SCHEDULER_REGISTRY)}"
        ) from None
    accepted = cls().get_params()
    kwargs = {k: v for k, v in params.items() if k in accepted and v is not None}
    return cls(**kwargs)
