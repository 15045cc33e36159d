"""Exhaustive grid search over transmit delays, for tiny networks.

The search space grows as n * grid_size**(n-1), so this exists purely as a
ground-truth oracle for cross-checking the polynomial-time solvers on
networks of a handful of nodes. One node at a time is anchored at zero
delay while the remaining delays sweep a uniform grid over [0, bound];
trying every anchor makes all canonical (minimum-delay-zero) grid schedules
reachable, not just those where a particular node transmits first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MessageParams, tdma_slot_ns

_CHUNK = 1 << 17


class GridSearchError(RuntimeError):
    """No collision-free grid point exists within the (extended) bound."""


@dataclass(frozen=True)
class GridSearchConfig:
    """Grid resolution, delay upper bound, and a node-count safety cap.

    ``max_delay_ns`` of ``None`` uses the sequential-TDMA slot duration as
    the bound. If the grid contains no feasible point (possible on a coarse
    grid), the bound is doubled once before giving up.
    """

    step_ns: float
    max_delay_ns: float | None = None
    max_nodes: int = 5
    tolerance_ns: float = 1e-6

    def __post_init__(self) -> None:
        if not self.step_ns > 0:
            raise ValueError("step_ns must be positive")
        if self.max_delay_ns is not None and not self.max_delay_ns > 0:
            raise ValueError("max_delay_ns must be positive")
        if self.max_nodes < 2:
            raise ValueError("max_nodes must be at least 2")


@dataclass(frozen=True)
class GridSearchResult:
    delays_ns: np.ndarray
    report_cycle_ns: float
    bound_ns: float
    extended_bound: bool


def _search_anchor(prop, tau, grid, tolerance, anchor):
    """Best feasible point with the anchor node's delay fixed at zero."""
    n = prop.shape[0]
    free = [x for x in range(n) if x != anchor]
    pairs = [
        (k, i, j)
        for k in range(n)
        for i in range(n)
        for j in range(i + 1, n)
        if i != k and j != k
    ]
    col_max = np.array([np.delete(prop[:, i], i).max() for i in range(n)])
    g = grid.size
    total = g ** (n - 1)
    dims = (g,) * (n - 1)
    best = None
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        idx = np.unravel_index(np.arange(lo, hi), dims)
        delays = np.zeros((hi - lo, n))
        for m, node in enumerate(free):
            delays[:, node] = grid[idx[m]]
        overlap = np.zeros(hi - lo)
        for k, i, j in pairs:
            sep = np.abs(
                (delays[:, i] + prop[k, i]) - (delays[:, j] + prop[k, j])
            )
            overlap += np.clip(tau - sep, 0.0, tau)
        feasible = overlap <= tolerance
        if not feasible.any():
            continue
        t_r = (delays + col_max[None, :]).max(axis=1) + tau
        t_r[~feasible] = np.inf
        m = int(np.argmin(t_r))
        # argmin keeps the first minimum; flat C order enumerates the free
        # delays lexicographically, so ties resolve to the smallest vector
        if best is None or t_r[m] < best[0]:
            best = (float(t_r[m]), tuple(delays[m]))
    return best


def grid_search(d, params: MessageParams, cfg: GridSearchConfig) -> GridSearchResult:
    """Exhaustively find the best collision-free schedule on the delay grid.

    Minimizes the report cycle; ties break toward the lexicographically
    smallest delay vector. Raises ``GridSearchError`` when even the doubled
    bound contains no feasible point, and ``ValueError`` when the network
    exceeds the configured node cap.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n > cfg.max_nodes:
        raise ValueError(
            f"grid search is limited to {cfg.max_nodes} nodes (got {n}); "
            "raise max_nodes only if you accept the exponential cost"
        )
    prop = d / params.mu_m_per_ns
    bound = cfg.max_delay_ns if cfg.max_delay_ns is not None else tdma_slot_ns(d, params)
    for attempt, extended in ((bound, False), (2 * bound, True)):
        grid = np.arange(int(np.floor(attempt / cfg.step_ns)) + 1) * cfg.step_ns
        best = None
        for anchor in range(n):
            found = _search_anchor(prop, params.tau_ns, grid, cfg.tolerance_ns, anchor)
            if found is None:
                continue
            if best is None or found < best:
                best = found
        if best is not None:
            t_r, delays = best
            return GridSearchResult(
                delays_ns=np.array(delays),
                report_cycle_ns=t_r,
                bound_ns=attempt,
                extended_bound=extended,
            )
    raise GridSearchError(
        f"no collision-free point on the grid with step {cfg.step_ns} ns "
        f"up to bound {2 * bound} ns"
    )
