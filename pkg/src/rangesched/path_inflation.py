"""Receiver-order-free scheduling by iteratively inflating path lengths.

Instead of fixing a transmission order, this solver grows virtual path
lengths until every receiver separates every pair of senders by at least
the packet's path-equivalent length. One pass visits receivers k = 0..n-1
in turn; at each receiver the sender pairs (i, j), i < j, are scanned in
lexicographic order against the current matrix, and whenever the two paths
differ by less than the required length, the higher-index node's column is
inflated just enough to restore the separation. Added length accumulates
per node and converts to a transmit delay by dividing by the propagation
speed.

Passes repeat until one completes with no adjustment. Convergence has no
known proof, so a safety cap (default 10 * n**2 passes) turns a hypothetical
livelock into a diagnosable error.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import MessageParams

TRIGGER_EPS_M = 1e-9


class InflationConvergenceError(RuntimeError):
    """The pass cap was reached before a full pass made no adjustment."""


@dataclass(frozen=True)
class InflationState:
    """Adjusted path matrix, per-node added length, and passes applied."""

    matrix_m: np.ndarray
    cum_adjust_m: np.ndarray
    passes: int


@dataclass(frozen=True)
class InflationResult:
    delays_ns: np.ndarray
    cum_adjust_m: np.ndarray
    matrix_m: np.ndarray
    n_passes: int


def initial_state(d) -> InflationState:
    d = np.asarray(d, dtype=float)
    return InflationState(
        matrix_m=d.copy(),
        cum_adjust_m=np.zeros(d.shape[0]),
        passes=0,
    )


def _scan_receiver(m: np.ndarray, cum: np.ndarray, k: int, length_m: float, thr: float) -> bool:
    """Scan receiver k's sender pairs (i, j), i < j, in lexicographic order.

    Equivalent to visiting every pair in order while re-reading the matrix
    after each adjustment, but only leads that can actually trigger are
    visited. Any violating pair lies inside a run of consecutive sorted
    values with sub-threshold gaps, so run members seed the pending-lead
    heap; a bump can only create violations at the positions whose value it
    just changed, and leads near those values are pushed as they appear.
    """
    n = m.shape[0]
    scratch = m[k].copy()
    scratch[k] = np.inf  # never pairs with itself; sorts past every real value
    vals = np.sort(scratch)
    run = np.diff(vals) < thr
    if not run.any():
        return False
    member = np.zeros(n, dtype=bool)
    member[:-1][run] = True
    member[1:][run] = True
    heap = [int(i) for i in np.argsort(scratch, kind="stable")[member]]
    heapq.heapify(heap)
    changed = False
    while heap:
        i = heapq.heappop(heap)
        if i >= n - 1:
            continue
        gaps = np.abs(scratch[i + 1 :] - scratch[i])
        j_hit = np.nonzero(gaps < thr)[0] + i + 1
        if j_hit.size == 0:
            continue
        bump = length_m - (scratch[j_hit] - scratch[i])
        m[:, j_hit] += bump[None, :]
        cum[j_hit] += bump
        scratch[j_hit] = m[k, j_hit]
        changed = True
        tail = scratch[i + 1 :]
        flagged = (np.abs(tail[:, None] - scratch[j_hit][None, :]) < thr).any(axis=1)
        for off in np.nonzero(flagged)[0]:
            heapq.heappush(heap, int(off) + i + 1)
    return changed


def _pass_inplace(m: np.ndarray, cum: np.ndarray, length_m: float) -> bool:
    """One full receiver sweep, mutating the matrix; True if anything moved."""
    n = m.shape[0]
    thr = length_m - TRIGGER_EPS_M
    changed = False
    for k in range(n):
        if _scan_receiver(m, cum, k, length_m, thr):
            changed = True
    return changed


def inflation_pass(state: InflationState, params: MessageParams) -> InflationState:
    """Apply one full pass, returning the new state (input left untouched)."""
    m = state.matrix_m.copy()
    cum = state.cum_adjust_m.copy()
    _pass_inplace(m, cum, params.length_m)
    return InflationState(matrix_m=m, cum_adjust_m=cum, passes=state.passes + 1)


def solve_path_inflation(
    d, params: MessageParams, max_passes: int | None = None
) -> InflationResult:
    """Inflate paths to a fixed point and return the resulting delays.

    ``n_passes`` counts passes that made at least one adjustment; the final
    pass that verifies the fixed point is not counted. Raises
    ``InflationConvergenceError`` if the cap is exceeded.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    cap = max_passes if max_passes is not None else 10 * n * n
    if cap < 1:
        raise ValueError("max_passes must be at least 1")
    m = d.copy()
    cum = np.zeros(n)
    adjusting = 0
    for _ in range(cap):
        if not _pass_inplace(m, cum, params.length_m):
            return InflationResult(
                delays_ns=cum / params.mu_m_per_ns,
                cum_adjust_m=cum,
                matrix_m=m,
                n_passes=adjusting,
            )
        adjusting += 1
    raise InflationConvergenceError(
        f"no fixed point after {cap} passes; the instance may cycle "
        "or the cap is too low"
    )
