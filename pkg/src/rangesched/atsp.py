"""Ordering transmissions by solving an asymmetric TSP over delay costs.

The minimal spacing between consecutive transmissions of nodes i then j is

    cost[i][j] = max over receivers k not in {i, j} of
                 (prop_delay[k][i] - prop_delay[k][j]) + tau,

so the time between two transmissions of the same node in a cyclic schedule
is exactly the cost of a tour through all nodes. A cheap tour is found
either exactly (dynamic programming over subsets, small n) or by multi-start
local search (nearest-neighbour construction improved with segment
relocation and directed two-edge exchange, both evaluated with asymmetric
costs). The cyclic tour is then broken into the linear schedule, trying all
rotations and keeping the one with the smallest report cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MessageParams


@dataclass(frozen=True)
class TspInstance:
    """Pairwise transmission-spacing costs in nanoseconds."""

    costs_ns: np.ndarray
    tau_ns: float

    @property
    def n(self) -> int:
        return self.costs_ns.shape[0]


@dataclass(frozen=True)
class Tour:
    """Cyclic visiting order and its total cost (wrap-around included)."""

    order: tuple[int, ...]
    cost_ns: float


def cost_matrix(d, params: MessageParams) -> TspInstance:
    """Build the spacing-cost matrix; needs at least 3 nodes.

    With 2 nodes there is no third receiver to constrain the spacing, so the
    tour formulation does not apply; schedule those directly.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n < 3:
        raise ValueError("cost matrix needs at least 3 nodes")
    prop = d / params.mu_m_per_ns
    diff = prop[:, :, None] - prop[:, None, :]  # (k, i, j)
    k_idx = np.arange(n)
    diff[k_idx, k_idx, :] = -np.inf
    diff[k_idx, :, k_idx] = -np.inf
    costs = diff.max(axis=0) + params.tau_ns
    np.fill_diagonal(costs, 0.0)
    return TspInstance(costs_ns=costs, tau_ns=params.tau_ns)


def tour_cost(costs: np.ndarray, order: Sequence[int]) -> float:
    order = np.asarray(order, dtype=int)
    return float(costs[order, np.roll(order, -1)].sum())


def _canonical(order: Sequence[int]) -> tuple[int, ...]:
    """Rotate a cyclic order so it starts at node 0."""
    order = [int(x) for x in order]
    k = order.index(0)
    return tuple(order[k:] + order[:k])


def solve_exact(inst: TspInstance, max_nodes: int = 13) -> Tour:
    """Minimum-cost tour by dynamic programming over subsets.

    Exponential in n; refuses networks above ``max_nodes``. Ties break
    deterministically toward lower node indices.
    """
    c = inst.costs_ns
    n = inst.n
    if n > max_nodes:
        raise ValueError(f"exact solver limited to {max_nodes} nodes (got {n})")
    if n < 3:
        raise ValueError("tours need at least 3 nodes")
    m = n - 1  # nodes 1..n-1, bit j <-> node j+1
    full = (1 << m) - 1
    dp = np.full((full + 1, m), np.inf)
    parent = np.full((full + 1, m), -1, dtype=int)
    sub = c[1:, 1:]  # cost between non-start nodes
    for j in range(m):
        dp[1 << j, j] = c[0, j + 1]
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        for j in range(m):
            if not mask & (1 << j):
                continue
            prev = mask ^ (1 << j)
            cand = dp[prev] + sub[:, j]
            i = int(np.argmin(cand))
            dp[mask, j] = cand[i]
            parent[mask, j] = i
    closing = dp[full] + c[1:, 0]
    j = int(np.argmin(closing))
    best_cost = float(closing[j])
    seq = []
    mask = full
    while j >= 0:
        seq.append(j + 1)
        mask, j = mask ^ (1 << j), int(parent[mask, j])
    order = (0, *reversed(seq))
    return Tour(order=order, cost_ns=best_cost)


def _nearest_neighbour(c: np.ndarray, start: int) -> np.ndarray:
    n = c.shape[0]
    tour = np.empty(n, dtype=int)
    tour[0] = start
    remaining = np.full(n, True)
    remaining[start] = False
    cur = start
    for m in range(1, n):
        row = np.where(remaining, c[cur], np.inf)
        cur = int(np.argmin(row))
        tour[m] = cur
        remaining[cur] = False
    return tour


def _two_opt_deltas(pm, fwd_pref, rev_pref):
    """Cost change of reversing tour[i..j] for all 1 <= i < j <= n-1.

    Reversal flips the direction of the inner edges, so the reversed-edge
    prefix sums make each candidate O(1) despite the asymmetric costs.
    """
    n = pm.shape[0]
    i = np.arange(1, n)
    jj = np.arange(1, n)
    j_next = (jj + 1) % n
    new_in = pm[i - 1][:, 1:]  # c[t[i-1], t[j]]
    new_out = pm[1:, :][:, j_next]  # c[t[i], t[j+1]]
    rev_seg = rev_pref[jj][None, :] - rev_pref[i][:, None]
    old_seg = fwd_pref[jj + 1][None, :] - fwd_pref[i - 1][:, None]
    delta = new_in + rev_seg + new_out - old_seg
    delta[i[:, None] > jj[None, :]] = np.inf
    np.fill_diagonal(delta, np.inf)  # i == j is a no-op
    return delta


def _or_opt_deltas(pm, seg_len):
    """Cost change of relocating tour[i..i+s-1] to sit after position j.

    The segment keeps its direction, so the move is exact for asymmetric
    costs. Position 0 stays anchored (rotations are reconsidered later).
    """
    n = pm.shape[0]
    s = seg_len
    if n < s + 2:
        return None, None, None
    i = np.arange(1, n - s + 1)
    nxt = (i + s) % n
    removal = pm[i - 1, i] + pm[i + s - 1, nxt] - pm[i - 1, nxt]
    j = np.arange(n)
    j_next = (j + 1) % n
    ins = pm[np.ix_(j, i)].T + pm[i + s - 1][:, j_next] - pm[j, j_next][None, :]
    delta = ins - removal[:, None]
    bad = (j[None, :] >= i[:, None] - 1) & (j[None, :] <= (i + s - 1)[:, None])
    delta[bad] = np.inf
    return delta, i, j


def _local_search(c: np.ndarray, tour: np.ndarray) -> np.ndarray:
    n = tour.size
    while True:
        pm = c[np.ix_(tour, tour)]
        fwd = pm[np.arange(n), np.roll(np.arange(n), -1)]
        rev = pm[np.roll(np.arange(n), -1), np.arange(n)]
        fwd_pref = np.concatenate([[0.0], np.cumsum(fwd)])
        rev_pref = np.concatenate([[0.0], np.cumsum(rev)])

        best_delta = -1e-9
        best_move = None
        d2 = _two_opt_deltas(pm, fwd_pref, rev_pref)
        m = np.unravel_index(np.argmin(d2), d2.shape)
        if d2[m] < best_delta:
            best_delta = d2[m]
            best_move = ("2opt", m[0] + 1, m[1] + 1)
        for s in (1, 2, 3):
            ds, i_pos, j_pos = _or_opt_deltas(pm, s)
            if ds is None:
                continue
            m = np.unravel_index(np.argmin(ds), ds.shape)
            if ds[m] < best_delta:
                best_delta = ds[m]
                best_move = ("oropt", s, int(i_pos[m[0]]), int(j_pos[m[1]]))

        if best_move is None:
            return tour
        if best_move[0] == "2opt":
            _, i, j = best_move
            tour = np.concatenate([tour[:i], tour[i : j + 1][::-1], tour[j + 1 :]])
        else:
            _, s, i, j = best_move
            seg = tour[i : i + s]
            rest = np.concatenate([tour[:i], tour[i + s :]])
            # j indexes the original tour; map to the shrunk one
            j_rest = j if j < i else j - s
            tour = np.concatenate([rest[: j_rest + 1], seg, rest[j_rest + 1 :]])


def _double_bridge(tour: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Classic 4-segment reconnection A-C-B-D; keeps every segment's direction."""
    n = tour.size
    p = np.sort(rng.choice(np.arange(1, n), size=3, replace=False))
    return np.concatenate([tour[: p[0]], tour[p[1] : p[2]], tour[p[0] : p[1]], tour[p[2] :]])


def solve_heuristic(
    inst: TspInstance, seed: int = 0, restarts: int = 8, kicks: int = 12
) -> Tour:
    """Good tour via seeded multi-start local search with restart kicks.

    Each restart runs nearest-neighbour construction, local search, then
    ``kicks`` rounds of double-bridge perturbation plus re-optimization,
    keeping improvements. Deterministic for a fixed (instance, seed,
    restarts, kicks): randomness comes only from the seeded generator and
    tie-breaks are by tour lexicographic order. Needs at least 4 nodes; use
    the exact solver below that.
    """
    c = inst.costs_ns
    n = inst.n
    if n < 4:
        raise ValueError("heuristic needs at least 4 nodes; use solve_exact")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if kicks < 0:
        raise ValueError("kicks must be nonnegative")
    rng = np.random.default_rng(seed)
    starts = [int(s) for s in rng.permutation(n)[:restarts]]
    while len(starts) < restarts:
        starts.append(int(rng.integers(n)))
    best: tuple[float, tuple[int, ...]] | None = None
    for start in starts:
        tour = _local_search(c, _nearest_neighbour(c, start))
        cur_cost = tour_cost(c, tour)
        for _ in range(kicks):
            cand = _local_search(c, _double_bridge(tour, rng))
            cand_cost = tour_cost(c, cand)
            if cand_cost < cur_cost - 1e-9:
                tour, cur_cost = cand, cand_cost
        order = _canonical(tour)
        key = (round(tour_cost(c, order), 9), order)
        if best is None or key < best:
            best = key
    assert best is not None
    return Tour(order=best[1], cost_ns=tour_cost(c, best[1]))


def rotation_schedule(
    d, params: MessageParams, tour: Tour, costs_ns: np.ndarray | None = None
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Break a cyclic tour into the best linear schedule.

    Every rotation of the tour is turned into delays with the fixed-order
    recursion (the precomputed spacing costs are exactly the recursion's
    per-pair terms), and the rotation with the smallest report cycle wins.
    Ties go to the rotation starting at the lowest node index.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if costs_ns is None:
        costs_ns = cost_matrix(d, params).costs_ns
    prop = d / params.mu_m_per_ns
    col_max = np.array([np.delete(prop[:, i], i).max() for i in range(n)])
    order = list(tour.order)
    best_key = None
    best = None
    for r in range(n):
        lin = order[r:] + order[:r]
        delays = np.zeros(n)
        pos = 0.0
        for a, b in zip(lin, lin[1:]):
            pos = max(0.0, pos + costs_ns[a, b])
            delays[b] = pos
        t_r = float((delays + col_max).max() + params.tau_ns)
        key = (t_r, lin[0])
        if best_key is None or key < best_key:
            best_key = key
            best = (delays, tuple(lin))
    assert best is not None
    return best
