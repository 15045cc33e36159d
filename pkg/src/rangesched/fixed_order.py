"""Closed-form scheduling for a fixed transmission order.

Once the order in which nodes transmit (and therefore the order in which
their packets must arrive at every receiver) is fixed, the minimal delays
have a closed form: the first node transmits at zero, and each subsequent
node transmits as early as the pairwise separation constraints allow,

    delay[next] = max(0, delay[prev] + max over other receivers k of
                      (prop_delay[k][prev] - prop_delay[k][next]) + tau).

Each delay is tight against either the nonnegativity bound or one receiver's
separation constraint, so no delay can be reduced without creating a
collision. Consecutive tightness also guarantees that packets two positions
apart never collide at the node between them.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .core import MessageParams, report_cycle


def _check_order(order, n: int) -> np.ndarray:
    order = np.asarray(order, dtype=int)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}, got {order}")
    return order


def fixed_order_delays(d, params: MessageParams, order: Sequence[int] | None = None) -> np.ndarray:
    """Minimal collision-free delays for the given transmission order.

    ``order`` defaults to node-index order. Returns delays indexed by node.
    For n == 2 no third receiver exists, so both delays are zero.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    order = _check_order(order if order is not None else range(n), n)
    prop = d / params.mu_m_per_ns
    delays = np.zeros(n, dtype=float)
    pos_delay = 0.0
    for m in range(1, n):
        a, b = order[m - 1], order[m]
        mask = np.ones(n, dtype=bool)
        mask[[a, b]] = False
        if mask.any():
            gap = float((prop[mask, a] - prop[mask, b]).max()) + params.tau_ns
        else:
            gap = -np.inf
        pos_delay = max(0.0, pos_delay + gap)
        delays[b] = pos_delay
    return delays


def best_over_orders(
    d, params: MessageParams, orders: Iterable[Sequence[int]]
) -> tuple[tuple[int, ...], np.ndarray]:
    """Pick the order with the smallest report cycle from a candidate list.

    Ties break toward the lexicographically smallest order tuple.
    """
    best = None
    for order in orders:
        order_t = tuple(int(x) for x in order)
        delays = fixed_order_delays(d, params, order_t)
        t_r = report_cycle(d, delays, params)
        key = (t_r, order_t)
        if best is None or key < best[0]:
            best = (key, delays)
    if best is None:
        raise ValueError("orders must be nonempty")
    (_, order_t), delays = best
    return order_t, delays


def all_orders(n: int):
    """All n! transmission orders (use only for small n)."""
    return permutations(range(n))
