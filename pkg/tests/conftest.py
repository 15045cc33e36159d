"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from rangesched import MessageParams

# Reference 3-node network used throughout: pairwise distances 9.5 / 11 /
# 10.5 m with 10 ns packets at 0.3 m/ns, so the packet spans 3 m of path.
TRIANGLE_D = np.array(
    [
        [0.0, 9.5, 10.5],
        [9.5, 0.0, 11.0],
        [10.5, 11.0, 0.0],
    ]
)


@pytest.fixture()
def params() -> MessageParams:
    return MessageParams(tau_ns=10.0)


@pytest.fixture()
def triangle() -> np.ndarray:
    return TRIANGLE_D.copy()


def brute_force_overlaps(d, delays_ns, params) -> list[float]:
    """Corrupted packet time per receiver, by explicit interval merging.

    Independent of the production implementation: builds every arrival
    interval, intersects each packet with every other packet, merges the
    intersection segments, and sums their lengths.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    out = []
    for k in range(n):
        intervals = []
        for i in range(n):
            if i == k:
                continue
            start = delays_ns[i] + d[k, i] / params.mu_m_per_ns
            intervals.append((start, start + params.tau_ns))
        total = 0.0
        for a, (s0, e0) in enumerate(intervals):
            segments = []
            for b, (s1, e1) in enumerate(intervals):
                if a == b:
                    continue
                lo, hi = max(s0, s1), min(e0, e1)
                if hi > lo:
                    segments.append((lo, hi))
            segments.sort()
            cur = None
            for lo, hi in segments:
                if cur is None:
                    cur = [lo, hi]
                elif lo <= cur[1]:
                    cur[1] = max(cur[1], hi)
                else:
                    total += cur[1] - cur[0]
                    cur = [lo, hi]
            if cur is not None:
                total += cur[1] - cur[0]
        out.append(total)
    return out
