"""Schedules, message parameters, and interference evaluation.

A schedule assigns every node a transmit delay (nanoseconds). Packets are
modelled as unit-amplitude rectangular pulses of fixed width, so the packet
from node ``i`` occupies the interval ``[delay_i + d[k][i]/mu,
delay_i + d[k][i]/mu + tau]`` at receiver ``k``. Two packets collide at a
receiver when those intervals overlap; intervals that merely touch
(end == start) do not collide.

Units are fixed throughout the package: meters for distances, nanoseconds
for time, and meters-per-nanosecond for the propagation speed (default
0.3 m/ns, i.e. 3e8 m/s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_MU_M_PER_NS = 0.3
DEFAULT_COLLISION_TOLERANCE_NS = 1e-6
# overlaps below this are treated as exact touching, which rounding cannot
# represent reliably when tight schedules place interval ends together
TOUCH_EPS_NS = 1e-9


@dataclass(frozen=True)
class MessageParams:
    """Packet duration ``tau_ns`` and propagation speed ``mu_m_per_ns``.

    ``length_m`` is the packet width expressed as travelled distance
    (speed times duration); schedules exist to keep same-receiver arrivals
    at least this far apart.
    """

    tau_ns: float
    mu_m_per_ns: float = DEFAULT_MU_M_PER_NS

    def __post_init__(self) -> None:
        if not self.tau_ns > 0:
            raise ValueError(f"tau_ns must be positive, got {self.tau_ns}")
        if not self.mu_m_per_ns > 0:
            raise ValueError(
                f"mu_m_per_ns must be positive, got {self.mu_m_per_ns}"
            )

    @property
    def length_m(self) -> float:
        return self.mu_m_per_ns * self.tau_ns


@dataclass(frozen=True)
class Schedule:
    """Per-node transmit delays in nanoseconds.

    Delays are nonnegative. Solvers produce canonical schedules (minimum
    delay exactly zero); ``canonical()`` shifts an arbitrary schedule into
    that form.
    """

    delays_ns: np.ndarray

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays_ns, dtype=float)
        if delays.ndim != 1 or delays.size < 1:
            raise ValueError("delays_ns must be a 1-D vector")
        if not np.all(np.isfinite(delays)):
            raise ValueError("delays_ns must be finite")
        if np.any(delays < 0):
            raise ValueError("delays_ns must be nonnegative")
        object.__setattr__(self, "delays_ns", delays)

    @property
    def n(self) -> int:
        return self.delays_ns.size

    def canonical(self) -> "Schedule":
        return Schedule(self.delays_ns - self.delays_ns.min())


@dataclass(frozen=True)
class InterferenceReport:
    """Overlap summary for one (distances, schedule) pair.

    ``per_receiver_overlap_ns[k]`` is the total corrupted packet time at
    receiver ``k``: for each arriving packet, the length of its intersection
    with the union of the other packets' intervals, summed over packets.
    ``fraction_clean`` is one minus total corrupted time divided by the
    total packet time ``n*(n-1)*tau`` in one cycle, so it always lies in
    [0, 1] and equals 1 exactly when nothing overlaps.
    """

    per_receiver_overlap_ns: np.ndarray
    total_overlap_ns: float
    fraction_clean: float
    valid: bool
    tolerance_ns: float = DEFAULT_COLLISION_TOLERANCE_NS

    def to_dict(self) -> dict:
        return {
            "per_receiver_overlap_ns": [float(x) for x in self.per_receiver_overlap_ns],
            "total_overlap_ns": float(self.total_overlap_ns),
            "fraction_clean": float(self.fraction_clean),
            "valid": bool(self.valid),
            "tolerance_ns": float(self.tolerance_ns),
        }


@dataclass(frozen=True)
class CdmaConfig:
    """Spread-spectrum comparison settings: shared channel rate and code length.

    ``code_length`` of ``None`` selects the smallest power of two that is at
    least the node count.
    """

    r_b_bps: float = 1e9
    code_length: int | None = None

    def __post_init__(self) -> None:
        if not self.r_b_bps > 0:
            raise ValueError("r_b_bps must be positive")
        if self.code_length is not None and self.code_length <= 0:
            raise ValueError("code_length must be positive")


def _as_square(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    return d


def _as_delays(delays_ns, n: int) -> np.ndarray:
    delays = np.asarray(delays_ns, dtype=float)
    if delays.shape != (n,):
        raise ValueError(
            f"expected {n} delays to match the distance matrix, got shape {delays.shape}"
        )
    return delays


def propagation_delays_ns(d, params: MessageParams) -> np.ndarray:
    """Pairwise propagation delays d/mu in nanoseconds."""
    return _as_square(d) / params.mu_m_per_ns


def arrival_starts_ns(d, delays_ns, params: MessageParams) -> np.ndarray:
    """Matrix S with S[k, i] = start of node i's packet at receiver k.

    The diagonal (a node receiving itself) is meaningless and returned as 0;
    callers must mask it out.
    """
    d = _as_square(d)
    delays = _as_delays(delays_ns, d.shape[0])
    return delays[None, :] + d / params.mu_m_per_ns


def arrival_intervals(d, delays_ns, params: MessageParams):
    """Per-receiver arrival intervals as lists of (sender, start_ns, end_ns)."""
    starts = arrival_starts_ns(d, delays_ns, params)
    n = starts.shape[0]
    out = []
    for k in range(n):
        row = [
            (i, float(starts[k, i]), float(starts[k, i] + params.tau_ns))
            for i in range(n)
            if i != k
        ]
        out.append(row)
    return out


def _offdiag_starts(starts: np.ndarray) -> np.ndarray:
    """Drop the diagonal of (..., n, n) arrival starts -> (..., n, n-1)."""
    n = starts.shape[-1]
    idx = np.array([[i for i in range(n) if i != k] for k in range(n)])
    return starts[..., np.arange(n)[:, None], idx]


def _receiver_overlaps(starts: np.ndarray, tau_ns: float) -> np.ndarray:
    """Corrupted packet time per receiver for batched arrival starts.

    ``starts`` has shape (..., n, n) with the diagonal ignored. All packets
    share the width ``tau_ns``, so a packet's overlap with the union of the
    others is determined by its immediate neighbours in sorted start order.
    Returns shape (..., n).
    """
    n = starts.shape[-1]
    if n < 3:
        # one packet per receiver at most: nothing to overlap with
        return np.zeros(starts.shape[:-1], dtype=float)
    s = np.sort(_offdiag_starts(starts), axis=-1)
    gap = np.diff(s, axis=-1)
    pad = np.full(s.shape[:-1] + (1,), np.inf)
    g_prev = np.concatenate([pad, gap], axis=-1)
    g_next = np.concatenate([gap, pad], axis=-1)
    with np.errstate(invalid="ignore"):
        covered_prev = np.clip(tau_ns - g_prev, 0.0, tau_ns)
        covered_next = np.clip(tau_ns - g_next, 0.0, tau_ns)
        double = np.clip(tau_ns - g_prev - g_next, 0.0, tau_ns)
    corrupted = covered_prev + covered_next - double
    corrupted[corrupted < TOUCH_EPS_NS] = 0.0
    return corrupted.sum(axis=-1)


def evaluate(
    d,
    delays_ns,
    params: MessageParams,
    tolerance_ns: float = DEFAULT_COLLISION_TOLERANCE_NS,
) -> InterferenceReport:
    """Measure packet overlap produced by a schedule on a distance matrix."""
    d = _as_square(d)
    n = d.shape[0]
    starts = arrival_starts_ns(d, delays_ns, params)
    per_receiver = _receiver_overlaps(starts, params.tau_ns)
    total = float(per_receiver.sum())
    fraction = 1.0 - total / (n * (n - 1) * params.tau_ns) if n >= 2 else 1.0
    return InterferenceReport(
        per_receiver_overlap_ns=per_receiver,
        total_overlap_ns=total,
        fraction_clean=float(fraction),
        valid=bool(total <= tolerance_ns),
        tolerance_ns=tolerance_ns,
    )


def report_cycle(d, delays_ns, params: MessageParams) -> float:
    """Time for every node to deliver one packet to every other node.

    Equal to the latest arrival-interval end over all (receiver, sender)
    pairs: max over i != j of (delay_i + d[j][i]/mu) plus tau.
    """
    d = _as_square(d)
    n = d.shape[0]
    delays = _as_delays(delays_ns, n)
    arr = delays[None, :] + d / params.mu_m_per_ns
    mask = ~np.eye(n, dtype=bool)
    return float(arr[mask].max() + params.tau_ns)


def concurrency_ok(d, params: MessageParams) -> bool:
    """True when every receiver already separates every sender pair.

    Checks |d[k][i] - d[k][j]| >= length_m for all distinct i, j, k with
    i, j != k; such a network needs no transmit delays at all.
    """
    d = _as_square(d)
    n = d.shape[0]
    if n < 3:
        return True
    length = params.length_m
    for k in range(n):
        row = np.sort(np.delete(d[k], k))
        if np.any(np.diff(row) < length):
            return False
    return True


def tdma_slot_ns(d, params: MessageParams) -> float:
    """Sequential-TDMA slot duration: worst-case propagation delay plus tau."""
    d = _as_square(d)
    if d.shape[0] < 2:
        raise ValueError("need at least 2 nodes")
    return float(d.max() / params.mu_m_per_ns + params.tau_ns)


def orthogonal_schedule(d, params: MessageParams) -> tuple[np.ndarray, float]:
    """Baseline schedule: node i transmits at i * slot, one slot per node.

    Returns (delays, report cycle) with the report cycle defined as
    n * slot for the n-node network. Collision-free by construction for
    every distance matrix.
    """
    d = _as_square(d)
    n = d.shape[0]
    slot = tdma_slot_ns(d, params)
    delays = np.arange(n, dtype=float) * slot
    return delays, float(n * slot)


def throughput_per_sensor(report_cycle_ns: float, params: MessageParams, r_b_bps: float) -> float:
    """Effective per-node bitrate: channel rate scaled by tau / report cycle."""
    if not report_cycle_ns > 0:
        raise ValueError("report_cycle_ns must be positive")
    return r_b_bps * params.tau_ns / report_cycle_ns


def cdma_code_length(n: int) -> int:
    """Smallest power of two that is at least n (orthogonal code family size)."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 << max(0, (n - 1).bit_length())


def cdma_throughput(d, params: MessageParams, cfg: CdmaConfig) -> float:
    """Per-node bitrate of the code-division comparison scheme.

    All nodes transmit concurrently with spreading codes of length m >= n,
    so each node's effective rate is r_b * tau / (m * slot).
    """
    d = _as_square(d)
    n = d.shape[0]
    m = cfg.code_length if cfg.code_length is not None else cdma_code_length(n)
    if m < n:
        raise ValueError(f"code length {m} must be at least the node count {n}")
    return cfg.r_b_bps * params.tau_ns / (m * tdma_slot_ns(d, params))
