"""Random node placements and validated distance matrices.

Topologies are planar point sets. Two generators are provided: a single
Gaussian cloud, and a two-component Gaussian mixture where each node is an
"outlier" (drawn with a larger spread) with some probability. Generation is
driven by numpy's PCG64 generator, so identical (config, seed) pairs give
bit-identical coordinates on every platform.

Solvers never look at coordinates, only at the pairwise distance matrix, so
externally measured ranges can be fed in through ``validate_distance_matrix``
without any geometric consistency requirement beyond symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_RTOL = 1e-9


@dataclass(frozen=True)
class TopologyConfig:
    """Generator settings: node count, spreads, outlier probability, seed."""

    n: int
    sigma_m: float
    sigma_outlier_m: float | None = None
    outlier_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n}")
        if not self.sigma_m > 0:
            raise ValueError(f"sigma_m must be positive, got {self.sigma_m}")
        if not 0.0 <= self.outlier_prob <= 1.0:
            raise ValueError(f"outlier_prob must lie in [0, 1], got {self.outlier_prob}")
        if self.outlier_prob > 0:
            if self.sigma_outlier_m is None:
                raise ValueError("sigma_outlier_m is required when outlier_prob > 0")
            if self.sigma_outlier_m < self.sigma_m:
                raise ValueError("sigma_outlier_m must be at least sigma_m")


@dataclass(frozen=True)
class Topology:
    """Planar node coordinates, shape (n, 2), meters."""

    positions_m: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions_m, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 2:
            raise ValueError(f"positions must have shape (n>=2, 2), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "positions_m", pos)

    @property
    def n(self) -> int:
        return self.positions_m.shape[0]


def _sample(cfg: TopologyConfig) -> Topology:
    # One uniform per node decides the mixture component, then one standard
    # normal pair per node is scaled; with outlier_prob == 0 the stream is
    # identical to the plain Gaussian case.
    rng = np.random.default_rng(cfg.seed)
    u = rng.random(cfg.n)
    z = rng.standard_normal((cfg.n, 2))
    sigma_o = cfg.sigma_outlier_m if cfg.sigma_outlier_m is not None else cfg.sigma_m
    scale = np.where(u < cfg.outlier_prob, sigma_o, cfg.sigma_m)
    return Topology(z * scale[:, None])


def generate_gaussian(cfg: TopologyConfig) -> Topology:
    """Scatter n nodes with i.i.d. Normal(0, sigma^2) coordinates."""
    if cfg.outlier_prob != 0.0:
        raise ValueError("generate_gaussian requires outlier_prob == 0")
    return _sample(cfg)


def generate_mixture(cfg: TopologyConfig) -> Topology:
    """Scatter n nodes from the two-spread Gaussian mixture.

    Each node uses the outlier spread with probability ``outlier_prob`` and
    the base spread otherwise. With ``outlier_prob == 0`` this collapses to
    ``generate_gaussian`` for the same seed.
    """
    return _sample(cfg)


def is_outlier_draw(cfg: TopologyConfig) -> np.ndarray:
    """Boolean outlier mask the generator used for this config (same stream)."""
    rng = np.random.default_rng(cfg.seed)
    return rng.random(cfg.n) < cfg.outlier_prob


def distances(topo: Topology) -> np.ndarray:
    """Euclidean pairwise distance matrix; exactly symmetric, zero diagonal."""
    pos = topo.positions_m
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def validate_distance_matrix(d, *, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Check a distance matrix supplied without coordinates.

    Requires a square matrix with finite nonnegative entries, a zero
    diagonal, and symmetry within ``rtol`` relative to the largest entry.
    Asymmetry beyond the tolerance is an error rather than being averaged
    away. No triangle inequality is imposed: solvers consume delays, not
    geometry, and measured ranges may violate it.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] < 2:
        raise ValueError("need at least 2 nodes")
    if not np.all(np.isfinite(d)):
        raise ValueError("distance matrix entries must be finite")
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise ValueError(f"negative distance at ({i}, {j}): {d[i, j]}")
    if np.any(np.diag(d) != 0):
        k = int(np.argwhere(np.diag(d) != 0)[0][0])
        raise ValueError(f"nonzero diagonal at node {k}: {d[k, k]}")
    scale = float(d.max())
    tol = rtol * scale if scale > 0 else 0.0
    asym = np.abs(d - d.T)
    if np.any(asym > tol):
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise ValueError(
            f"asymmetric distances at ({i}, {j}): {d[i, j]} vs {d[j, i]} "
            f"(tolerance {tol})"
        )
    return d
