"""Kernel functions and bandwidth selection.

The RBF kernel here is exp(-||x - y||^2 / (2 * bandwidth^2)), so the
bandwidth is a length scale, not a variance. The default bandwidth policy is
the median heuristic: the median of all pairwise Euclidean distances over the
pooled samples, computed once before a scan so that per-window statistics are
comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .embeddings import DegenerateInputError, EmbeddingMatrix

FAMILIES = ("rbf", "linear")

#: bandwidth policy names (a positive float is also accepted, as a fixed value)
MEDIAN_GLOBAL = "median"
MEDIAN_PER_WINDOW = "median-window"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth policy.

    ``bandwidth`` is ``"median"`` (median heuristic over the full pooled
    data, resolved once per scan), ``"median-window"`` (recomputed per
    window), or a fixed positive float. The linear kernel ignores it.
    """

    family: str = "rbf"
    bandwidth: str | float = MEDIAN_GLOBAL

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}, expected one of {FAMILIES}")
        bw = self.bandwidth
        if isinstance(bw, str):
            if bw not in (MEDIAN_GLOBAL, MEDIAN_PER_WINDOW):
                raise ValueError(f"unknown bandwidth policy {bw!r}")
        else:
            if not (isinstance(bw, (int, float)) and np.isfinite(bw) and bw > 0):
                raise ValueError(f"fixed bandwidth must be a positive finite number, got {bw!r}")

    @property
    def needs_bandwidth(self) -> bool:
        return self.family == "rbf"

    @property
    def per_window_bandwidth(self) -> bool:
        return self.needs_bandwidth and self.bandwidth == MEDIAN_PER_WINDOW


def kernel_value(spec: KernelSpec, bandwidth: float | None, x, y) -> float:
    """Evaluate the kernel on two vectors with an already-resolved bandwidth."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ValueError(f"x and y must be vectors of equal length, got {xv.shape} and {yv.shape}")
    if spec.family == "linear":
        return float(np.dot(xv, yv))
    if bandwidth is None or bandwidth <= 0:
        raise ValueError(f"rbf kernel needs a positive bandwidth, got {bandwidth!r}")
    diff = xv - yv
    return float(np.exp(-np.dot(diff, diff) / (2.0 * bandwidth * bandwidth)))


def kernel_matrix(spec: KernelSpec, bandwidth: float | None, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kernel Gram matrix between row sets ``x`` (n, d) and ``y`` (m, d).

    Inputs are float64 arrays. The linear kernel deliberately avoids BLAS
    matmul so results are bit-identical regardless of thread count.
    """
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if spec.family == "linear":
        return np.einsum("id,jd->ij", x, y, optimize=False)
    if bandwidth is None or bandwidth <= 0:
        raise ValueError(f"rbf kernel needs a positive bandwidth, got {bandwidth!r}")
    sq = cdist(x, y, "sqeuclidean")
    return np.exp(sq / (-2.0 * bandwidth * bandwidth))


def median_heuristic_bandwidth(samples: EmbeddingMatrix | np.ndarray) -> float:
    """Median pairwise Euclidean distance over distinct row pairs i < j.

    Deterministic: for an even number of pairs the lower of the two middle
    values is returned. Raises :class:`DegenerateInputError` when fewer than
    two rows are given or every pairwise distance is zero; callers should
    fall back to a fixed bandwidth in that case.
    """
    x = samples.as_float64() if isinstance(samples, EmbeddingMatrix) else np.asarray(samples, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise DegenerateInputError(f"median heuristic needs >= 2 rows, got {n}")
    d = pdist(x, "euclidean")
    k = (d.size - 1) // 2  # lower middle for even counts
    med = float(np.partition(d, k)[k])
    if med <= 0.0:
        raise DegenerateInputError("median pairwise distance is zero; supply a fixed bandwidth")
    return med


def resolve_bandwidth(spec: KernelSpec, pooled: np.ndarray) -> float | None:
    """Bandwidth to use for ``pooled`` rows under ``spec``'s policy.

    Returns None for kernels that take no bandwidth.
    """
    if not spec.needs_bandwidth:
        return None
    if isinstance(spec.bandwidth, (int, float)):
        return float(spec.bandwidth)
    return median_heuristic_bandwidth(pooled)
