"""Bootstrap null distribution for the two-sample drift statistic.

Under the no-drift hypothesis the two windows are pooled, and bootstrap
draws (sampling rows with replacement) from the pool are split into two
blocks whose MMD^2 forms the null distribution. The observed statistic's
p-value is its add-one-smoothed rank within that distribution.

Two split policies:

* ``paired_halves`` (default): the two blocks each have ``half_size`` rows,
  the same size as the observed windows, so the null is computed at the same
  sample size as the statistic it calibrates.
* ``literal_quarter``: blocks of ``half_size // 2`` rows each, i.e. the
  first and second half of the leading ``half_size`` rows of the draw.
  Kept selectable because the smaller blocks widen the null.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingMatrix, ValidationError
from .kernels import KernelSpec, kernel_matrix, resolve_bandwidth
from .mmd import ESTIMATORS, mmd_sq_from_gram
from .rng import RngPolicy

SPLIT_POLICIES = ("paired_halves", "literal_quarter")

#: purpose tag for bootstrap streams; iteration i of window w draws from
#: (base_seed, BOOTSTRAP_TAG, w, i)
BOOTSTRAP_TAG = "bootstrap"


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    """Null statistics for one window.

    ``stats`` holds the k bootstrapped MMD^2 values, ``median`` their exact
    order-statistic median (mean of the two middles for even k), and
    ``p_value`` the add-one-smoothed tail probability of the observed
    statistic: (1 + #{stats >= observed}) / (k + 1), never zero.
    """

    stats: np.ndarray = field(repr=False)
    median: float
    p_value: float

    def __post_init__(self) -> None:
        self.stats.flags.writeable = False


def combine_under_null(q1: EmbeddingMatrix, q2: EmbeddingMatrix) -> EmbeddingMatrix:
    """Pool two samples: row-wise concatenation, q1 rows first."""
    if q1.dims != q2.dims:
        raise ValidationError(f"dimension mismatch: {q1.dims} vs {q2.dims}")
    if q1.rows == 0:
        return q2
    if q2.rows == 0:
        return q1
    out = np.vstack([q1.values, q2.values])
    out.flags.writeable = False
    return EmbeddingMatrix(out)


def _block_size(half_size: int, split_policy: str) -> int:
    if split_policy not in SPLIT_POLICIES:
        raise ValueError(f"unknown split policy {split_policy!r}, expected one of {SPLIT_POLICIES}")
    if half_size < 1:
        raise ValidationError(f"half_size must be >= 1, got {half_size}")
    return half_size if split_policy == "paired_halves" else half_size // 2


def bootstrap_null(
    spec: KernelSpec,
    t: EmbeddingMatrix,
    half_size: int,
    k: int,
    rng: RngPolicy,
    split_policy: str = "paired_halves",
    observed: float = 0.0,
    estimator: str = "biased",
    bandwidth: float | None = None,
    window_index: int = 0,
) -> BootstrapResult:
    """Bootstrap the null distribution of MMD^2 over the pooled rows ``t``.

    Each of the k iterations draws ``t.rows`` row indices with replacement
    using its own stream derived from (rng.base_seed, "bootstrap",
    window_index, iteration), so the stats list is identical however the
    iterations are scheduled. The kernel Gram matrix of the pool is computed
    once; iterations index into it.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}, expected one of {ESTIMATORS}")
    if k < 1:
        raise ValidationError(f"bootstrap count must be >= 1, got {k}")
    block = _block_size(half_size, split_policy)
    if block < 1:
        raise ValidationError(f"split {split_policy!r} with half_size {half_size} leaves empty blocks")
    if estimator == "unbiased" and block < 2:
        raise ValidationError("unbiased estimator needs blocks of >= 2 rows")
    n = t.rows
    if n < 2 * block:
        raise ValidationError(
            f"pool has {n} rows but split {split_policy!r} with half_size {half_size} needs >= {2 * block}"
        )

    pool = t.as_float64()
    if bandwidth is None:
        bandwidth = resolve_bandwidth(spec, pool)
    gram = kernel_matrix(spec, bandwidth, pool, pool)

    stats = np.empty(k, dtype=np.float64)
    for i in range(k):
        stream = rng.stream(BOOTSTRAP_TAG, window_index, i)
        idx = stream.integers(0, n, size=n)
        b1 = idx[:block]
        b2 = idx[block : 2 * block]
        stats[i] = mmd_sq_from_gram(
            gram[np.ix_(b1, b1)], gram[np.ix_(b2, b2)], gram[np.ix_(b1, b2)], estimator
        )

    median = float(np.median(stats))
    p_value = (1.0 + float(np.count_nonzero(stats >= observed))) / (k + 1.0)
    return BootstrapResult(stats=stats, median=median, p_value=p_value)
