"""driftscan: embedding drift detection via sliding-window MMD.

Compare a reference set of embedding vectors against a target set with a
kernel two-sample statistic computed over sliding windows, calibrate each
window against a bootstrap null distribution, and extract the window of
samples responsible for the largest drift.
"""

from .embeddings import (
    DataError,
    DatasetPair,
    DegenerateInputError,
    EmbeddingMatrix,
    FormatError,
    ValidationError,
    load_embeddings,
    save_embeddings,
)
from .kernels import KernelSpec, kernel_value, median_heuristic_bandwidth
from .mmd import MmdEstimate, mmd, mmd_oracle
from .prep import BatchConfig, batch_means, shuffle_rows
from .resample import BootstrapResult, RngPolicy, bootstrap_null, combine_under_null
from .scan import (
    DriftReport,
    ScanConfig,
    WindowResult,
    drift_scan,
    extract_cause_samples,
    load_report,
    report_to_dict,
    report_to_json,
    save_report,
)
from .simharness import (
    ClassMixtureSpec,
    MetricSeries,
    auc,
    bce,
    correlation_study,
    generate_mixture,
    null_calibration,
    pearson,
    ratio_drift_study,
)

__version__ = "0.1.0"

__all__ = [
    "BatchConfig",
    "BootstrapResult",
    "ClassMixtureSpec",
    "DataError",
    "DatasetPair",
    "DegenerateInputError",
    "DriftReport",
    "EmbeddingMatrix",
    "FormatError",
    "KernelSpec",
    "MetricSeries",
    "MmdEstimate",
    "RngPolicy",
    "ScanConfig",
    "ValidationError",
    "WindowResult",
    "auc",
    "batch_means",
    "bce",
    "bootstrap_null",
    "combine_under_null",
    "correlation_study",
    "drift_scan",
    "extract_cause_samples",
    "generate_mixture",
    "kernel_value",
    "load_embeddings",
    "load_report",
    "median_heuristic_bandwidth",
    "mmd",
    "mmd_oracle",
    "null_calibration",
    "pearson",
    "ratio_drift_study",
    "report_to_dict",
    "report_to_json",
    "save_embeddings",
    "save_report",
    "shuffle_rows",
]
