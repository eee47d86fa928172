import json

import numpy as np
import pytest

from driftscan.embeddings import DatasetPair, EmbeddingMatrix, ValidationError
from driftscan.kernels import KernelSpec
from driftscan.scan import (
    ScanConfig,
    drift_scan,
    extract_cause_samples,
    load_report,
    report_from_dict,
    report_to_dict,
    report_to_json,
    save_report,
    windows_to_csv,
)


def gaussian_pair(seed=0, n=64, dims=3, shift=0.0):
    rng = np.random.default_rng(seed)
    ref = EmbeddingMatrix.from_array(rng.standard_normal((n, dims)))
    target = EmbeddingMatrix.from_array(rng.standard_normal((n, dims)) + shift)
    return DatasetPair(ref, target)


FAST = ScanConfig(window=8, bootstraps=20, seed=3)


def test_identical_inputs_all_zero_unflagged():
    rng = np.random.default_rng(1)
    m = EmbeddingMatrix.from_array(rng.standard_normal((40, 4)))
    report = drift_scan(DatasetPair(m, m), FAST)
    assert len(report.windows) == 33
    for w in report.windows:
        assert w.observed_sq == 0.0
        assert w.bootstrap.p_value == 1.0
        assert not w.flagged
    assert report.summary_score == 0.0
    assert report.summary_median == 0.0
    assert report.boot_median_mean >= 0.0
    assert report.argmax_index == FAST.window  # all tied, first window wins


def test_series_length_and_indices_with_stride():
    pair = gaussian_pair(n=50)
    for stride in (1, 3, 7):
        config = ScanConfig(window=8, bootstraps=5, stride=stride, seed=0)
        report = drift_scan(pair, config)
        expected = (50 - 8) // stride + 1
        assert len(report.windows) == expected
        for w in report.windows:
            assert w.t_index - w.start_index + 1 == 8
        assert report.windows[0].t_index == 8
        assert report.windows[-1].t_index == 8 + stride * (expected - 1)


def test_window_larger_than_data_rejected():
    pair = gaussian_pair(n=10)
    with pytest.raises(ValidationError, match="window"):
        drift_scan(pair, ScanConfig(window=16, bootstraps=5))


def test_truncation_to_shorter_side_recorded():
    rng = np.random.default_rng(2)
    ref = EmbeddingMatrix.from_array(rng.standard_normal((40, 2)))
    target = EmbeddingMatrix.from_array(rng.standard_normal((55, 2)))
    report = drift_scan(DatasetPair(ref, target), FAST)
    assert report.scanned_rows == 40
    assert report.truncated
    assert report.windows[-1].t_index == 40


def test_drift_increases_summary_score():
    base = drift_scan(gaussian_pair(seed=5, shift=0.0), FAST).summary_score
    shifted = drift_scan(gaussian_pair(seed=5, shift=2.0), FAST).summary_score
    assert shifted > base


def test_injected_drift_localized_single_seed():
    rng = np.random.default_rng(11)
    n, beta = 120, 16
    ref = rng.standard_normal((n, 4))
    target = rng.standard_normal((n, 4))
    target[60:76] += 8.0  # drift rows, 0-based [60, 76)
    report = drift_scan(
        DatasetPair(EmbeddingMatrix.from_array(ref), EmbeddingMatrix.from_array(target)),
        # p-values bottom out at 1/(bootstraps + 1), so flagging at 0.05 needs >= 19
        ScanConfig(window=beta, bootstraps=19, seed=1),
    )
    start, end = report.cause_target  # 1-based inclusive
    rows = set(range(start - 1, end))
    assert len(rows & set(range(60, 76))) >= beta // 2
    flagged = [w for w in report.windows if w.flagged]
    assert flagged  # a +8 sigma burst must trip the test somewhere


def test_cause_ranges_span_window_and_agree():
    report = drift_scan(gaussian_pair(seed=7), FAST)
    for span in (report.cause_reference, report.cause_target):
        assert span[1] - span[0] + 1 == FAST.window
        assert span[1] == report.argmax_index


def test_extract_cause_samples_shapes_and_boundary():
    pair = gaussian_pair(seed=8, n=30)
    report = drift_scan(pair, FAST)
    target_rows = extract_cause_samples(pair, report, "target")
    assert target_rows.rows == FAST.window and target_rows.dims == pair.target.dims
    ref_rows, targ_rows = extract_cause_samples(pair, report, "both")
    assert ref_rows.rows == FAST.window and targ_rows.rows == FAST.window
    start, end = report.cause_target
    np.testing.assert_array_equal(targ_rows.values, pair.target.values[start - 1 : end])

    # argmax at the first window maps to rows [0, window)
    m = EmbeddingMatrix.from_array(np.random.default_rng(3).standard_normal((20, 2)))
    tied = drift_scan(DatasetPair(m, m), FAST)
    assert tied.argmax_index == FAST.window
    first = extract_cause_samples(DatasetPair(m, m), tied, "reference")
    np.testing.assert_array_equal(first.values, m.values[0 : FAST.window])


def test_extract_rejects_mismatched_pair():
    pair = gaussian_pair(seed=9, n=30)
    report = drift_scan(pair, FAST)
    other = gaussian_pair(seed=9, n=29)
    with pytest.raises(ValidationError, match="does not match"):
        extract_cause_samples(other, report, "target")
    with pytest.raises(ValueError, match="which"):
        extract_cause_samples(pair, report, "everything")


def test_report_json_roundtrip(tmp_path):
    report = drift_scan(gaussian_pair(seed=10), FAST)
    d = report_to_dict(report)
    rebuilt = report_from_dict(json.loads(json.dumps(d)))
    assert report_to_dict(rebuilt) == d

    path = tmp_path / "report.json"
    save_report(report, path)
    assert report_to_dict(load_report(path)) == d


def test_report_schema_fields():
    report = drift_scan(gaussian_pair(seed=12), FAST)
    d = report_to_dict(report)
    for key in (
        "config",
        "bandwidth_used",
        "windows",
        "summary_score",
        "summary_median",
        "argmax_index",
        "cause_reference",
        "cause_target",
    ):
        assert key in d
    w = d["windows"][0]
    assert set(w) == {"t_index", "start_index", "observed_sq", "observed", "boot_median", "p_value", "flagged"}
    assert d["config"]["seed"] == FAST.seed
    assert d["config"]["alpha"] == FAST.alpha


def test_windows_csv_has_config_and_header():
    report = drift_scan(gaussian_pair(seed=13), FAST)
    text = windows_to_csv(report)
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "t_index,observed_sq,boot_median,p_value"
    assert len(lines) == 2 + len(report.windows)


def test_scan_is_deterministic_byte_identical():
    pair = gaussian_pair(seed=14)
    a = report_to_json(drift_scan(pair, FAST))
    b = report_to_json(drift_scan(pair, FAST))
    assert a == b


def test_per_window_bandwidth_policy_runs():
    pair = gaussian_pair(seed=15, n=24)
    config = ScanConfig(window=8, bootstraps=5, kernel=KernelSpec("rbf", "median-window"), seed=0)
    report = drift_scan(pair, config)
    assert report.bandwidth_used is None  # no single global bandwidth
    assert all(np.isfinite(w.observed_sq) for w in report.windows)


def test_linear_kernel_scan_runs():
    pair = gaussian_pair(seed=16, n=24)
    report = drift_scan(pair, ScanConfig(window=8, bootstraps=5, kernel=KernelSpec("linear"), seed=0))
    assert report.bandwidth_used is None


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(window=1)
    with pytest.raises(ValueError):
        ScanConfig(bootstraps=0)
    with pytest.raises(ValueError):
        ScanConfig(stride=0)
    with pytest.raises(ValueError):
        ScanConfig(alpha=1.0)
    with pytest.raises(ValueError):
        ScanConfig(estimator="robust")
    with pytest.raises(ValueError):
        ScanConfig(seed=-5)
