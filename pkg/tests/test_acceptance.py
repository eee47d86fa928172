"""Acceptance suite: one test per release criterion.

Each test prints a single pass/fail line (visible with ``pytest -s`` or in
captured output on failure) and enforces the criterion's tolerances and,
where stated, its runtime bound.
"""

import subprocess
import sys
import time

import numpy as np

from driftscan.embeddings import (
    DatasetPair,
    DegenerateInputError,
    EmbeddingMatrix,
    FormatError,
    ValidationError,
    load_embeddings,
    save_embeddings,
)
from driftscan.kernels import KernelSpec, median_heuristic_bandwidth
from driftscan.mmd import mmd, mmd_oracle
from driftscan.rng import derive_rng
from driftscan.scan import ScanConfig, drift_scan
from driftscan.simharness import axis_mixture_spec, correlation_study, null_calibration, ratio_drift_study


def record(number: int, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {number} ({name}): {status} [{detail}]", flush=True)
    assert ok, f"criterion {number} ({name}): {detail}"


def test_c1_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    kernels = (KernelSpec("rbf", "median"), KernelSpec("linear"))
    estimators = ("biased", "unbiased")
    worst = 0.0
    for i in range(50):
        rows1 = int(rng.integers(2, 65))
        rows2 = int(rng.integers(2, 65))
        dims = int(rng.integers(1, 17))
        q1 = EmbeddingMatrix.from_array(rng.standard_normal((rows1, dims)))
        q2 = EmbeddingMatrix.from_array(rng.standard_normal((rows2, dims)))
        spec = kernels[i % 2]
        estimator = estimators[(i // 2) % 2]
        fast = mmd(spec, q1, q2, estimator).squared
        slow = mmd_oracle(spec, q1, q2, estimator).squared
        if abs(slow) < 1e-2:
            ok = abs(fast - slow) <= 1e-12
            worst = max(worst, abs(fast - slow))
        else:
            rel = abs(fast - slow) / abs(slow)
            ok = rel <= 1e-10
            worst = max(worst, rel)
        assert ok, f"instance {i}: fast={fast!r} oracle={slow!r}"
    elapsed = time.perf_counter() - start
    record(1, "oracle equivalence", elapsed < 5.0,
           f"50 instances agree, worst deviation {worst:.2e}, {elapsed:.2f}s < 5s")


def test_c2_null_calibration():
    start = time.perf_counter()
    result = null_calibration(trials=200, n=512, dims=8, window=32, bootstraps=199,
                              alpha=0.05, seed=2002)
    elapsed = time.perf_counter() - start
    ok = 0.02 <= result.rate <= 0.10 and elapsed < 60.0
    record(2, "null calibration", ok,
           f"rejection rate {result.rate:.3f} in [0.02, 0.10], {elapsed:.1f}s < 60s")


def test_c3_unbiasedness():
    rng = np.random.default_rng(3003)
    spec = KernelSpec("rbf", 1.0)
    values = np.empty(500)
    for i in range(500):
        q1 = EmbeddingMatrix.from_array(rng.standard_normal((16, 4)))
        q2 = EmbeddingMatrix.from_array(rng.standard_normal((16, 4)))
        values[i] = mmd(spec, q1, q2, "unbiased").squared
    mean = float(values.mean())
    se = float(values.std(ddof=1)) / np.sqrt(500)
    record(3, "unbiasedness", abs(mean) <= 3 * se,
           f"mean {mean:.2e} within 3 SE ({3 * se:.2e}) of 0 over 500 trials")


def test_c4_monotone_drift_response():
    config = ScanConfig(window=32, bootstraps=50, seed=4004)
    scores = []
    for shift in (0.0, 1.0, 2.0, 4.0):
        data_rng = derive_rng(4004, "ladder", int(shift * 1000))
        ref = data_rng.standard_normal((2000, 8))
        target = data_rng.standard_normal((2000, 8))
        target[:, 0] += shift  # mean shift of `shift` sigma along one axis
        report = drift_scan(
            DatasetPair(EmbeddingMatrix.from_array(ref), EmbeddingMatrix.from_array(target)),
            config,
        )
        scores.append(report.summary_score)
    increasing = all(a < b for a, b in zip(scores, scores[1:]))
    record(4, "monotone drift response", increasing,
           "summary scores " + " < ".join(f"{s:.4f}" for s in scores))


def test_c5_ratio_drift_shape():
    start = time.perf_counter()
    base = axis_mixture_spec(dims=16, n=5000, positive_fraction=0.5, seed=7, scale=1.0, separation=4.0)
    scan = ScanConfig(window=32, bootstraps=50, seed=7)
    fractions = [0.1, 0.3, 0.5, 0.7, 0.9]
    table = dict(ratio_drift_study(base, fractions, scan, batch_size=64))
    elapsed = time.perf_counter() - start
    minimum_at_center = min(table, key=table.get) == 0.5
    endpoints = table[0.1] > 3 * table[0.5] and table[0.9] > 3 * table[0.5]
    symmetric = abs(table[0.3] - table[0.7]) <= 0.25 * max(table[0.3], table[0.7])
    ok = minimum_at_center and endpoints and symmetric and elapsed < 120.0
    detail = (
        "scores " + ", ".join(f"{f}:{table[f]:.4f}" for f in fractions)
        + f"; min at 0.5={minimum_at_center}, endpoints>3x={endpoints}, "
        + f"0.3~0.7 within 25%={symmetric}, {elapsed:.1f}s < 120s"
    )
    record(5, "ratio-drift shape", ok, detail)


def test_c6_correlation_shape():
    profile = np.linspace(0.0, 3.0, 12)
    series, corr_bce, corr_auc = correlation_study(
        buckets=12,
        drift_profile=profile,
        scan=ScanConfig(window=32, bootstraps=50, seed=6006),
        seed=6006,
        dims=16,
        n=4096,
        batch_size=64,
    )
    ok = corr_bce > 0.6 and corr_auc < -0.5
    record(6, "drift/performance correlation", ok,
           f"pearson(drift, bce)={corr_bce:.3f} > 0.6, pearson(drift, auc)={corr_auc:.3f} < -0.5")


def test_c7_localization():
    beta = 32
    hits = 0
    for trial in range(20):
        data_rng = derive_rng(7007, "localization", trial)
        ref = data_rng.standard_normal((200, 8))
        target = ref.copy()
        replacement = data_rng.standard_normal((beta, 8))
        replacement[:, 0] += 10.0  # +10 sigma burst
        target[100 : 100 + beta] = replacement
        report = drift_scan(
            DatasetPair(EmbeddingMatrix.from_array(ref), EmbeddingMatrix.from_array(target)),
            ScanConfig(window=beta, bootstraps=50, seed=trial),
        )
        start, end = report.cause_target  # 1-based inclusive
        cause_rows = set(range(start - 1, end))
        drift_rows = set(range(100, 100 + beta))
        if len(cause_rows & drift_rows) >= beta / 2:
            hits += 1
    record(7, "drift-cause localization", hits >= 18, f"{hits}/20 trials with >= 50% overlap")


def _run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "driftscan", *args],
        cwd=cwd,
        capture_output=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr.decode()
    return proc.stdout


def test_c8_cli_determinism(tmp_path):
    rng = np.random.default_rng(88)
    save_embeddings(EmbeddingMatrix.from_array(rng.standard_normal((48, 4))), tmp_path / "ref.csv", "csv")
    save_embeddings(EmbeddingMatrix.from_array(rng.standard_normal((48, 4)) + 0.5),
                    tmp_path / "target.csv", "csv")

    scan_args = ["scan", "--ref", "ref.csv", "--target", "target.csv",
                 "--window", "8", "--bootstraps", "19", "--seed", "7"]
    _run_cli([*scan_args, "--threads", "1", "--out", "r1.json", "--csv-out", "c1.csv"], tmp_path)
    _run_cli([*scan_args, "--threads", "4", "--out", "r2.json", "--csv-out", "c2.csv"], tmp_path)
    scan_ok = (
        (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
        and (tmp_path / "c1.csv").read_bytes() == (tmp_path / "c2.csv").read_bytes()
    )

    sim_args = ["simulate", "ratio-drift", "--n", "300", "--dims", "3",
                "--fractions", "0.2,0.5,0.8", "--seed", "11", "--batch-size", "16",
                "--window", "8", "--bootstraps", "9"]
    _run_cli([*sim_args, "--threads", "1", "--out", "t1.csv"], tmp_path)
    _run_cli([*sim_args, "--threads", "8", "--out", "t2.csv"], tmp_path)
    sim_ok = (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()

    cal_args = ["calibrate", "--trials", "8", "--n", "48", "--dims", "3",
                "--window", "8", "--bootstraps", "19", "--seed", "5"]
    out_a = _run_cli([*cal_args, "--threads", "1"], tmp_path)
    out_b = _run_cli([*cal_args, "--threads", "2"], tmp_path)
    cal_ok = out_a == out_b

    record(8, "CLI determinism", scan_ok and sim_ok and cal_ok,
           f"scan={scan_ok}, simulate={sim_ok}, calibrate={cal_ok} byte-identical across --threads")


def test_c9_degenerate_safety(tmp_path):
    problems = []

    rng = np.random.default_rng(99)
    m = EmbeddingMatrix.from_array(rng.standard_normal((50, 4)))
    report = drift_scan(DatasetPair(m, m), ScanConfig(window=8, bootstraps=19, seed=1))
    if not all(w.observed_sq == 0.0 for w in report.windows):
        problems.append("identical-input scan produced nonzero statistics")
    if not all(w.bootstrap.p_value == 1.0 for w in report.windows):
        problems.append("identical-input scan produced p < 1")
    if any(w.flagged for w in report.windows):
        problems.append("identical-input scan flagged a window")

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    try:
        load_embeddings(empty, "csv")
        problems.append("empty CSV without header did not error")
    except FormatError:
        pass

    try:
        drift_scan(DatasetPair(m, m), ScanConfig(window=64, bootstraps=5, seed=0))
        problems.append("oversized window did not error")
    except ValidationError:
        pass

    constant = EmbeddingMatrix.from_array([[1.0, 2.0]] * 20)
    try:
        median_heuristic_bandwidth(constant)
        problems.append("degenerate bandwidth did not error")
    except DegenerateInputError:
        pass
    # fixed bandwidth is the documented fallback and must work
    fallback = drift_scan(
        DatasetPair(constant, constant),
        ScanConfig(window=4, bootstraps=9, seed=0, kernel=KernelSpec("rbf", 1.0)),
    )
    if fallback.summary_score != 0.0:
        problems.append("constant-data scan with fixed bandwidth not exactly zero")

    one_row = EmbeddingMatrix.from_array([[1.0]])
    two_rows = EmbeddingMatrix.from_array([[1.0], [2.0]])
    try:
        mmd(KernelSpec("rbf", 1.0), one_row, two_rows, "unbiased")
        problems.append("unbiased estimator accepted a 1-row sample")
    except ValidationError:
        pass

    record(9, "degenerate safety", not problems, "; ".join(problems) or "all degenerate cases handled")
