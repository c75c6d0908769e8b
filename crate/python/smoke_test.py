#!/usr/bin/env python3
"""Smoke test for the vsxc_py extension module.

Builds nothing itself: it looks for the compiled library under
target/release or target/debug (build it with
`cargo build --release -p vsxc-python`), stages it as an importable
module, and exercises the main operations end to end on a small
synthetic series.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_vsxc_py():
    candidates = [
        REPO / "target" / "release" / "libvsxc_py.so",
        REPO / "target" / "debug" / "libvsxc_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit(
            "libvsxc_py.so not found; run `cargo build --release -p vsxc-python` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="vsxc_py_"))
    shutil.copy2(lib, staging / "vsxc_py.so")
    sys.path.insert(0, str(staging))
    import vsxc_py

    return vsxc_py


def check(name, condition, detail=""):
    status = "ok" if condition else "FAIL"
    print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))
    if not condition:
        sys.exit(1)


def main():
    v = import_vsxc_py()

    # Metrics on known values.
    check("rmse identity", v.rmse([1.0, 2.0], [1.0, 2.0]) == 0.0)
    check(
        "rmse hand value",
        abs(v.rmse([2.0, 4.0], [1.0, 2.0]) - math.sqrt(2.5)) < 1e-12,
    )
    check("mape hand value", abs(v.mape([2.0, 4.0], [1.0, 2.0]) - 1.0) < 1e-12)

    # Synthetic data with ground-truth components.
    data = v.synth(length=700, seed=5)
    n = len(data["values"])
    check("synth length", n == 700)
    recon = [
        data["trend"][i] + data["periodic"][i] + data["residual"][i] + data["noise"][i]
        for i in range(n)
    ]
    check(
        "synth components sum to series",
        max(abs(recon[i] - data["values"][i]) for i in range(n)) < 1e-12,
    )

    # Kalman smoothing shrinks the differenced variance.
    filtered = v.kalman(data["values"], q=1.0, r=16.0)
    diff_var = lambda xs: sum(
        (xs[i + 1] - xs[i]) ** 2 for i in range(len(xs) - 1)
    ) / (len(xs) - 1)
    check("kalman smooths", diff_var(filtered) < diff_var(data["values"]))

    # Decomposition reconstructs the input and orders frequencies. Runs on
    # the raw series: the default filter noticeably attenuates a
    # unit-amplitude periodic component, which is its job, not VMD's.
    d = v.vmd(data["values"], alpha=2000.0)
    check("vmd recon error", d["recon_mse"] < 0.05, f"recon_mse={d['recon_mse']:.2e}")
    check(
        "vmd frequencies ascending",
        d["center_freqs"] == sorted(d["center_freqs"]),
    )
    corr_num = sum(
        a * b for a, b in zip(d["periodic"], data["periodic"])
    )
    corr_den = math.sqrt(
        sum(a * a for a in d["periodic"]) * sum(b * b for b in data["periodic"])
    )
    check("vmd periodic matches truth", corr_num / corr_den > 0.9)

    # Statistical tests on obvious cases.
    mk = v.mann_kendall([float(i) for i in range(50)])
    check("mann-kendall detects trend", mk["reject_at_05"], f"z={mk['statistic']:.2f}")
    lb = v.ljung_box(d["residual"], lag=1)
    check("ljung-box runs", 0.0 <= lb["p_value"] <= 1.0)
    rho = v.acf(d["periodic"], 24)
    check("acf lag zero", abs(rho[0] - 1.0) < 1e-12)

    # Trend model round trip through a dict.
    trend_fit = v.fit_trend(d["trend"], timestamps=data["timestamps"])
    pred = v.predict_trend(trend_fit["model"], data["timestamps"][:10])
    check(
        "trend prediction matches fit",
        abs(pred[0] - d["trend"][0]) < 1.0,
        f"pred={pred[0]:.3f} vs {d['trend'][0]:.3f}",
    )

    # Residual model round trip.
    resid_fit = v.fit_residual(d["residual"], k=2, epochs=15)
    steps = v.predict_residual(resid_fit, d["residual"], 5)
    check("residual forecast length", len(steps) == 5)

    # End-to-end pipeline with a quick configuration.
    quick = {
        "skip_ga": True,
        "gbt": {
            "n_rounds": 40,
            "max_depth": 4,
            "learning_rate": 0.1,
            "lambda": 1.0,
            "gamma": 0.0,
            "early_stopping_rounds": 30,
            "validation_fraction": 0.1,
        },
        "clusterlstm": {
            "k": 4,
            "window": 24,
            "hidden": 6,
            "layers": 2,
            "epochs": 20,
            "learning_rate": 0.01,
            "min_cluster_size": 5,
        },
    }
    report = v.pipeline(data["values"], timestamps=data["timestamps"], config=quick)
    check(
        "pipeline beats persistence",
        report["improvement_over_baseline"] > 0.0,
        f"improvement={report['improvement_over_baseline']:.2%}",
    )
    total = report["predictions"]["total"]
    parts = report["predictions"]
    recomposed = [
        parts["trend"][i] + parts["periodic"][i] + parts["residual"][i]
        for i in range(len(total))
    ]
    check(
        "pipeline recomposition identity",
        max(abs(a - b) for a, b in zip(total, recomposed)) < 1e-12,
    )

    print("smoke test passed")


if __name__ == "__main__":
    main()
