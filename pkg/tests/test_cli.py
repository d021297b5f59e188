import csv
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from growthlab import cli, ensembles, growth
from growthlab.rng import SeededStream


def _run(*argv):
    return cli.main([str(a) for a in argv])


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _check_csv_format(path):
    raw = path.read_bytes()
    assert raw.endswith(b"\n") and b"\r" not in raw


def test_simulate_lpp_small(tmp_path):
    assert _run("simulate", "lpp", "--M", 1, "--N", 1, "--q", 0.5, "--samples", 4, "--seed", 7, "--out", tmp_path) == 0
    path = tmp_path / "simulate_lpp.csv"
    _check_csv_format(path)
    rows = _rows(path)
    assert rows[0] == ["sample_index", "value"]
    assert [r[0] for r in rows[1:]] == ["0", "1", "2", "3"]
    expect = [int(growth.sample_geometric(0.5, SeededStream(7, i), size=(1, 1))[0, 0]) for i in range(4)]
    assert [int(r[1]) for r in rows[1:]] == expect


@pytest.mark.slow
def test_simulate_hammersley_anchor(tmp_path):
    assert _run("simulate", "hammersley", "--alpha", 1, "--samples", 10**6, "--seed", 1, "--out", tmp_path) == 0
    vals = np.array([int(r[1]) for r in _rows(tmp_path / "simulate_hammersley.csv")[1:]])
    series = math.exp(-1) * sum(1 / math.factorial(m) ** 2 for m in range(30))
    assert abs((vals <= 1).mean() - series) <= 0.002


def test_simulate_png_columns_agree(tmp_path):
    assert _run("simulate", "png", "--M", 5, "--N", 4, "--q", 0.5, "--samples", 30, "--seed", 2, "--out", tmp_path) == 0
    rows = _rows(tmp_path / "simulate_png.csv")
    assert rows[0] == ["sample_index", "h", "G"]
    assert all(r[1] == r[2] for r in rows[1:])


@pytest.mark.parametrize("argv", [
    ["simulate", "lpp", "--M", 2, "--N", 2, "--q", 0.5],
    ["simulate", "lpp", "--M", 2, "--N", 2, "--q", 1.5, "--seed", 1],
    ["simulate", "hammersley", "--seed", 1],
    ["exact", "--method", "nonsense", "--alpha", 1],
    ["tw-table", "--xi-min", -12, "--xi-max", 0],
    ["experiment", "thm32", "--samples", 10],
])
def test_usage_errors_exit_2(tmp_path, argv):
    assert _run(*argv, "--out", tmp_path) == 2


def test_argparse_rejects_unknown_model():
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "tasep", "--seed", "1"])
    assert exc.value.code == 2


def test_exact_meixner(tmp_path):
    assert _run("exact", "--method", "meixner", "--M", 3, "--N", 3, "--q", 0.3, "--out", tmp_path) == 0
    rows = _rows(tmp_path / "exact_meixner.csv")
    assert rows[0] == ["g", "cdf", "method", "est_error"]
    cdf = [float(r[1]) for r in rows[1:]]
    assert all(b >= a for a, b in zip(cdf, cdf[1:]))
    assert cdf[-1] > 1 - 1e-12
    assert all(float(r[3]) <= 1e-12 for r in rows[1:])
    assert cdf[4] == pytest.approx(ensembles.meixner_lpp_cdf(3, 3, 0.3, 4), abs=0)


def test_exact_bessel_and_toeplitz_agree(tmp_path):
    assert _run("exact", "--method", "bessel", "--alpha", 1, "--n", 10, "--out", tmp_path) == 0
    assert _run("exact", "--method", "toeplitz", "--alpha", 1, "--n", 6, "--out", tmp_path) == 0
    b = [float(r[1]) for r in _rows(tmp_path / "exact_bessel.csv")[1:]]
    t = [float(r[1]) for r in _rows(tmp_path / "exact_toeplitz.csv")[1:]]
    assert len(b) == 11 and len(t) == 7
    assert all(y >= x for x, y in zip(b, b[1:]))
    assert b[10] >= 1 - 1e-10
    assert max(abs(x - y) for x, y in zip(b, t)) <= 1e-9


def test_exact_accuracy_failure_exit_3(tmp_path):
    assert _run("exact", "--method", "toeplitz", "--alpha", 100, "--n", 40, "--out", tmp_path) == 3


def test_tw_table_both(tmp_path):
    assert _run("tw-table", "--method", "both", "--xi-min", -8, "--xi-max", 4, "--step", 0.1, "--out", tmp_path) == 0
    path = tmp_path / "tw2_both.csv"
    _check_csv_format(path)
    rows = _rows(path)
    assert rows[0] == ["xi", "f2_fredholm", "f2_painleve", "est_error", "discrepancy"]
    assert rows[1][0] == "-8" and rows[-1][0] == "4"
    body = np.array([[float(v) for v in r] for r in rows[1:]])
    assert body[:, 4].max() <= 1e-6
    assert body[-1, 1] > 1 - 1e-6 and body[-1, 2] > 1 - 1e-6
    x, F = body[:, 0], body[:, 2]
    mean = x[-1] * F[-1] - x[0] * F[0] - np.sum(np.diff(x) * (F[1:] + F[:-1]) / 2)
    assert abs(mean - (-1.771)) <= 0.002


def test_tw_table_single_method(tmp_path):
    assert _run("tw-table", "--method", "fredholm", "--xi-min", -2, "--xi-max", 0, "--step", 0.5, "--out", tmp_path) == 0
    rows = _rows(tmp_path / "tw2_fredholm.csv")
    assert rows[0] == ["xi", "f2", "method", "est_error"]
    assert [r[0] for r in rows[1:]] == ["-2", "-1.5", "-1", "-0.5", "0"]
    assert all(r[2] == "fredholm" for r in rows[1:])


def test_verify_passes_and_writes_schema(tmp_path):
    assert _run("verify", "--out", tmp_path) == 0
    records = json.loads((tmp_path / "verify.json").read_text())
    assert records and all(r["pass"] for r in records)
    for r in records:
        assert set(r) == {"identity", "params", "pass", "lhs", "rhs", "abs_diff"}
        assert isinstance(r["identity"], str) and isinstance(r["params"], dict)
        assert all(isinstance(r[k], str) for k in ("lhs", "rhs", "abs_diff"))
    names = {r["identity"] for r in records}
    for expected in ("heine", "jacobi_trudi", "gessel", "macmahon_toeplitz", "plane_partitions_222",
                     "cue_integer", "cue_mc", "weyl", "rsk_lpp", "png_lpp", "kernel_trace",
                     "kernel_projection", "correlation", "fredholm_expectation", "triangle_toeplitz_bessel",
                     "lis_monotone"):
        assert expected in names


def test_verify_detects_injected_kernel_fault(tmp_path, monkeypatch):
    original = ensembles.kernel_matrix

    def flipped(*args, **kwargs):
        km = original(*args, **kwargs)
        E = km.entries.copy()
        if E.shape[0] > 1:
            E[0, 1] = -E[0, 1]
        return ensembles.KernelMatrix(km.domain, E)

    monkeypatch.setattr(ensembles, "kernel_matrix", flipped)
    assert _run("verify", "--out", tmp_path) == 1
    records = json.loads((tmp_path / "verify.json").read_text())
    failing = {r["identity"] for r in records if not r["pass"]}
    assert "kernel_projection" in failing


def test_experiment_artifacts_and_soft_failure(tmp_path):
    code = _run("experiment", "thm33", "--alpha", 25, "--samples", 300, "--seed", 4,
                "--threshold", 0.0, "--out", tmp_path)
    assert code == 4
    for name in ("thm33_samples.csv", "thm33_curve.csv", "thm33.svg", "thm33_summary.json"):
        assert (tmp_path / name).exists()
    summary = json.loads((tmp_path / "thm33_summary.json").read_text())
    assert summary["passed"] is False and summary["samples"] == 300 and summary["seed"] == 4
    svg = ET.fromstring((tmp_path / "thm33.svg").read_text())
    assert svg.tag.endswith("svg")
    assert svg.get("width") == "800" and svg.get("height") == "600" and svg.get("version") == "1.1"
    rows = _rows(tmp_path / "thm33_samples.csv")
    assert rows[0] == ["sample_index", "value", "rescaled"]
    v, r = int(rows[5][1]), float(rows[5][2])
    assert r == pytest.approx((v - 10) / 25 ** (1 / 6))


def test_experiment_transversal_report(tmp_path):
    assert _run("experiment", "transversal", "--q", 0.25, "--samples", 20, "--seed", 9, "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "transversal_summary.json").read_text())
    med = {int(k): float(v) for k, v in summary["median"].items()}
    assert sorted(med) == [64, 128, 256]
    assert med[64] < med[128] < med[256]


def test_experiment_gue_edge(tmp_path):
    assert _run("experiment", "gue_edge", "--N", 50, "--xi-min", -2, "--xi-max", 1, "--step", 1, "--out", tmp_path) == 0
    rows = _rows(tmp_path / "gue_edge_curve.csv")
    assert [r[0] for r in rows[1:]] == ["-2", "-1", "0", "1"]
    assert all(abs(float(r[1]) - float(r[2])) <= 0.05 for r in rows[1:])


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# lpp run\nM = 3\nN=3\nq=0.4\nseed=11\nsamples=50\n")
    assert _run("simulate", "lpp", "--config", cfg, "--out", tmp_path / "a") == 0
    assert _run("simulate", "lpp", "--config", cfg, "--samples", 20, "--out", tmp_path / "b") == 0
    a = _rows(tmp_path / "a" / "simulate_lpp.csv")
    b = _rows(tmp_path / "b" / "simulate_lpp.csv")
    assert len(a) == 51 and len(b) == 21 and a[:21] == b


def test_outputs_identical_across_runs_and_workers(tmp_path):
    outs = []
    for idx, workers in enumerate((1, 2, 1)):
        d = tmp_path / str(idx)
        assert _run("simulate", "lpp", "--M", 8, "--N", 8, "--q", 0.3, "--samples", 3000,
                    "--seed", 5, "--workers", workers, "--out", d) == 0
        assert _run("experiment", "thm33", "--alpha", 16, "--samples", 3000, "--seed", 5,
                    "--workers", workers, "--out", d) in (0, 4)
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1] == outs[2]
