"""Smoke tests for the python bindings (and, when available, the CLI)."""

import math
import os
import subprocess
import xml.etree.ElementTree as ET

import pytest

import citemix


def test_merged_example_correlation():
    quality = [1, 2, 3, 4, 1, 2, 3, 4]
    citations = [1, 2, 3, 4, 10, 20, 30, 40]
    rho = citemix.spearman_rho(quality, citations)
    assert rho == pytest.approx(20.0 / math.sqrt(1680.0), abs=1e-12)
    assert rho == pytest.approx(0.488, abs=1e-3)


def test_presets_and_level_means():
    sel = citemix.preset_distribution("selective")
    assert sel.proportions == pytest.approx([0.006, 0.035, 0.240, 0.495, 0.224])
    lm = citemix.resolve_level_means(sel, "exponential", 20.0)
    assert lm.multiplier == pytest.approx(20.0 / 8.58, abs=1e-9)
    weighted = sum(p * m for p, m in zip(sel.proportions, lm.means))
    assert weighted == pytest.approx(20.0, abs=1e-9)


def test_quality_vector_counts():
    counts = [0] * 5
    for level in citemix.sample_quality_vector("selective", 1000, seed=7):
        counts[level] += 1
    assert counts == [6, 35, 240, 495, 224]


def test_average_ranks_handles_ties():
    assert citemix.average_ranks([5.0, 5.0, 7.0, 7.0]) == [1.5, 1.5, 3.5, 3.5]


def test_calibration_and_sampling():
    cal = citemix.calibrate_sigma(
        "selective", "exponential", 20.0, 0.5, calib_n=20000, seed=11
    )
    assert cal.converged
    assert abs(cal.achieved_rho - 0.5) <= 0.005
    qualities = citemix.sample_quality_vector("selective", 5000, seed=12)
    counts = citemix.sample_citation_counts(qualities, cal.spec, seed=13)
    assert len(counts) == 5000
    assert min(counts) >= 0
    rho = citemix.spearman_rho([float(q) for q in qualities], [float(c) for c in counts])
    assert rho == pytest.approx(0.5, abs=0.05)


def test_unreachable_target_raises():
    with pytest.raises(citemix.UnreachableTargetError):
        citemix.calibrate_sigma("selective", "exponential", 0.5, 0.9, calib_n=20000)


def test_engine_identity_point():
    engine = citemix.Engine(calibration_n=20000)
    sets = [
        citemix.SubsetParams("selective", "exponential", 20.0, 0.5, 1000),
        citemix.SubsetParams("selective", "exponential", 20.0, 0.5, 1000),
    ]
    result = engine.run_point(sets, iterations=8, master_seed=99)
    assert result.status == "ok"
    assert len(result.per_iteration_rhos) == 8
    assert result.combined_rho.mean == pytest.approx(0.5, abs=0.08)


def test_inversion_round_trip():
    engine = citemix.Engine(calibration_n=20000)
    subsets = [
        citemix.SubsetSketch("selective", "exponential", 20.0, 800),
        citemix.SubsetSketch("selective", "exponential", 25.0, 800),
    ]
    sets = [
        citemix.SubsetParams("selective", "exponential", 20.0, 0.5, 800),
        citemix.SubsetParams("selective", "exponential", 25.0, 0.5, 800),
    ]
    observed = engine.run_point(sets, iterations=10, master_seed=5).combined_rho.mean
    est = citemix.estimate_subset_correlations(
        engine, observed, subsets, assumption="equal", tolerance=0.02,
        forward_iterations=8, master_seed=6
    )
    assert est.rhos[0] == pytest.approx(0.5, abs=0.07)


@pytest.fixture()
def cli():
    path = os.environ.get("CITEMIX_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("CITEMIX_CLI not set")
    return path


def test_cli_point_and_figures(cli, tmp_path):
    spec = tmp_path / "point.spec"
    out = tmp_path / "out"
    spec.write_text(
        "experiment = point\n"
        "distribution = selective\n"
        "relationship = exponential\n"
        "set1_rho = 0.5\n"
        "set2_rho = 0.5\n"
        "set2_mean = 20\n"
        "set1_n = 500\n"
        "set2_n = 500\n"
        "iterations = 4\n"
        "calibration_n = 10000\n"
        "master_seed = 77\n"
        f"output_dir = {out}\n"
    )
    proc = subprocess.run(
        [cli, "point", str(spec)], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    csv = out / "results.csv"
    assert csv.exists()
    header, row = csv.read_text().strip().splitlines()
    assert header.startswith("distribution,relationship,")
    assert row.endswith(",ok")
    assert (out / "results.json").exists()

    figs = tmp_path / "figs"
    proc = subprocess.run(
        [cli, "figures", str(csv), "--outdir", str(figs)],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
    svgs = list(figs.glob("*.svg"))
    assert len(svgs) == 1
    root = ET.parse(svgs[0]).getroot()  # well-formed XML
    assert root.tag.endswith("svg")


def test_cli_rejects_unknown_keys(cli, tmp_path):
    spec = tmp_path / "bad.spec"
    spec.write_text("master_seed = 1\nnot_a_key = 2\n")
    proc = subprocess.run(
        [cli, "sweep", str(spec)], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode != 0
    assert "not_a_key" in proc.stderr
