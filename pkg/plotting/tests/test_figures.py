import hashlib
import json
import shutil
import subprocess
import sys
from pathlib import Path

import matplotlib
import numpy as np
import pytest

from selmet_plots import FigureJob, ParseError, render
from selmet_plots.cli import main as plot_main

from conftest import write_chain_file, write_scan_file

GOLDEN_DIR = Path(__file__).parent / "golden"


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_trajectories_two_panels(straight_trajectory_file, tmp_path):
    out = tmp_path / "fig.png"
    code = plot_main(
        ["trajectories", "--in", str(straight_trajectory_file),
         "--in", str(straight_trajectory_file), "--out", str(out)]
    )
    assert code == 0
    assert out.exists() and out.stat().st_size > 0


def test_trajectories_empty_file_is_parse_error(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "fig.png"
    code = plot_main(["trajectories", "--in", str(empty), "--out", str(out)])
    assert code == 1
    assert "empty" in capsys.readouterr().err


def test_landscape_renders_with_minima(small_scan_file, tmp_path):
    minima = tmp_path / "minima.csv"
    minima.write_text("ix,iy,cx,cy,action\n1,1,0,0.5,1\n")
    out = tmp_path / "fig.png"
    code = plot_main(
        ["landscape", "--in", str(small_scan_file), "--minima", str(minima),
         "--out", str(out)]
    )
    assert code == 0 and out.stat().st_size > 0


def test_landscape_single_cell(tmp_path):
    path = tmp_path / "scan.csv"
    write_scan_file(path, np.array([0.0]), np.array([0.0]),
                    np.array([[1.5]]), np.array([[True]]))
    out = tmp_path / "fig.png"
    assert plot_main(["landscape", "--in", str(path), "--out", str(out)]) == 0
    assert out.stat().st_size > 0


def test_heatmap_identical_samples_single_occupied_bin(tmp_path):
    n = 20
    cents = np.tile([[0.25, -0.25]], (n, 1)).reshape(n, 1, 2)
    chain = tmp_path / "chain.csv"
    write_chain_file(chain, cents, np.ones(n), np.ones(n, bool), np.ones(n, bool))
    out = tmp_path / "fig.png"
    code = plot_main(
        ["heatmap", "--in", str(chain), "--out", str(out),
         "--bounds", "-1", "1", "-1", "1", "--bins", "4", "4"]
    )
    assert code == 0
    h, _, _ = np.histogram2d(cents[:, 0, 0], cents[:, 0, 1], bins=(4, 4),
                             range=[[-1, 1], [-1, 1]])
    assert (h > 0).sum() == 1


def test_acf_and_histogram_render(small_acf_file, small_chain_file, tmp_path):
    out1 = tmp_path / "acf.png"
    assert plot_main(["acf", "--in", str(small_acf_file), "--out", str(out1)]) == 0
    out2 = tmp_path / "hist.png"
    assert plot_main(["histogram", "--in", str(small_chain_file),
                      "--out", str(out2), "--n-bins", "12"]) == 0
    assert out1.stat().st_size > 0 and out2.stat().st_size > 0


def test_heatmap_bad_centroid_index(small_chain_file, tmp_path, capsys):
    code = plot_main(["heatmap", "--in", str(small_chain_file),
                      "--out", str(tmp_path / "x.png"), "--centroid", "3"])
    assert code == 1


def test_figure_job_validation():
    with pytest.raises(ValueError):
        FigureJob(kind="sparkline", inputs=["x"], output="y")
    with pytest.raises(ValueError):
        FigureJob(kind="acf", inputs=[], output="y")


def test_rendering_is_deterministic(straight_trajectory_file, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        render(FigureJob("trajectories", [str(straight_trajectory_file)], str(out)))
    assert sha256(a) == sha256(b)


def test_plotting_does_not_mutate_inputs(small_scan_file, tmp_path):
    before = small_scan_file.read_bytes()
    render(FigureJob("landscape", [str(small_scan_file)], str(tmp_path / "f.png")))
    assert small_scan_file.read_bytes() == before


def test_golden_straight_line_checksum(straight_trajectory_file, tmp_path):
    manifest_path = GOLDEN_DIR / "straight_line.json"
    manifest = json.loads(manifest_path.read_text())
    if matplotlib.__version__ != manifest["matplotlib"]:
        pytest.skip(
            f"golden image pinned to matplotlib {manifest['matplotlib']}, "
            f"running {matplotlib.__version__}"
        )
    out = tmp_path / "straight.png"
    render(FigureJob("trajectories", [str(straight_trajectory_file)], str(out)))
    assert sha256(out) == manifest["sha256"]


@pytest.mark.skipif(shutil.which("selmet") is None, reason="selmet CLI not installed")
def test_pipeline_all_five_kinds_from_demo_outputs(tmp_path):
    demo_dir = tmp_path / "demo"
    subprocess.run(
        ["selmet", "demo", "crisscross", "--out", str(demo_dir), "--seed", "0"],
        check=True, capture_output=True, text=True, timeout=600,
    )
    jobs = [
        ("trajectories", [demo_dir / "trajectory_lddmm.csv",
                          demo_dir / "trajectory_selective.csv"], {}),
        ("landscape", [demo_dir / "scan.csv"],
         {"minima_path": str(demo_dir / "minima.csv")}),
        ("heatmap", [demo_dir / "chain.csv"], {"bounds": (-1, 1, -1, 1)}),
        ("acf", [demo_dir / "acf.csv"], {}),
        ("histogram", [demo_dir / "chain.csv"], {}),
    ]
    for kind, inputs, options in jobs:
        out = tmp_path / f"{kind}.png"
        render(FigureJob(kind, [str(p) for p in inputs], str(out), options=options))
        assert out.stat().st_size > 0, kind
