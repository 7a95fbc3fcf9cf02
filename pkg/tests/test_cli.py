from __future__ import annotations

import json
import math

import numpy as np
import pytest

from holodyn.cli import CLAIMS, main
from holodyn.core import henon_chain, map_to_dict
from holodyn.serialize import write_json


@pytest.fixture(scope="module")
def henon_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("maps") / "henon075.json"
    write_json(path, map_to_dict(henon_chain(0.75)))
    return str(path)


def test_fixed_point_subcommand(henon_file, tmp_path, capsys):
    out = tmp_path / "fp"
    rc = main(
        ["fixed-point", "--map", henon_file, "--seed-point", "1.4,1.4", "--out", str(out)]
    )
    assert rc == 0
    assert "Saddle" in capsys.readouterr().out
    data = json.loads((out / "fixed_point.json").read_text())
    assert abs(data["location"][0][0] - 1.5) < 1e-9
    assert data["classification"] == "Saddle"
    lam = sorted(abs(complex(re, im)) for re, im in data["eigenvalues"])
    assert lam[0] == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-9)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "fixed-point"
    assert manifest["inputs"]


def test_gallery_sphere_value(tmp_path, capsys):
    rc = main(["gallery", "--example", "sphere", "--z", "0.5", "--m", "3", "--out", str(tmp_path / "g")])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "0.2"


def test_density_depth_zero_matches_graph_cells(henon_file, tmp_path):
    out = tmp_path / "d"
    rc = main(
        [
            "density", "--map", henon_file, "--seed-point", "1.4,1.4",
            "--depth", "0", "--cells", "10", "--out", str(out),
        ]
    )
    assert rc == 0
    data = json.loads((out / "density.json").read_text())
    # depth 0: occupancy equals the distinct cells hit by the graph samples
    from holodyn.core import find_fixed_point
    from holodyn.manifold import local_stable_graph, occupied_cells

    ch = henon_chain(0.75)
    fp = find_fixed_point(ch, (1.4, 1.4))
    g = local_stable_graph(ch, fp, 0.1)
    cells = occupied_cells(g.sample_points(), (-2.0, 2.0), 10)
    assert data["occupied"] == len(cells)
    assert data["fraction"] == pytest.approx(len(cells) / 10**4)


def test_exit_code_domain_error(henon_file, tmp_path, capsys):
    rc = main(
        [
            "stable-graph", "--map", henon_file, "--seed-point", "0.4,0.4",
            "--out", str(tmp_path / "x"),
        ]
    )
    assert rc == 1
    assert "NotASaddle" in capsys.readouterr().err


def test_exit_code_config_error(tmp_path, capsys):
    rc = main(["fixed-point", "--map", str(tmp_path / "missing.json"), "--out", str(tmp_path / "y")])
    assert rc == 2


def test_report_lists_every_subcommand(tmp_path, capsys):
    rc = main(["report", "--list", "--out", str(tmp_path / "r")])
    assert rc == 0
    text = capsys.readouterr().out
    for name, claim in CLAIMS.items():
        assert name in text
        assert claim
    data = json.loads((tmp_path / "r" / "report.json").read_text())
    assert set(data["subcommands"]) == set(CLAIMS)


def test_parabolic_graph_report_schema(tmp_path):
    out = tmp_path / "pg"
    rc = main(
        [
            "parabolic-graph", "--c", "0", "--x-mesh", "-0.01",
            "--resolution", "1e-6", "--expansion-trials", "2000", "--out", str(out),
        ]
    )
    assert rc == 0
    data = json.loads((out / "parabolic.json").read_text())
    assert set(data) == {"c", "epsilon", "directions", "graph", "expansion"}
    assert data["expansion"]["violations"] == 0
    assert len(data["graph"]) == 1
    u = complex(*data["graph"][0]["u"])
    assert abs(u) <= data["graph"][0]["radius"]


def test_nonauto_report_csv(tmp_path):
    seq_file = tmp_path / "seq.json"
    write_json(seq_file, {"kind": "family", "name": "contraction", "params": {"rate": 0.5}})
    out = tmp_path / "na"
    rc = main(
        [
            "nonauto-run", "--sequence", str(seq_file), "--mode", "report",
            "--n", "8", "--out", str(out),
        ]
    )
    assert rc == 0
    lines = (out / "pointwise.csv").read_text().strip().splitlines()
    assert lines[0] == "n,sup_distance,converged_fraction"
    assert len(lines) == 10


def test_determinism_across_thread_counts(henon_file, tmp_path):
    payloads = {}
    for t in ("1", "4"):
        out = tmp_path / f"det{t}"
        rc = main(
            [
                "interior", "--map", henon_file, "--seed-point", "1.4,1.4",
                "--samples", "5000", "--max-iter", "100", "--threads", t,
                "--out", str(out),
            ]
        )
        assert rc == 0
        payloads[t] = (out / "interior.json").read_bytes()
    assert payloads["1"] == payloads["4"]


def test_determinism_ppm_and_csv(henon_file, tmp_path):
    ppm = {}
    csvs = {}
    for t in ("1", "4"):
        out = tmp_path / f"bs{t}"
        rc = main(
            [
                "bounded-set", "--map", henon_file, "--grid", "16,16",
                "--max-iter", "60", "--threads", t, "--out", str(out),
            ]
        )
        assert rc == 0
        ppm[t] = (out / "bounded.ppm").read_bytes()
        out2 = tmp_path / f"pb{t}"
        rc = main(
            [
                "pullback", "--map", henon_file, "--seed-point", "1.4,1.4",
                "--depth", "2", "--threads", t, "--out", str(out2),
            ]
        )
        assert rc == 0
        csvs[t] = (out2 / "cloud.csv").read_bytes()
    assert ppm["1"] == ppm["4"]
    assert csvs["1"] == csvs["4"]
    assert ppm["1"].startswith(b"P6\n16 16\n255\n")


def test_cloud_csv_header_and_order(henon_file, tmp_path):
    out = tmp_path / "pb"
    rc = main(
        [
            "pullback", "--map", henon_file, "--seed-point", "1.4,1.4",
            "--depth", "0", "--out", str(out),
        ]
    )
    assert rc == 0
    lines = (out / "cloud.csv").read_text().splitlines()
    assert lines[0] == "re_x,im_x,re_y,im_y"
    # depth 0 rows are the graph samples in mesh order: first row is the center
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == pytest.approx(1.5, abs=1e-9)


def test_sector_sets_membership_flag(tmp_path, capsys):
    out = tmp_path / "ss"
    rc = main(
        [
            "sector-sets", "--R", "2", "--epsilon", "0.1", "--delta", "0.005",
            "--z=-1,0.5", "--out", str(out),
        ]
    )
    assert rc == 0
    data = json.loads((out / "sector_sets.json").read_text())
    assert data["membership"] == "KxDisc"
    assert data["disjoint"] is True
