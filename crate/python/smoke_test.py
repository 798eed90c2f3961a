#!/usr/bin/env python3
"""Smoke test for the sfnet extension module.

Build the module first, then run this script from the repository root:

    cargo build --release -p sfnet-py
    python3 python/smoke_test.py

The script locates the built cdylib under target/, stages it as an
importable module in a temp directory, and exercises the main surface.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libsfnet.so", "libsfnet.dylib", "sfnet.dll")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("sfnet cdylib not found; run `cargo build --release -p sfnet-py` first")
    stage = Path(tempfile.mkdtemp(prefix="sfnet_py_"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy(built, stage / f"sfnet{suffix}")
    sys.path.insert(0, str(stage))


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} != {b} (tol {tol})"


def main() -> None:
    stage_module()
    import sfnet

    # Path graph a-b-c: exact centralities.
    g = sfnet.Graph(3)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    assert g.node_count() == 3 and g.edge_count() == 2
    deg = sfnet.degree_centrality(g)
    assert deg == [0.5, 1.0, 0.5], deg
    bet = sfnet.betweenness_centrality(g)
    assert bet == [0.0, 1.0, 0.0], bet
    clo = sfnet.closeness_centrality(g)
    approx(clo[0], 2.0 / 3.0)
    approx(clo[1], 1.0)
    pr = sfnet.pagerank_centrality(g, damping=1.0, tol=1e-12)
    approx(pr[0], 0.25, 1e-8)
    approx(pr[1], 0.50, 1e-8)
    assert sfnet.brute_force_betweenness(g) == bet

    # Star K1,4 via edge-list round trip.
    star = sfnet.Graph.from_edge_list("# nodes: 5\n0 1\n0 2\n0 3\n0 4\n")
    assert star.max_degree_hub() == 0
    assert star.degree_histogram() == {1: 4, 4: 1}
    assert sfnet.Graph.from_edge_list(star.to_edge_list()).edges() == star.edges()

    # Statistics helpers.
    approx(sfnet.pearson_correlation([1, 2, 3, 4], [1, 3, 2, 4]), 0.8, 1e-12)
    fit = sfnet.fit_power_law([1, 1, 1, 1, 2, 2, 3, 5, 8, 13, 21, 34])
    assert fit["alpha_hat"] > 1.0 and 0.0 <= fit["ks_stat"] <= 1.0
    nf = sfnet.fit_normal(list(range(1, 101)))
    approx(nf["mu"], 50.5, 1e-9)
    approx(nf["sigma"], 29.0114919759, 1e-6)

    # Generator determinism, heavy tail, and trace export.
    trace_dir = Path(tempfile.mkdtemp(prefix="sfnet_trace_"))
    g1 = sfnet.generate(n_target=300, seed=11, export_dir=str(trace_dir))
    g2 = sfnet.generate(n_target=300, seed=11)
    assert g1.edges() == g2.edges()
    assert g1.node_count() == 300
    hist = g1.degree_histogram()
    assert max(hist) > 10 * sorted(hist)[len(hist) // 2]
    manifest = [
        json.loads(line)
        for line in (trace_dir / "manifest.jsonl").read_text().splitlines()
    ]
    assert manifest[0]["record"] == "params" and manifest[0]["seed"] == 11
    last = manifest[-1]
    assert last["record"] == "snapshot" and last["nodes"] == 300
    assert (trace_dir / last["path"]).exists()

    # Synchronization shrinks the state spread on a connected graph.
    sync = sfnet.synchronize(g, mode="explicit", strength=1.0, steps=2000, seed=3)
    assert sync["final_sync_error"] < 1e-6 * sync["sync_error"][0] + 1e-9

    # A tiny end-to-end experiment with artifacts on disk.
    out = Path(tempfile.mkdtemp(prefix="sfnet_out_"))
    reports = sfnet.run_experiment(
        {
            "n_target": "80",
            "phases": "2",
            "steps_per_phase": "200",
            "coupling_mode": "degree",
            "coupling_strength": "0.5",
            "seed": "7",
        },
        out_dir=str(out),
    )
    assert len(reports) == 2
    for rep in reports:
        assert rep["verdict"] in ("scale_free_sustained", "fluctuated")
        assert math.isfinite(rep["alpha_hat"])
        assert set(rep["corr"]) == {"db", "dp", "dc", "pb", "pc", "bc"}
    lines = (out / "phase_reports.jsonl").read_text().strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["phase"] == 0
    assert (out / "plots" / "overview.csv").exists()
    assert (out / "snapshots" / "phase_0001.edges").exists()

    print("smoke test passed")


if __name__ == "__main__":
    main()
