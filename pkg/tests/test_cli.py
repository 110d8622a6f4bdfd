import csv
import json

import numpy as np
import pytest

from searchrank import cli
from searchrank.google import classical_pagerank, google_from_graph
from searchrank.netgen import load_edge_list


@pytest.fixture
def graph_file(tmp_path):
    p = tmp_path / "g.txt"
    assert cli.netgen_main(["--nodes", "32", "--seed", "42", "--out", str(p)]) == 0
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_netgen(graph_file):
    g = load_edge_list(graph_file)
    assert g.n == 32 and g.edges


def test_netgen_rejects_bad_params(tmp_path):
    with pytest.raises(ValueError):
        cli.netgen_main(["--nodes", "8", "--a", "0.9", "--out", str(tmp_path / "x.txt")])


def test_pagerank(graph_file, tmp_path):
    out = tmp_path / "r.csv"
    cli.pagerank_main(["--graph", str(graph_file), "--alpha", "0.85", "--out", str(out)])
    rows = read_csv(out)
    assert [int(r["node"]) for r in rows] == list(range(32))
    got = np.array([float(r["score"]) for r in rows])
    np.testing.assert_array_equal(got, classical_pagerank(google_from_graph(load_edge_list(graph_file), 0.85)))


def test_walk_dump(graph_file, tmp_path):
    out = tmp_path / "w.csv"
    cli.walk_main(["--graph", str(graph_file), "--marked", "2,7", "--tq", "3", "--dump-marginal", "--out", str(out)])
    rows = read_csv(out)
    assert len(rows) == 4 * 32
    for t in range(4):
        assert sum(float(r["prob"]) for r in rows if int(r["t"]) == t) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("algo", ["quantum", "semiclassical", "randomized"])
def test_searchrank_distribution_and_curve(graph_file, tmp_path, algo):
    out = tmp_path / "d.csv"
    cli.searchrank_main([algo, "--graph", str(graph_file), "--marked", "2,7,13,21", "--tq", "2", "--out", str(out)])
    scores = np.array([float(r["score"]) for r in read_csv(out)])
    assert scores.sum() == pytest.approx(1, abs=1e-8)
    assert set(np.argsort(-scores)[:4]) == {2, 7, 13, 21}
    cout = tmp_path / "c.csv"
    cli.searchrank_main([algo, "--graph", str(graph_file), "--marked", "2,7,13,21", "--curve", "--tmax", "5",
                         "--out", str(cout)])
    rows = read_csv(cout)
    assert list(rows[0]) == ["tq", "p_marked"]
    assert [int(r["tq"]) for r in rows] == [1, 2, 3, 4, 5]


def test_semiclassical_trajectory(graph_file, tmp_path):
    traj = tmp_path / "t.csv"
    cli.searchrank_main(["semiclassical", "--graph", str(graph_file), "--marked", "2,7,13,21", "--tq", "2",
                         "--trajectory", str(traj), "--out", str(tmp_path / "d.csv")])
    rows = read_csv(traj)
    assert list(rows[0]) == ["tc", "node", "prob"]
    assert float(rows[0]["prob"]) == pytest.approx(1 / 32)


def test_fit(tmp_path, capsys):
    p = tmp_path / "r.csv"
    with open(p, "w") as fh:
        fh.write("N,M,p_star,error\n")
        for N, M in [(64, 1), (128, 1), (256, 1), (512, 1), (64, 32)]:
            fh.write(f"{N},{M},{3 * (N / M) ** -1.0},\n")
        fh.write("512,3,0.9,failed\n")
    cli.fit_main(["--input", str(p), "--x", "ratio", "--y", "p_max", "--cutoff", "20"])
    res = json.loads(capsys.readouterr().out)
    assert set(res) == {"A", "n", "stderr_A", "stderr_n", "npoints"}
    assert res["n"] == pytest.approx(-1, abs=1e-10) and res["A"] == pytest.approx(3)
    assert res["npoints"] == 4


def test_kendall(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("node,score\n0,0.1\n1,0.2\n2,0.3\n3,0.4\n")
    b.write_text("node,score\n0,0.1\n1,0.3\n2,0.2\n3,0.9\n")
    cli.kendall_main(["--a", str(a), "--b", str(b), "--items", "0,1,2"])
    res = json.loads(capsys.readouterr().out)
    assert res == {"tau": pytest.approx(1 / 3), "pairs": 3, "ties_a": 0, "ties_b": 0}


def test_sweep_and_study(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sizes": [64], "marked_counts": [6], "seeds_per_cell": 1,
                               "algorithms": ["quantum", "randomized"]}))
    cli.sweep_main(["--config", str(cfg), "--out", str(tmp_path / "s")])
    assert len(read_csv(tmp_path / "s" / "results.csv")) == 2
    cli.kendall_study_main(["--config", str(cfg), "--out", str(tmp_path / "k")])
    summary = json.loads((tmp_path / "k" / "summary.json").read_text())
    assert summary["kendall"]


def test_alpha_sweep(tmp_path):
    out = tmp_path / "a"
    cli.alpha_sweep_main(["--nodes", "64", "--seed", "1", "--marked-count", "4", "--alphas", "0,0.5",
                          "--tmax", "10", "--out", str(out)])
    rows = read_csv(out / "fig_alpha.csv")
    assert {float(r["alpha"]) for r in rows} == {0.0, 0.5}


def test_module_dispatch(capsys):
    assert cli.main([]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.main(["nope"]) == 2
