import json
import math

import numpy as np
import pytest

from girgmotif.cli import (
    CLASS_COLORS,
    ConfigError,
    ExperimentConfig,
    export_structure_dot,
    load_config,
    main,
    parse_n_grid,
    run_atlas,
    run_scaling_experiment,
    run_tree_compare,
    slope_from_csv,
    write_scaling_csv,
)
from girgmotif.girg import GirgParams
from girgmotif.milp import OptInstance, solve_instance
from girgmotif.pattern import named_pattern


def test_n_grid_forms():
    assert parse_n_grid("2^10..2^12") == (1024, 2048, 4096)
    assert parse_n_grid("100,200, 1e3") == (100, 200, 1000)
    assert parse_n_grid([5, 6]) == (5, 6)
    with pytest.raises(ConfigError):
        parse_n_grid("2^3..4^5")


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("[experiment]\npattern = C4\ntau = 2.3\ngamma = inf\nn = 2^10..2^11\nseeds = 3\n")
    cfg = load_config(path)
    assert cfg.pattern == "C4" and cfg.tau == 2.3 and math.isinf(cfg.gamma)
    assert cfg.n == (1024, 2048) and cfg.seeds == 3
    cfg = load_config(path, {"tau": 2.6, "seeds": None})
    assert cfg.tau == 2.6 and cfg.seeds == 3
    assert json.loads(json.dumps(cfg.to_dict()))["gamma"] == "inf"


@pytest.mark.parametrize("body", ["[experiment]\ncolour = red\n", "[other]\ntau = 2.5\n",
                                  "[experiment]\ntau = 3.5\n", "[experiment]\nn = 200,100\n",
                                  "[experiment]\nseeds = many\n"])
def test_config_rejects(tmp_path, body):
    path = tmp_path / "bad.ini"
    path.write_text(body)
    with pytest.raises(ConfigError):
        load_config(path)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_bad_pattern_is_config_error():
    with pytest.raises(ConfigError):
        ExperimentConfig(pattern="k=2; edges=2-2").pattern_obj()


def test_scaling_csv_round_trip(tmp_path):
    out = tmp_path / "scale.csv"
    cfg = ExperimentConfig(pattern="edge", tau=2.5, n=(500, 1000, 2000, 4000), seeds=3, output=str(out), workers=2)
    res = run_scaling_experiment(cfg)
    assert [(r["n"], r["seed"]) for r in res["rows"]] == [(n, s) for n in cfg.n for s in range(3)]
    assert out.read_text().splitlines()[0] == "n,seed,pattern,mode,count,norm_count,elapsed_ms"
    assert slope_from_csv(out)["slope"] == pytest.approx(res["slope"], abs=1e-12)
    assert abs(res["slope"] - 1.0) < 0.1
    assert res["f_star"] == pytest.approx(1.0)


def test_zero_means_are_excluded(tmp_path):
    rows = [{"n": n, "seed": 0, "pattern": "x", "mode": "general", "count": c, "norm_count": 0.0, "elapsed_ms": 0}
            for n, c in ((10, 0), (20, 4), (40, 8))]
    fit = slope_from_csv(write_scaling_csv(rows, tmp_path / "z.csv"))
    assert fit["excluded_n"] == [10] and fit["slope"] == pytest.approx(1.0)


def test_atlas_determinism(tmp_path):
    a = run_atlas(4, 2.7, output=tmp_path / "a")
    run_atlas(4, 2.7, output=tmp_path / "b")
    ja, jb = (tmp_path / "a" / "atlas.json").read_bytes(), (tmp_path / "b" / "atlas.json").read_bytes()
    assert ja == jb
    assert len(a["rows"]) == 6 and len(list((tmp_path / "a").glob("pattern_*.dot"))) == 6


def test_atlas_rejects_large_k():
    with pytest.raises(ConfigError):
        run_atlas(6, 2.5)


def _node_lines(dot):
    return [ln for ln in dot.splitlines() if "fillcolor" in ln]


def _edge_lines(dot):
    return [ln for ln in dot.splitlines() if " -- " in ln]


def test_dot_k4_hub():
    dot = export_structure_dot(solve_instance(OptInstance(named_pattern("K4"), 2.2)), 2.2)
    nodes, edges = _node_lines(dot), _edge_lines(dot)
    assert len(nodes) == 4 and all(CLASS_COLORS["1/2"] in ln for ln in nodes)
    assert len(edges) == 6 and all("style=solid" in ln and "#d0d0d0" in ln for ln in edges)
    assert "bgcolor" not in dot


def test_dot_k4_local():
    dot = export_structure_dot(solve_instance(OptInstance(named_pattern("K4"), 2.7)), 2.7)
    assert all(CLASS_COLORS["0"] in ln for ln in _node_lines(dot))
    assert all("#000000" in ln for ln in _edge_lines(dot))


def test_dot_diamond_marked_non_unique():
    dot = export_structure_dot(solve_instance(OptInstance(named_pattern("diamond"), 2.2)), 2.2)
    assert 'bgcolor="#e6e6e6"' in dot and "non-unique" in dot
    edges = _edge_lines(dot)
    assert sum("style=dashed" in ln for ln in edges) == 1


def test_dot_induced_non_edges_dotted():
    dot = export_structure_dot(solve_instance(OptInstance(named_pattern("C4"), 2.2, variant="induced")), 2.2)
    assert sum("style=dotted" in ln for ln in _edge_lines(dot)) == 2


def test_tree_compare_identical_hosts():
    params = GirgParams(n=300, tau=2.5, gamma="inf")
    weights = np.full(300, 2 * math.sqrt(params.mu * params.n))
    res = run_tree_compare(named_pattern("P3"), params, seeds=3, weights=weights)
    assert all(r["ratio"] == 1.0 for r in res["rows"])
    assert res["rows"][0]["girg"] == 300 * 299 * 298


def test_tree_compare_rejects_cycles():
    with pytest.raises(ConfigError):
        run_tree_compare(named_pattern("triangle"), GirgParams(n=100, tau=2.5))


# ------------------------------------------------------------------ entry point


def test_solve_command(capsys):
    assert main(["solve", "--pattern", "K4", "--tau", "2.2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["f_star"] == pytest.approx(1.6) and data["unique"] == "unique"


def test_export_commands(tmp_path, capsys):
    report = tmp_path / "rep.json"
    assert main(["solve", "--pattern", "diamond", "--tau", "2.2", "-o", str(report)]) == 0
    assert main(["export-dot", "--report", str(report)]) == 0
    assert "non-unique" in capsys.readouterr().out
    lp = tmp_path / "m.lp"
    assert main(["export-lp", "--pattern", "triangle", "--tau", "2.5", "-o", str(lp)]) == 0
    assert lp.read_text().rstrip().endswith("End")


def test_sample_and_count(tmp_path, capsys):
    edges = tmp_path / "g.txt"
    assert main(["sample", "--n", "800", "--tau", "2.5", "--seed", "3", "-o", str(edges)]) == 0
    m = json.loads(capsys.readouterr().out)["edges"]
    assert main(["count", "--graph", str(edges), "--pattern", "edge"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 2 * m


@pytest.mark.parametrize("argv", [["solve", "--pattern", "K4", "--tau", "3.2"],
                                  ["solve", "--pattern", "k=2; edges=2-2"],
                                  ["tree-compare", "--pattern", "triangle", "--n", "100"],
                                  ["constants", "--kind", "geo", "--pattern", "triangle", "--tau", "2.2"],
                                  ["frobnicate"]])
def test_config_exit_code(argv, capsys):
    assert main(argv) == 2


def test_budget_exit_code(capsys):
    assert main(["solve", "--pattern", "C4", "--tau", "2.2", "--node-limit", "1"]) == 4


def test_config_file_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[experiment]\ncolour = red\n")
    assert main(["solve", "--config", str(path)]) == 2
