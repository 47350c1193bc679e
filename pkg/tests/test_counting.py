import csv
import itertools
import math

import numpy as np
import pytest
from conftest import random_host
from hypothesis import given, settings
from hypothesis import strategies as st

from _shared import SCALING_NS, SEEDS, girg
from girgmotif.counting import (
    VertexClassSpec,
    approx_count_degree_filtered,
    brute_force_count,
    class_membership,
    count_in_class,
    count_ordered,
    filter_vertices,
    unordered_embeddings,
    write_count_csv,
)
from girgmotif.girg import GirgParams, cutoff_event_holds, sample_girg
from girgmotif.graph import SimpleGraph
from girgmotif.pattern import PatternError, automorphism_count, enumerate_patterns, named_pattern, parse_pattern

K3_HOST = SimpleGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
PATH_HOST = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


def test_small_examples():
    tri, p3 = named_pattern("triangle"), named_pattern("P3")
    assert count_ordered(K3_HOST, tri, "general") == 6
    assert count_ordered(K3_HOST, tri, "induced") == 6
    assert count_ordered(K3_HOST, p3, "general") == 6
    assert count_ordered(K3_HOST, p3, "induced") == 0
    assert count_ordered(PATH_HOST, p3, "general") == 4


def test_errors():
    with pytest.raises(PatternError):
        count_ordered(PATH_HOST, parse_pattern("k=4; edges=1-2,3-4"))
    with pytest.raises(ValueError):
        count_ordered(K3_HOST, named_pattern("K4"))
    with pytest.raises(ValueError):
        count_ordered(K3_HOST, named_pattern("triangle"), "partial")


def test_edge_count_is_twice_edges():
    g = sample_girg(GirgParams(n=3000, tau=2.4, seed=1))
    assert count_ordered(g, named_pattern("edge")) == 2 * g.num_edges


def test_single_vertex_pattern():
    assert count_ordered(PATH_HOST, parse_pattern("k=1; edges=")) == 4


@pytest.mark.parametrize("mode", ["general", "induced"])
def test_exhaustive_oracle_and_automorphisms(mode):
    rng = np.random.default_rng(99)
    pats = [p for k in (2, 3, 4) for p in enumerate_patterns(k)]
    for t in range(15):
        g = random_host(rng, int(rng.integers(5, 10)), float(rng.uniform(0.2, 0.8)))
        for h in pats:
            c = count_ordered(g, h, mode)
            assert c == brute_force_count(g, h, mode)
            assert c == automorphism_count(h) * unordered_embeddings(g, h, mode)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(4, 9), st.floats(0.1, 0.9))
def test_induced_at_most_general_and_monotone(seed, n, p):
    rng = np.random.default_rng(seed)
    g = random_host(rng, n, p)
    for h in enumerate_patterns(4) + enumerate_patterns(3):
        gen = count_ordered(g, h, "general")
        assert count_ordered(g, h, "induced") <= gen
    missing = [(u, v) for u, v in itertools.combinations(range(n), 2) if not g.has_edge(u, v)]
    if missing:
        g2 = g.with_edge(*missing[0])
        for h in enumerate_patterns(4):
            assert count_ordered(g2, h, "general") >= count_ordered(g, h, "general")


def test_threaded_count_matches():
    g = sample_girg(GirgParams(n=3000, tau=2.6, seed=2))
    for h in (named_pattern("triangle"), named_pattern("C4"), named_pattern("paw")):
        assert count_ordered(g, h, workers=4) == count_ordered(g, h)


# ------------------------------------------------------------------ classes


def _spec_from_tuple(g, tup, eps):
    n = g.n
    alpha = [math.log(g.weights[v]) / math.log(n) for v in tup]
    beta = [math.log(g.distance(tup[i], tup[j])) / math.log(n) for i, j in itertools.combinations(range(len(tup)), 2)]
    return VertexClassSpec(alpha, beta, eps)


def test_class_membership_examples():
    g = sample_girg(GirgParams(n=500, tau=2.5, seed=3))
    tup = (5, 17, 300)
    spec = _spec_from_tuple(g, tup, 0.5)
    assert class_membership(g, tup, spec)
    assert class_membership(g, tup, _spec_from_tuple(g, tup, 0.1))
    low = VertexClassSpec((-5.0, -5.0, -5.0), spec.beta, 0.5)
    assert not class_membership(g, tup, low)
    with pytest.raises(ValueError):
        class_membership(g, (5, 5, 7), spec)


def test_class_spec_validation():
    with pytest.raises(ValueError):
        VertexClassSpec((0.0, 0.0), (0.0, 0.0), 0.5)
    with pytest.raises(ValueError):
        VertexClassSpec((0.0, 0.0), (0.0,), 1.5)
    spec = VertexClassSpec((0, 0, 0, 0), (1, 2, 3, 4, 5, 6), 0.5)
    assert [spec.beta_of(i, j) for i, j in itertools.combinations(range(1, 5), 2)] == [1, 2, 3, 4, 5, 6]
    assert spec.beta_of(4, 2) == 5


def test_class_count_matches_membership_filter():
    g = sample_girg(GirgParams(n=60, tau=2.3, seed=8))
    h = named_pattern("P3")
    n = g.n
    spec = VertexClassSpec((0.1, 0.3, 0.0), (-0.5, -0.4, -0.6), 0.2)
    adj = [set(g.neighbors(v).tolist()) for v in range(n)]
    expect = 0
    for tup in itertools.permutations(range(n), 3):
        if all(tup[j - 1] in adj[tup[i - 1]] for i, j in h.edges) and class_membership(g, tup, spec):
            expect += 1
    assert count_in_class(g, h, "general", spec) == expect


def test_total_class_and_empty_class():
    g = sample_girg(GirgParams(n=2000, tau=2.5, seed=4))
    h = named_pattern("triangle")
    eps = 1e-9
    assert cutoff_event_holds(g, 1e-6)
    # one window per coordinate that holds every weight and every distance
    spec = VertexClassSpec((0.5,) * 3, (0.0,) * 3, eps)
    lo, hi = spec.window(g.n, 0.5)
    assert lo <= 1.0 and hi > g.weights.max()
    assert count_in_class(g, h, "general", spec) == count_ordered(g, h)
    empty = VertexClassSpec((5.0,) * 3, (0.0,) * 3, 0.5)
    assert count_in_class(g, h, "general", empty) == 0


def _tiling_centers(first_low: float, ratio: float, count: int, n: int):
    """Exponents whose half-open windows tile ``[first_low, first_low * ratio^count)``."""
    eps = ratio ** -0.5
    return [math.log(first_low * ratio ** t / eps) / math.log(n) for t in range(count)], eps


def test_disjoint_cover_sums_to_total():
    g = sample_girg(GirgParams(n=150, tau=2.5, seed=6))
    h = named_pattern("triangle")
    n = g.n
    ratio = 100.0
    a_centers, eps = _tiling_centers(1.0, ratio, 2, n)
    assert g.weights.max() < ratio ** 2
    iu, ju = np.triu_indices(n, 1)
    dmin = min(g.distance(int(a), int(b)) for a, b in zip(iu, ju))
    b_count = int(math.ceil(math.log(0.5 / dmin) / math.log(ratio))) + 1
    b_centers, _ = _tiling_centers(0.5 / ratio ** b_count, ratio, b_count + 1, n)
    total = 0
    for alpha in itertools.product(a_centers, repeat=3):
        for beta in itertools.product(b_centers, repeat=3):
            total += count_in_class(g, h, "general", VertexClassSpec(alpha, beta, eps))
    assert total == count_ordered(g, h)


def test_class_count_scaling_at_local_point():
    eps = 0.3
    h = named_pattern("triangle")
    means = []
    for n in SCALING_NS:
        spec = VertexClassSpec((0.0,) * 3, (-1.0,) * 3, eps)
        means.append(np.mean([count_in_class(girg(n, 2.7, s), h, "general", spec) for s in range(SEEDS)]))
    slope = np.polyfit(np.log(SCALING_NS), np.log(means), 1)[0]
    assert abs(slope - 1.0) <= 0.25, (slope, means)


# ------------------------------------------------------------------ filtering


def test_filter_examples():
    g = sample_girg(GirgParams(n=3000, tau=2.5, seed=7))
    h = named_pattern("triangle")
    assert approx_count_degree_filtered(g, h, "general", [0.0], 1e-9) == count_ordered(g, h)
    assert approx_count_degree_filtered(g, h, "general", [0.0], 1e-9, by="weight") == count_ordered(g, h)
    sparse = SimpleGraph.from_edges(400, [(0, 1), (1, 2), (0, 2)])
    assert approx_count_degree_filtered(sparse, h, "general", [0.5], 0.5) == 0
    with pytest.raises(ValueError):
        filter_vertices(g, [0.0], 0.1, by="color")


def test_filter_keeps_geometric_triangles():
    h = named_pattern("triangle")
    ratios = []
    for s in range(SEEDS):
        g = girg(10_000, 2.7, 100 + s)
        ratios.append(approx_count_degree_filtered(g, h, "general", [0.0], 0.1) / count_ordered(g, h))
    assert np.mean(ratios) >= 0.5


def test_csv_output(tmp_path):
    rows = [{"n": 10, "seed": 0, "pattern": "k=2; edges=1-2", "mode": "general", "count": 4, "elapsed_ms": 0.1}]
    path = write_count_csv(rows, tmp_path / "c.csv")
    with path.open() as fh:
        got = list(csv.DictReader(fh))
    assert list(got[0]) == ["n", "seed", "pattern", "mode", "count", "elapsed_ms"]
    assert got[0]["count"] == "4"
