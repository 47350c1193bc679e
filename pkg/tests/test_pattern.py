import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from girgmotif.pattern import (
    Pattern,
    PatternError,
    automorphism_count,
    canonical_code,
    connected_ordering,
    enumerate_patterns,
    is_hamiltonian_pattern,
    named_pattern,
    parse_pattern,
)


def test_parse_triangle_and_star():
    tri = parse_pattern("k=3; edges=1-2,2-3,1-3")
    assert tri.k == 3 and set(tri.edges) == {(1, 2), (2, 3), (1, 3)}
    star = parse_pattern("k=4; edges=1-4,2-4,3-4")
    assert set(star.edges) == {(1, 4), (2, 4), (3, 4)}


def test_parse_normalizes_order():
    p = parse_pattern("k=3; edges=3-1,2-1")
    assert p.edges == tuple(sorted(p.edges))
    assert all(i < j for i, j in p.edges)


def test_parse_empty_edges():
    p = parse_pattern("k=2; edges=")
    assert p.k == 2 and p.m == 0


@pytest.mark.parametrize(
    "text, fragment, pos",
    [
        ("k=2; edges=2-2", "self-loop", 11),
        ("k=3; edges=1-4", "out of range", 11),
        ("k=3; edges=1-2,2-1", "duplicate", 15),
        ("k=3; edges=1-2;2-3", "','", 14),
        ("kk=3; edges=1-2", "k=", 0),
        ("k=3 edges=1-2", "edges", 3),
    ],
)
def test_parse_errors_carry_position(text, fragment, pos):
    with pytest.raises(PatternError) as exc:
        parse_pattern(text)
    assert fragment in str(exc.value)
    assert exc.value.position == pos


def test_json_round_trip():
    p = named_pattern("paw")
    assert Pattern.from_json(p.to_json()) == p
    assert parse_pattern('{"k":4,"edges":[[1,2],[2,3]]}').edges == ((1, 2), (2, 3))


def test_text_round_trip():
    for p in enumerate_patterns(4):
        assert parse_pattern(p.to_text()) == p


@pytest.mark.parametrize("name, expected", [("K4", True), ("star3", False), ("C5", True), ("P4", False),
                                            ("diamond", True), ("paw", False)])
def test_hamiltonian(name, expected):
    assert is_hamiltonian_pattern(named_pattern(name)) is expected


@pytest.mark.parametrize("name, expected", [("triangle", 6), ("P3", 2), ("star3", 6), ("C4", 8), ("K4", 24),
                                            ("diamond", 4), ("paw", 2)])
def test_automorphisms(name, expected):
    assert automorphism_count(named_pattern(name)) == expected


def _valid_order(p, order):
    return sorted(order) == list(range(1, p.k + 1)) and all(
        any(p.has_edge(order[t], order[s]) for s in range(t)) for t in range(1, len(order)))


def test_connected_ordering_valid_for_all_small_patterns():
    for k in range(1, 6):
        for p in enumerate_patterns(k):
            assert _valid_order(p, connected_ordering(p))


def test_connected_ordering_path_example():
    p = named_pattern("P4")
    assert _valid_order(p, (2, 1, 3, 4))
    assert not _valid_order(p, (1, 3, 2, 4))


def test_connected_ordering_rejects_disconnected():
    with pytest.raises(PatternError, match="disconnected"):
        connected_ordering(parse_pattern("k=4; edges=1-2,3-4"))


@pytest.mark.parametrize("k, count", [(1, 1), (2, 1), (3, 2), (4, 6), (5, 21)])
def test_connected_census(k, count):
    assert len(enumerate_patterns(k, connected_only=True)) == count


@pytest.mark.parametrize("k, count", [(3, 4), (4, 11), (5, 34)])
def test_full_census(k, count):
    assert len(enumerate_patterns(k, connected_only=False)) == count


def test_census_k4_names():
    names = {canonical_code(named_pattern(n)) for n in ("star", "path4", "paw", "cycle4", "diamond", "K4")}
    assert {canonical_code(p) for p in enumerate_patterns(4)} == names


def test_enumeration_order_and_no_duplicates():
    for k in (4, 5):
        pats = enumerate_patterns(k, connected_only=False)
        keys = [(p.m, canonical_code(p)) for p in pats]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        # no permutation maps one representative onto another
        for a, b in itertools.combinations(pats, 2):
            if a.m != b.m:
                continue
            for perm in itertools.permutations(range(1, k + 1)):
                assert a.relabel(perm) != b


@st.composite
def patterns(draw, max_k=6):
    k = draw(st.integers(1, max_k))
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Pattern(k, tuple(sorted(chosen)))


@settings(max_examples=60, deadline=None)
@given(patterns())
def test_properties(p):
    aut = automorphism_count(p)
    assert math.factorial(p.k) % aut == 0
    if p.k <= 6 and is_hamiltonian_pattern(p):
        assert all(p.degree(v) >= 2 for v in range(1, p.k + 1))
    perm = tuple(range(p.k, 0, -1))
    assert canonical_code(p.relabel(perm)) == canonical_code(p)
