"""Small fixed patterns: parsing, structural queries and isomorphism census.

Vertices are labeled ``1..k``. Edges are stored as sorted ``(i, j)`` tuples
with ``i < j`` in lexicographic order.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "Pattern",
    "PatternError",
    "parse_pattern",
    "is_hamiltonian_pattern",
    "automorphism_count",
    "connected_ordering",
    "enumerate_patterns",
    "canonical_code",
    "named_pattern",
    "NAMED_PATTERNS",
]

HAMILTONIAN_MAX_K = 10
AUTOMORPHISM_MAX_K = 8
ENUMERATE_MAX_K = 6


class PatternError(ValueError):
    """Invalid pattern text or an operation that does not apply to the pattern."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass(frozen=True)
class Pattern:
    """A labeled simple graph on vertices ``1..k``."""

    k: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise PatternError(f"k must be a positive integer, got {self.k!r}")
        norm = []
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise PatternError(f"self-loop {i}-{j}")
            if not (1 <= i <= self.k and 1 <= j <= self.k):
                raise PatternError(f"endpoint out of range in {i}-{j} for k={self.k}")
            norm.append((min(i, j), max(i, j)))
        if len(set(norm)) != len(norm):
            raise PatternError("duplicate edge")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, k: int, edges: Iterable[Sequence[int]]) -> "Pattern":
        return cls(k, tuple((int(a), int(b)) for a, b in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._edge_set

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in range(1, self.k + 1)}
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return {v: frozenset(s) for v, s in nbrs.items()}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def pairs(self) -> list[tuple[int, int]]:
        """All vertex pairs ``(i, j)``, ``i < j``, in lexicographic order."""
        return list(itertools.combinations(range(1, self.k + 1), 2))

    def non_edges(self) -> list[tuple[int, int]]:
        return [p for p in self.pairs() if p not in self._edge_set]

    def is_connected(self) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            v = stack.pop()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.k

    def is_tree(self) -> bool:
        return self.m == self.k - 1 and self.is_connected()

    def relabel(self, perm: Sequence[int]) -> "Pattern":
        """Image under ``v -> perm[v-1]`` (``perm`` is a permutation of ``1..k``)."""
        return Pattern(self.k, tuple((perm[i - 1], perm[j - 1]) for i, j in self.edges))

    def to_text(self) -> str:
        return f"k={self.k}; edges=" + ",".join(f"{i}-{j}" for i, j in self.edges)

    def to_dict(self) -> dict:
        return {"k": self.k, "edges": [[i, j] for i, j in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Pattern":
        return cls.from_edges(int(data["k"]), data.get("edges", []))

    @classmethod
    def from_json(cls, text: str) -> "Pattern":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        return self.to_text()


_HEAD = re.compile(r"\s*k\s*=\s*")
_INT = re.compile(r"\d+")
_SEP = re.compile(r"\s*;\s*edges\s*=\s*")
_EDGE = re.compile(r"\s*(\d+)\s*-\s*(\d+)\s*")


def parse_pattern(text: str) -> Pattern:
    """Parse ``k=<int>; edges=<i>-<j>[,<i>-<j>]*``.

    Named patterns (``triangle``, ``K4``, ``C5``, ``P4``, ``star3`` ...) and
    the JSON form ``{"k": 4, "edges": [[1, 2], ...]}`` are accepted too.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return Pattern.from_json(stripped)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise PatternError(f"malformed JSON pattern: {exc}") from exc
    if "=" not in stripped:
        return named_pattern(stripped)

    m = _HEAD.match(text)
    if m is None:
        raise PatternError("expected 'k='", 0)
    pos = m.end()
    m = _INT.match(text, pos)
    if m is None:
        raise PatternError("expected vertex count", pos)
    k = int(m.group())
    if k < 1:
        raise PatternError("vertex count must be >= 1", pos)
    pos = m.end()
    m = _SEP.match(text, pos)
    if m is None:
        raise PatternError("expected '; edges='", pos)
    pos = m.end()

    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    if text[pos:].strip():
        while True:
            m = _EDGE.match(text, pos)
            if m is None:
                raise PatternError("expected edge '<i>-<j>'", pos)
            i, j = int(m.group(1)), int(m.group(2))
            where = m.start(1)
            if i == j:
                raise PatternError(f"self-loop {i}-{j}", where)
            for v in (i, j):
                if not 1 <= v <= k:
                    raise PatternError(f"endpoint {v} out of range 1..{k}", where)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise PatternError(f"duplicate edge {i}-{j}", where)
            seen.add(key)
            edges.append(key)
            pos = m.end()
            if pos == len(text):
                break
            if text[pos] != ",":
                raise PatternError("expected ',' between edges", pos)
            pos += 1
    return Pattern(k, tuple(edges))


def is_hamiltonian_pattern(p: Pattern) -> bool:
    """True iff ``p`` contains a spanning cycle (``k >= 3``)."""
    if p.k > HAMILTONIAN_MAX_K:
        raise PatternError(f"Hamiltonicity search limited to k <= {HAMILTONIAN_MAX_K}")
    if p.k < 3 or any(p.degree(v) < 2 for v in range(1, p.k + 1)):
        return False
    adj = p.adjacency
    path = [1]
    used = {1}

    def extend() -> bool:
        if len(path) == p.k:
            return 1 in adj[path[-1]]
        for u in sorted(adj[path[-1]]):
            if u not in used:
                used.add(u)
                path.append(u)
                if extend():
                    return True
                path.pop()
                used.discard(u)
        return False

    return extend()


def automorphism_count(p: Pattern) -> int:
    """Number of vertex permutations mapping the edge set onto itself."""
    if p.k > AUTOMORPHISM_MAX_K:
        raise PatternError(f"automorphism enumeration limited to k <= {AUTOMORPHISM_MAX_K}")
    edges = p._edge_set
    degs = [p.degree(v) for v in range(1, p.k + 1)]
    count = 0
    for perm in itertools.permutations(range(1, p.k + 1)):
        if any(degs[v - 1] != degs[perm[v - 1] - 1] for v in range(1, p.k + 1)):
            continue
        if all((min(perm[i - 1], perm[j - 1]), max(perm[i - 1], perm[j - 1])) in edges
               for i, j in p.edges):
            count += 1
    return count


def connected_ordering(p: Pattern) -> tuple[int, ...]:
    """Vertex order in which every vertex after the first has an earlier neighbor.

    Greedy: start from a maximum-degree vertex, then repeatedly take the
    frontier vertex of highest degree (ties: most placed neighbors, then
    smallest label).
    """
    if not p.is_connected():
        raise PatternError("pattern is disconnected; exact counting needs a connected pattern")
    adj = p.adjacency
    start = min(range(1, p.k + 1), key=lambda v: (-p.degree(v), v))
    order = [start]
    placed = {start}
    while len(order) < p.k:
        frontier = [v for v in range(1, p.k + 1) if v not in placed and adj[v] & placed]
        nxt = min(frontier, key=lambda v: (-p.degree(v), -len(adj[v] & placed), v))
        order.append(nxt)
        placed.add(nxt)
    return tuple(order)


def _code(k: int, edges: frozenset[tuple[int, int]], perm: Sequence[int]) -> str:
    # bit for pair (a, b) is set iff perm^{-1} maps it onto an edge
    inv = [0] * (k + 1)
    for v, img in enumerate(perm, start=1):
        inv[img] = v
    bits = []
    for a, b in itertools.combinations(range(1, k + 1), 2):
        i, j = inv[a], inv[b]
        bits.append("1" if (min(i, j), max(i, j)) in edges else "0")
    return "".join(bits)


def canonical_code(p: Pattern) -> str:
    """Lexicographically smallest adjacency bitstring over all relabelings."""
    edges = p._edge_set
    return min(_code(p.k, edges, perm) for perm in itertools.permutations(range(1, p.k + 1)))


def _from_code(k: int, code: str) -> Pattern:
    pairs = itertools.combinations(range(1, k + 1), 2)
    return Pattern(k, tuple(pr for pr, bit in zip(pairs, code) if bit == "1"))


def enumerate_patterns(k: int, connected_only: bool = True) -> list[Pattern]:
    """One representative per isomorphism class of graphs on ``k`` vertices.

    Ordered by edge count, then canonical code. Each representative is the
    graph spelled by its canonical code.
    """
    if k < 1 or k > ENUMERATE_MAX_K:
        raise PatternError(f"pattern enumeration supports 1 <= k <= {ENUMERATE_MAX_K}")
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    perms = list(itertools.permutations(range(1, k + 1)))
    seen: set[str] = set()
    classes: list[tuple[int, str]] = []
    for mask in range(1 << len(pairs)):
        code = "".join("1" if mask >> (len(pairs) - 1 - t) & 1 else "0" for t in range(len(pairs)))
        if code in seen:
            continue
        edges = frozenset(pr for pr, bit in zip(pairs, code) if bit == "1")
        orbit = {_code(k, edges, perm) for perm in perms}
        seen |= orbit
        classes.append((len(edges), min(orbit)))
    classes.sort()
    out = [_from_code(k, code) for _, code in classes]
    if connected_only:
        out = [p for p in out if p.is_connected()]
    return out


def _path(k: int) -> Pattern:
    return Pattern(k, tuple((i, i + 1) for i in range(1, k)))


def _cycle(k: int) -> Pattern:
    return Pattern(k, tuple((i, i + 1) for i in range(1, k)) + ((1, k),))


def _complete(k: int) -> Pattern:
    return Pattern(k, tuple(itertools.combinations(range(1, k + 1), 2)))


def _star(leaves: int) -> Pattern:
    k = leaves + 1
    return Pattern(k, tuple((i, k) for i in range(1, k)))


NAMED_PATTERNS = {
    "edge": _complete(2),
    "wedge": _path(3),
    "triangle": _complete(3),
    "star": _star(3),
    "paw": Pattern(4, ((1, 2), (1, 3), (2, 3), (3, 4))),
    "diamond": Pattern(4, ((1, 2), (1, 3), (2, 3), (2, 4), (3, 4))),
    "cycle4": _cycle(4),
    "path4": _path(4),
}

_FAMILY = re.compile(r"^(k|c|p|star)(\d+)$")


def named_pattern(name: str) -> Pattern:
    """Look up ``triangle``, ``paw``, ``diamond`` or a family member.

    Families: ``K<k>`` complete, ``C<k>`` cycle, ``P<k>`` path on ``k``
    vertices, ``star<l>`` star with ``l`` leaves.
    """
    key = name.strip().lower()
    if key in NAMED_PATTERNS:
        return NAMED_PATTERNS[key]
    m = _FAMILY.match(key)
    if m is None:
        raise PatternError(f"unknown pattern name {name!r}")
    kind, size = m.group(1), int(m.group(2))
    if kind == "k" and size >= 1:
        return _complete(size)
    if kind == "c" and size >= 3:
        return _cycle(size)
    if kind == "p" and size >= 1:
        return _path(size)
    if kind == "star" and size >= 1:
        return _star(size)
    raise PatternError(f"invalid size in pattern name {name!r}")
