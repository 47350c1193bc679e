"""Ordered pattern counts in a host graph: total, per class, and degree-filtered."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._backend import get_kernels
from .graph import SimpleGraph
from .pattern import Pattern, connected_ordering

__all__ = [
    "MODES",
    "VertexClassSpec",
    "class_membership",
    "count_ordered",
    "count_in_class",
    "approx_count_degree_filtered",
    "brute_force_count",
    "unordered_embeddings",
    "filter_vertices",
    "write_count_csv",
    "COUNT_CSV_FIELDS",
]

MODES = ("general", "induced")
COUNT_CSV_FIELDS = ("n", "seed", "pattern", "mode", "count", "elapsed_ms")


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class VertexClassSpec:
    """Weight exponents per pattern vertex and distance exponents per pair.

    ``beta`` lists pairs ``(1,2), (1,3), ..., (k-1,k)`` in lexicographic order.
    """

    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    eps: float

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        k = len(alpha)
        if len(beta) != k * (k - 1) // 2:
            raise ValueError(f"beta needs {k * (k - 1) // 2} entries for k={k}, got {len(beta)}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if not all(math.isfinite(x) for x in alpha + beta):
            raise ValueError("exponents must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def beta_of(self, i: int, j: int) -> float:
        """Exponent of the pair ``{i, j}`` (1-based)."""
        if i > j:
            i, j = j, i
        k = self.k
        idx = (i - 1) * (2 * k - i) // 2 + (j - i - 1)
        return self.beta[idx]

    def window(self, n: int, zeta: float) -> tuple[float, float]:
        c = n ** zeta
        return self.eps * c, c / self.eps


def _in_window(x: float, lo: float, hi: float) -> bool:
    return lo <= x < hi


def class_membership(g, tup: Sequence[int], spec: VertexClassSpec) -> bool:
    """Whether the ordered host tuple (0-based) lies in the class of ``spec``."""
    tup = [int(v) for v in tup]
    if len(set(tup)) != len(tup):
        raise ValueError("tuple has repeated vertices")
    if len(tup) != spec.k:
        raise ValueError(f"tuple length {len(tup)} does not match k={spec.k}")
    n = g.n
    for i, v in enumerate(tup):
        if not _in_window(g.weights[v], *spec.window(n, spec.alpha[i])):
            return False
    for (i, a), (j, b) in itertools.combinations(enumerate(tup), 2):
        dist = g.distance(a, b)
        if not _in_window(dist, *spec.window(n, spec.beta_of(i + 1, j + 1))):
            return False
    return True


def _relation_matrix(h: Pattern, order: Sequence[int], mode: str) -> np.ndarray:
    k = h.k
    rel = np.zeros((k, k), dtype=np.int8)
    for t in range(k):
        for s in range(t):
            if h.has_edge(order[t], order[s]):
                rel[t, s] = 1
            elif mode == "induced":
                rel[t, s] = -1
    return rel


def _run_count(g: SimpleGraph, h: Pattern, mode: str, allowed=None, positions=None,
               dlo=None, dhi=None, order=None, backend: str | None = None, workers: int = 1) -> int:
    _check_mode(mode)
    if order is None:
        order = connected_ordering(h)
    if h.k > g.n:
        raise ValueError(f"pattern has k={h.k} vertices but host has only n={g.n}")
    rel = _relation_matrix(h, order, mode)
    indptr, indices = g.csr
    empty2 = np.zeros((0, 0))
    allowed = np.zeros((0, 0), dtype=np.uint8) if allowed is None else np.ascontiguousarray(allowed, dtype=np.uint8)
    if positions is None:
        positions = dlo = dhi = empty2
    kern = get_kernels(backend)

    def part(lo: int, hi: int) -> int:
        return kern.count_pattern(indptr, indices, rel, allowed, positions, dlo, dhi, lo, hi)

    if workers <= 1 or g.n < 2 * workers:
        total = part(0, g.n)
    else:
        # interleave-free contiguous blocks; heavy hubs spread via many blocks
        bounds = np.linspace(0, g.n, 8 * workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(part, bounds[:-1], bounds[1:]))
        total = sum(parts)
    if total > np.iinfo(np.int64).max:
        raise OverflowError("pattern count exceeds 64-bit range")
    return int(total)


def count_ordered(g: SimpleGraph, h: Pattern, mode: str = "general", *,
                  backend: str | None = None, workers: int = 1) -> int:
    """Number of ordered injective k-tuples realizing ``h`` (general or induced)."""
    return _run_count(g, h, mode, backend=backend, workers=workers)


def count_in_class(g, h: Pattern, mode: str, spec: VertexClassSpec, *,
                   backend: str | None = None, workers: int = 1) -> int:
    """Ordered count restricted to tuples in the class of ``spec``."""
    if spec.k != h.k:
        raise ValueError(f"spec has k={spec.k}, pattern has k={h.k}")
    if g.positions is None:
        raise ValueError("class counts need host positions")
    order = connected_ordering(h)
    k, n = h.k, g.n
    allowed = np.zeros((k, n), dtype=np.uint8)
    for t, v in enumerate(order):
        lo, hi = spec.window(n, spec.alpha[v - 1])
        allowed[t] = (g.weights >= lo) & (g.weights < hi)
    dlo = np.zeros((k, k))
    dhi = np.zeros((k, k))
    for t in range(k):
        for s in range(t):
            lo, hi = spec.window(n, spec.beta_of(order[t], order[s]))
            dlo[t, s], dhi[t, s] = lo, hi
    return _run_count(g, h, mode, allowed=allowed, positions=g.positions, dlo=dlo, dhi=dhi,
                      order=order, backend=backend, workers=workers)


def filter_vertices(g, alpha_star: Iterable[float], eps: float, by: str = "degree") -> np.ndarray:
    """Vertices whose degree (or weight) lies in some window ``[eps n^a, n^a / eps)``."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if by == "degree":
        values = g.degrees.astype(np.float64)
    elif by == "weight":
        values = np.asarray(g.weights, dtype=np.float64)
    else:
        raise ValueError(f"filter must be 'degree' or 'weight', got {by!r}")
    keep = np.zeros(g.n, dtype=bool)
    for a in alpha_star:
        c = g.n ** float(a)
        keep |= (values >= eps * c) & (values < c / eps)
    return np.nonzero(keep)[0]


def approx_count_degree_filtered(g, h: Pattern, mode: str, alpha_star: Iterable[float], eps: float,
                                 by: str = "degree", *, backend: str | None = None) -> int:
    """Count ``h`` inside the subgraph induced by vertices of the given exponent classes.

    Windows are computed with the host size ``n`` of ``g``.
    """
    _check_mode(mode)
    connected_ordering(h)
    keep = filter_vertices(g, alpha_star, eps, by=by)
    if keep.size < h.k:
        return 0
    sub, _ = SimpleGraph.induced_subgraph(g, keep)
    return count_ordered(sub, h, mode, backend=backend)


def brute_force_count(g: SimpleGraph, h: Pattern, mode: str = "general") -> int:
    """Ordered count by checking every bijection onto every k-subset."""
    _check_mode(mode)
    k = h.k
    edges = h.edges
    non_edges = h.non_edges() if mode == "induced" else []
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    total = 0
    for subset in itertools.combinations(range(g.n), k):
        for img in itertools.permutations(subset):
            if all(img[j - 1] in adj[img[i - 1]] for i, j in edges) and \
                    not any(img[j - 1] in adj[img[i - 1]] for i, j in non_edges):
                total += 1
    return total


def unordered_embeddings(g: SimpleGraph, h: Pattern, mode: str = "general") -> int:
    """Distinct copies of ``h``: edge sets (general) or vertex sets (induced) over all k-subsets."""
    _check_mode(mode)
    k = h.k
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    copies = set()
    for subset in itertools.combinations(range(g.n), k):
        for img in itertools.permutations(subset):
            if not all(img[j - 1] in adj[img[i - 1]] for i, j in h.edges):
                continue
            if mode == "induced" and any(img[j - 1] in adj[img[i - 1]] for i, j in h.non_edges()):
                continue
            image = frozenset(frozenset((img[i - 1], img[j - 1])) for i, j in h.edges)
            copies.add((frozenset(subset), image))
    return len(copies)


def write_count_csv(rows: Iterable[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COUNT_CSV_FIELDS, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)
    return path
