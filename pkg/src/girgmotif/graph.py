"""Immutable simple graphs in compressed adjacency form."""

from __future__ import annotations

from functools import cached_property

import numpy as np

__all__ = ["SimpleGraph"]


class SimpleGraph:
    """Undirected simple graph on vertices ``0..n-1``.

    Built from parallel endpoint arrays; each undirected edge is stored once
    with ``src < dst``. Adjacency lists in the CSR view are sorted.
    """

    def __init__(self, n: int, src, dst):
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("endpoint arrays differ in length")
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if src.size:
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise ValueError("edge endpoint out of range")
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if dup.any():
                raise ValueError("duplicate edge")
        self.n = int(n)
        self.src = lo
        self.dst = hi

    @classmethod
    def from_edges(cls, n: int, edges) -> "SimpleGraph":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n, arr[:, 0], arr[:, 1])

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with sorted neighbor lists."""
        a = np.concatenate([self.src, self.dst])
        b = np.concatenate([self.dst, self.src])
        order = np.lexsort((b, a))
        a, b = a[order], b[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(a, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(b)

    @cached_property
    def degrees(self) -> np.ndarray:
        indptr, _ = self.csr
        return np.diff(indptr)

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.num_edges / self.n if self.n else 0.0

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def induced_subgraph(self, vertices) -> tuple["SimpleGraph", np.ndarray]:
        """Subgraph on ``vertices`` relabeled ``0..m-1``, plus the old labels."""
        keep = np.unique(np.asarray(vertices, dtype=np.int64))
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[keep] = np.arange(keep.size)
        mask = (relabel[self.src] >= 0) & (relabel[self.dst] >= 0)
        return SimpleGraph(keep.size, relabel[self.src[mask]], relabel[self.dst[mask]]), keep

    def with_edge(self, u: int, v: int) -> "SimpleGraph":
        return SimpleGraph(self.n, np.append(self.src, u), np.append(self.dst, v))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, m={self.num_edges})"
