"""GIRG and IRG sampling with Pareto weights and torus positions."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ._backend import get_kernels
from ._pykernels import MASK64, splitmix64
from .graph import SimpleGraph

__all__ = [
    "GirgParams",
    "GirgGraph",
    "sample_weights",
    "sample_positions",
    "torus_distance",
    "torus_distances",
    "edge_probability",
    "sample_girg",
    "sample_irg",
    "cutoff_event_holds",
    "write_graph",
    "read_graph",
    "pareto_mean",
]

# distinct salts so GIRG and IRG pair draws are independent for one seed
_GIRG_SALT = 0x47495247
_IRG_SALT = 0x00495247


def pareto_mean(tau: float) -> float:
    return (tau - 1.0) / (tau - 2.0)


def parse_gamma(value) -> float:
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "infinity", "+inf", "oo"):
            return math.inf
        value = float(v)
    return float(value)


@dataclass(frozen=True)
class GirgParams:
    n: int
    d: int = 1
    tau: float = 2.5
    gamma: float = 2.0
    seed: int = 0
    w0: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", parse_gamma(self.gamma))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be an integer >= 1, got {self.d!r}")
        if not 2.0 < self.tau < 3.0:
            raise ValueError(f"tau must lie in (2, 3), got {self.tau!r}")
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1 or be infinite, got {self.gamma!r}")
        if self.w0 != 1.0:
            raise ValueError("minimum weight is fixed at 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))

    @property
    def mu(self) -> float:
        return pareto_mean(self.tau)

    def to_dict(self) -> dict:
        out = asdict(self)
        if math.isinf(self.gamma):
            out["gamma"] = "inf"
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GirgParams":
        return cls(**{k: data[k] for k in ("n", "d", "tau", "gamma", "seed", "w0") if k in data})


class GirgGraph(SimpleGraph):
    """A sampled instance: the graph plus the weights and positions behind it.

    ``positions`` is ``None`` for IRG samples.
    """

    def __init__(self, params: GirgParams, weights, positions, src, dst, model: str = "girg"):
        super().__init__(params.n, src, dst)
        self.params = params
        self.weights = np.asarray(weights, dtype=np.float64)
        self.positions = None if positions is None else np.asarray(positions, dtype=np.float64)
        self.model = model

    @property
    def mu(self) -> float:
        return self.params.mu

    def distance(self, u: int, v: int) -> float:
        if self.positions is None:
            raise ValueError("IRG samples have no positions")
        return torus_distance(self.positions[u], self.positions[v])


def sample_weights(n: int, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Pareto weights with ``P(W > x) = x^(1 - tau)`` for ``x >= 1``."""
    u = 1.0 - rng.random(n)  # (0, 1]
    return u ** (-1.0 / (tau - 1.0))


def sample_positions(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random((n, d))


def torus_distance(x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = np.abs(x - y)
    return float(np.minimum(diff, 1.0 - diff).max())


def torus_distances(points: np.ndarray, origin) -> np.ndarray:
    """Infinity-norm torus distances from ``origin`` to each row of ``points``."""
    diff = np.abs(np.asarray(points, dtype=np.float64) - np.asarray(origin, dtype=np.float64))
    return np.minimum(diff, 1.0 - diff).max(axis=-1)


def edge_probability(w_u: float, w_v: float, dist: float, params: GirgParams) -> float:
    if w_u < 0 or w_v < 0 or dist < 0:
        raise ValueError("weights and distance must be non-negative")
    denom = params.n * params.mu * dist ** params.d
    prod = w_u * w_v
    if math.isinf(params.gamma):
        return 1.0 if prod > denom else 0.0
    if prod >= denom:
        return 1.0
    return (prod / denom) ** params.gamma


def _pair_key(seed: int, salt: int) -> int:
    return splitmix64((int(seed) ^ salt) & MASK64)


def _draw_vertices(params: GirgParams, geometric: bool):
    rng = np.random.default_rng(params.seed)
    weights = sample_weights(params.n, params.tau, rng)
    positions = sample_positions(params.n, params.d, rng) if geometric else None
    return weights, positions


def sample_girg(params: GirgParams, weights=None, positions=None, backend: str | None = None) -> GirgGraph:
    """Sample a GIRG; every pair is decided by its own counter-based draw.

    ``weights``/``positions`` override the seeded draws when given.
    """
    w_s, x_s = _draw_vertices(params, geometric=True)
    weights = w_s if weights is None else np.asarray(weights, dtype=np.float64)
    positions = x_s if positions is None else np.asarray(positions, dtype=np.float64).reshape(params.n, params.d)
    if weights.shape != (params.n,):
        raise ValueError("weights must have length n")
    k = get_kernels(backend)
    src, dst = k.sample_pair_edges(weights, positions, float(params.n), params.mu, params.gamma,
                                   _pair_key(params.seed, _GIRG_SALT), True)
    return GirgGraph(params, weights, positions, src, dst, model="girg")


def sample_irg(params: GirgParams, weights=None, backend: str | None = None, scale: float = 1.0) -> GirgGraph:
    """Sample the non-geometric counterpart, ``p = min(1, scale w_u w_v / (mu n))``.

    With the same seed the weights coincide with those of ``sample_girg``.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    w_s, _ = _draw_vertices(params, geometric=True)
    weights = w_s if weights is None else np.asarray(weights, dtype=np.float64)
    if weights.shape != (params.n,):
        raise ValueError("weights must have length n")
    k = get_kernels(backend)
    empty = np.zeros((0, 1))
    src, dst = k.sample_pair_edges(weights, empty, float(params.n), params.mu / scale, params.gamma,
                                   _pair_key(params.seed, _IRG_SALT), False)
    return GirgGraph(params, weights, None, src, dst, model="irg")


def _min_torus_distance(positions: np.ndarray) -> float:
    from scipy.spatial import cKDTree

    pts = np.mod(positions, 1.0)
    tree = cKDTree(pts, boxsize=1.0)
    dist, _ = tree.query(pts, k=2, p=np.inf)
    return float(dist[:, 1].min())


def cutoff_event_holds(g: GirgGraph, eps_bar: float) -> bool:
    if not 0.0 < eps_bar < 1.0:
        raise ValueError("eps_bar must lie in (0, 1)")
    p = g.params
    if not g.weights.max() < p.n ** (1.0 / (p.tau - 1.0)) / eps_bar:
        return False
    if g.positions is None:
        return True
    return _min_torus_distance(g.positions) > eps_bar * p.n ** (-1.0 / p.d)


def write_graph(g: GirgGraph, path) -> tuple[Path, Path]:
    """Write ``u v`` lines (1-based) and a ``.json`` sidecar with the vertex data."""
    path = Path(path)
    lines = [f"{u + 1} {v + 1}\n" for u, v in zip(g.src.tolist(), g.dst.tolist())]
    path.write_text("".join(lines))
    side = path.with_name(path.name + ".json")
    meta = {
        "model": g.model,
        "params": g.params.to_dict(),
        "mu": g.mu,
        "weights": g.weights.tolist(),
        "positions": None if g.positions is None else g.positions.tolist(),
    }
    side.write_text(json.dumps(meta))
    return path, side


def read_graph(path) -> GirgGraph:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    params = GirgParams.from_dict(meta["params"])
    rows = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    arr = np.array(rows, dtype=np.int64).reshape(-1, 2) - 1
    return GirgGraph(params, meta["weights"], meta["positions"], arr[:, 0], arr[:, 1], model=meta["model"])
