"""Closed-form exponents, the Hamiltonian phase classifier and limit constants."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .counting import count_ordered
from .girg import GirgParams, parse_gamma, pareto_mean, sample_girg
from .pattern import Pattern, connected_ordering, is_hamiltonian_pattern

__all__ = [
    "RegimeVerdict",
    "ConstantEstimate",
    "RegimeError",
    "special_point_exponents",
    "hamiltonian_regime",
    "single_edge_constant",
    "mc_geo_constant",
    "mc_nongeo_constant",
    "empirical_constant",
]

GEOMETRIC = "Geometric"
NONGEO_ODD = "NonGeometricOdd"
NONGEO_EVEN = "NonGeometricEvenUnproven"
WINDOW = "Window"


class RegimeError(ValueError):
    """The integral's finiteness hypothesis fails for the requested pattern."""


@dataclass(frozen=True)
class RegimeVerdict:
    regime: str
    thresholds: tuple[float, float]
    k: int
    tau: float

    def to_dict(self) -> dict:
        return {"regime": self.regime, "thresholds": list(self.thresholds), "k": self.k, "tau": self.tau}


@dataclass
class ConstantEstimate:
    value: float
    std_error: float
    samples: int
    truncation: float
    method: str = ""
    pattern: str = ""
    variant: str = "general"
    regime: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "variant": self.variant,
            "regime": self.regime,
            "estimate": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "truncation": "inf" if math.isinf(self.truncation) else self.truncation,
            "method": self.method,
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def special_point_exponents(k: int, tau: float) -> tuple[float, float]:
    """Exponents at the hub point and at the local point: ``(k(3-tau)/2, 1)``."""
    if not 2.0 < tau < 3.0:
        raise ValueError("tau must lie in (2, 3)")
    return (k * (3.0 - tau) / 2.0, 1.0)


def _thresholds(tau: float) -> tuple[float, float]:
    return (1.0 + 1.0 / (3.0 - tau), 2.0 / (3.0 - tau))


def hamiltonian_regime(k: int, tau: float) -> RegimeVerdict:
    if k < 3:
        raise ValueError("Hamiltonian patterns have k >= 3")
    if not 2.0 < tau < 3.0:
        raise ValueError("tau must lie in (2, 3)")
    lo, hi = _thresholds(tau)
    if k < lo:
        regime = GEOMETRIC
    elif k > hi:
        regime = NONGEO_ODD if k % 2 == 1 else NONGEO_EVEN
    else:
        regime = WINDOW
    return RegimeVerdict(regime, (lo, hi), k, tau)


def single_edge_constant(tau: float, gamma: float, d: int) -> float:
    """Closed form of the single-edge geometric constant, ``2^d gamma mu / (gamma - 1)``."""
    return 2.0 ** d * gamma * pareto_mean(tau) / (gamma - 1.0)


# --------------------------------------------------------------------------- shared pieces


def _kernel(prod, dist_d, mu, gamma):
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = prod / (mu * dist_d)
    return np.power(np.minimum(ratio, 1.0), gamma)


def _linf(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b).max(axis=-1)


def _torus_linf(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = np.abs(a - b)
    return np.minimum(diff, 1.0 - diff).max(axis=-1)


def _pair_factor(h: Pattern, variant: str, weights, dist_d, mu, gamma, skip=()):
    """Product of kernel terms over edges (minus ``skip``) and, if induced, complements over non-edges."""
    out = np.ones(weights.shape[0])
    skip = set(skip)
    for i, j in h.edges:
        if (i, j) in skip:
            continue
        out *= _kernel(weights[:, i - 1] * weights[:, j - 1], dist_d[(i, j)], mu, gamma)
    if variant == "induced":
        for i, j in h.non_edges():
            out *= 1.0 - _kernel(weights[:, i - 1] * weights[:, j - 1], dist_d[(i, j)], mu, gamma)
    return out


class _Accumulator:
    def __init__(self):
        self.n = 0
        self.s = 0.0
        self.s2 = 0.0

    def add(self, vals: np.ndarray) -> None:
        self.n += vals.size
        self.s += float(vals.sum())
        self.s2 += float(np.square(vals).sum())

    def result(self) -> tuple[float, float]:
        mean = self.s / self.n
        var = max(self.s2 / self.n - mean * mean, 0.0)
        se = math.sqrt(var / max(self.n - 1, 1))
        return mean, se


def _batches(samples: int, batch: int, seed: int):
    """Per-batch generators; a batch's stream depends only on ``(seed, batch index)``."""
    ss = np.random.SeedSequence(seed)
    nb = max(1, -(-samples // batch))
    for b, child in enumerate(ss.spawn(nb)):
        size = min(batch, samples - b * batch)
        yield np.random.default_rng(child), size


def _pareto(rng, size, tau_q):
    return (1.0 - rng.random(size)) ** (-1.0 / (tau_q - 1.0))


def _check_variant(variant: str) -> None:
    if variant not in ("general", "induced"):
        raise ValueError(f"variant must be 'general' or 'induced', got {variant!r}")


def _geo_precondition(h: Pattern, tau: float, gamma: float, d: int) -> str:
    if math.isinf(gamma):
        raise RegimeError("the geometric constant needs a finite gamma")
    if not h.is_connected():
        raise RegimeError("pattern is disconnected")
    if h.k == 2 and h.m == 1:
        return GEOMETRIC
    if h.is_tree():
        from .milp import OptInstance, solve_instance

        f = solve_instance(OptInstance(h, tau, gamma, d), check_unique=False).f_star
        if f > 1.0 + 1e-9:
            raise RegimeError(f"tree pattern outside the geometric regime: f* = {f:.6g} > 1")
        return GEOMETRIC
    if h.k >= 3 and is_hamiltonian_pattern(h):
        v = hamiltonian_regime(h.k, tau)
        if v.regime != GEOMETRIC:
            raise RegimeError(f"needs k < 1 + 1/(3 - tau) = {v.thresholds[0]:.6g}, got k = {h.k}")
        return GEOMETRIC
    raise RegimeError("the geometric constant is defined here for Hamiltonian patterns and trees")


# --------------------------------------------------------------------------- geometric constant


def mc_geo_constant(h: Pattern, tau: float, gamma: float = 2.0, d: int = 1, variant: str = "general",
                    samples: int = 200_000, radius: float = 32.0, seed: int = 0, *, method: str = "tree",
                    drift_threshold: float = 0.05, max_doublings: int = 4,
                    batch: int = 1 << 16) -> ConstantEstimate:
    """Monte Carlo estimate of the geometric limit constant.

    ``method="tree"`` (default) draws weights from a heavier Pareto proposal,
    then places each vertex relative to its parent in a spanning tree of
    ``h`` with density proportional to the connection kernel; the tree
    kernels integrate in closed form, the remaining pair factors are
    evaluated, and nothing is truncated.

    ``method="box"`` draws ``z_2..z_k`` uniformly from ``[-R, R]^{d(k-1)}``
    and applies the volume factor. The same draws are rescaled to ``2R``;
    ``R`` doubles until the relative change falls below
    ``drift_threshold``, and the last estimate is reported.
    """
    _check_variant(variant)
    gamma = parse_gamma(gamma)
    regime = _geo_precondition(h, tau, gamma, d)
    mu = pareto_mean(tau)
    if method == "tree":
        est = _geo_tree(h, tau, gamma, d, variant, samples, seed, mu, batch)
    elif method == "box":
        est = _geo_box(h, tau, gamma, d, variant, samples, radius, seed, mu, batch, drift_threshold, max_doublings)
    else:
        raise ValueError(f"unknown method {method!r}")
    est.pattern = h.to_text()
    est.variant = variant
    est.regime = regime
    return est


def _spanning_tree(h: Pattern) -> list[tuple[int, int]]:
    order = connected_ordering(h)
    placed = []
    tree = []
    for v in order:
        if placed:
            parent = next(u for u in placed if h.has_edge(u, v))
            tree.append((parent, v))
        placed.append(v)
    return tree


def _geo_tree(h, tau, gamma, d, variant, samples, seed, mu, batch) -> ConstantEstimate:
    k = h.k
    tau_q = (3.0 * tau - 4.0) / 2.0
    tree = _spanning_tree(h)
    tree_edges = {(min(a, b), max(a, b)) for a, b in tree}
    acc = _Accumulator()
    p_core = (gamma - 1.0) / gamma
    for rng, size in _batches(samples, batch, seed):
        w = _pareto(rng, (size, k), tau_q)
        # likelihood ratio of the Pareto(tau) density against the proposal
        lr = ((tau - 1.0) / (tau_q - 1.0)) ** k * np.prod(w ** (tau_q - tau), axis=1)
        z = np.zeros((size, k, d))
        logz = np.zeros(size)
        for parent, child in tree:
            c = w[:, parent - 1] * w[:, child - 1] / mu
            logz += np.log(2.0 ** d * c * gamma / (gamma - 1.0))
            core = rng.random(size) < p_core
            u = 1.0 - rng.random(size)
            v = np.where(core, rng.random(size), u ** (-1.0 / (gamma - 1.0)))
            r = (c * v) ** (1.0 / d)
            # uniform point on the sup-norm sphere of radius r
            face = rng.integers(0, d, size)
            sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
            off = rng.uniform(-1.0, 1.0, (size, d))
            off[np.arange(size), face] = sign
            z[:, child - 1] = z[:, parent - 1] + r[:, None] * off
        dist_d = {}
        for i, j in h.pairs():
            dist_d[(i, j)] = _linf(z[:, i - 1], z[:, j - 1]) ** d
        rest = _pair_factor(h, variant, w, dist_d, mu, gamma, skip=tree_edges)
        acc.add(lr * np.exp(logz) * rest)
    mean, se = acc.result()
    return ConstantEstimate(mean, se, acc.n, math.inf, method="tree", extra={"proposal_tau": tau_q})


def _geo_box(h, tau, gamma, d, variant, samples, radius, seed, mu, batch, drift_threshold, max_doublings):
    k = h.k
    R = float(radius)
    history = []
    prev = None
    for step in range(max_doublings + 1):
        acc = _Accumulator()
        # common random numbers across radii: same seed, draws rescaled by R
        for rng, size in _batches(samples, batch, seed):
            w = _pareto(rng, (size, k), tau)
            u = rng.uniform(-1.0, 1.0, (size, k - 1, d))
            z = np.concatenate([np.zeros((size, 1, d)), R * u], axis=1)
            dist_d = {(i, j): _linf(z[:, i - 1], z[:, j - 1]) ** d for i, j in h.pairs()}
            vals = (2.0 * R) ** (d * (k - 1)) * _pair_factor(h, variant, w, dist_d, mu, gamma)
            acc.add(vals)
        mean, se = acc.result()
        history.append({"radius": R, "estimate": mean, "std_error": se})
        if prev is not None:
            drift = abs(mean / prev - 1.0) if prev else math.inf
            history[-1]["drift"] = drift
            if drift < drift_threshold:
                return ConstantEstimate(mean, se, acc.n, R, method="box", extra={"history": history})
        prev = mean
        R *= 2.0
    raise RegimeError(f"truncation drift stayed above {drift_threshold} up to radius {R / 2:g}: {history}")


# --------------------------------------------------------------------------- non-geometric constant


def _nongeo_precondition(h: Pattern, tau: float) -> str:
    if h.k < 3 or not is_hamiltonian_pattern(h):
        raise RegimeError("the non-geometric constant needs a Hamiltonian pattern")
    v = hamiltonian_regime(h.k, tau)
    if v.regime != NONGEO_ODD:
        raise RegimeError(f"needs k > 2/(3 - tau) = {v.thresholds[1]:.6g} and k odd, got k = {h.k}")
    return v.regime


def mc_nongeo_constant(h: Pattern, tau: float, gamma: float = 2.0, d: int = 1, variant: str = "general",
                       samples: int = 200_000, seed: int = 0, *, n: int | None = None,
                       p_low: float = 0.5, batch: int = 1 << 16) -> ConstantEstimate:
    """Monte Carlo estimate of the non-geometric limit constant.

    Positions are uniform on the torus. Each rescaled weight ``y`` comes
    from a two-part proposal split at ``y = 1``: uniform on ``(0, 1)`` with
    probability ``p_low``, otherwise Pareto with density proportional to
    ``y^-tau`` on ``[1, inf)``. The integrand carries the Pareto density
    factor ``(tau - 1)`` per vertex so the estimate is the limit of
    ``E[N] / n^{k(3-tau)/2}``. With ``n`` given, weights are restricted to
    ``y >= n^{-1/2}`` and the finite-size integral is returned instead.
    """
    _check_variant(variant)
    gamma = parse_gamma(gamma)
    regime = _nongeo_precondition(h, tau)
    if math.isinf(gamma):
        raise RegimeError("the non-geometric constant needs a finite gamma")
    mu = pareto_mean(tau)
    k = h.k
    y_min = 0.0 if n is None else n ** -0.5
    acc = _Accumulator()
    for rng, size in _batches(samples, batch, seed):
        low = rng.random((size, k)) < p_low
        y_lo = y_min + (1.0 - y_min) * rng.random((size, k))
        y_hi = (1.0 - rng.random((size, k))) ** (-1.0 / (tau - 1.0))
        y = np.where(low, y_lo, y_hi)
        # density of the proposal at y, and the target's (tau-1) y^-tau
        q = np.where(low, p_low / (1.0 - y_min), (1.0 - p_low) * (tau - 1.0) * y ** (-tau))
        wgt = np.prod((tau - 1.0) * y ** (-tau) / q, axis=1)
        x = rng.random((size, k, d))
        dist_d = {(i, j): _torus_linf(x[:, i - 1], x[:, j - 1]) ** d for i, j in h.pairs()}
        acc.add(wgt * _pair_factor(h, variant, y, dist_d, mu, gamma))
    mean, se = acc.result()
    if n is not None:
        falling = math.prod((n - t) / n for t in range(k))
        mean, se = mean * falling, se * falling
    return ConstantEstimate(mean, se, acc.n, math.inf, method="stratified", pattern=h.to_text(),
                            variant=variant, regime=regime, extra={} if n is None else {"n": n})


# --------------------------------------------------------------------------- empirical


def empirical_constant(h: Pattern, tau: float, gamma: float = 2.0, d: int = 1, n_list=(1024, 2048, 4096),
                       seeds: int = 10, variant: str = "general", f_star: float | None = None,
                       seed_base: int = 0, workers: int = 1) -> list[dict]:
    """Sample, count and normalize by ``n^f*``; one row per ``n`` with mean and CV."""
    if f_star is None:
        from .milp import OptInstance, solve_instance

        f_star = solve_instance(OptInstance(h, tau, gamma, d, variant), check_unique=False).f_star
    rows = []
    for n in n_list:
        vals = []
        t0 = time.perf_counter()
        for s in range(seeds):
            if h.k == 1:
                vals.append(n / n ** f_star)
                continue
            g = sample_girg(GirgParams(n=n, d=d, tau=tau, gamma=gamma, seed=seed_base + s))
            vals.append(count_ordered(g, h, variant, workers=workers) / n ** f_star)
        arr = np.asarray(vals, dtype=np.float64)
        mean = float(arr.mean())
        cv = float(arr.std(ddof=1) / mean) if arr.size > 1 and mean > 0 else 0.0
        rows.append({"n": n, "mean": mean, "cv": cv, "values": arr.tolist(), "f_star": f_star,
                     "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3)})
    return rows
