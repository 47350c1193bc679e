"""Command-line front end: experiment configs, scaling fits, atlas runs and exports."""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .counting import MODES, VertexClassSpec, count_in_class, count_ordered
from .girg import GirgParams, parse_gamma, read_graph, sample_girg, sample_irg, write_graph
from .lp import LPError
from .milp import (
    BudgetExceeded,
    OptInstance,
    SolveReport,
    SolverError,
    build_milp,
    classify_alpha_value,
    solve_instance,
)
from .pattern import Pattern, PatternError, enumerate_patterns, named_pattern, parse_pattern
from .theory import (
    RegimeError,
    empirical_constant,
    hamiltonian_regime,
    mc_geo_constant,
    mc_nongeo_constant,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "resolve_pattern",
    "run_scaling_experiment",
    "fit_slope",
    "slope_from_csv",
    "run_atlas",
    "run_tree_compare",
    "export_structure_dot",
    "SCALING_CSV_FIELDS",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_BUDGET = 4

SCALING_CSV_FIELDS = ("n", "seed", "pattern", "mode", "count", "norm_count", "elapsed_ms")

CLASS_COLORS = {
    "0": "#4c72b0",
    "(tau-2)/(tau-1)": "#55a868",
    "1/2": "#dd8452",
    "1/(tau-1)": "#c44e52",
    "OTHER": "#8c8c8c",
}


class ConfigError(ValueError):
    pass


def resolve_pattern(text: str) -> Pattern:
    """A named pattern (``triangle``, ``P4``, ``K5`` ...) or an edge-list description."""
    text = text.strip()
    try:
        return named_pattern(text)
    except (KeyError, ValueError, PatternError):
        return parse_pattern(text)


def _parse_int(token: str) -> int:
    token = token.strip()
    if "^" in token:
        base, exp = token.split("^", 1)
        return int(base) ** int(exp)
    if "e" in token.lower():
        v = float(token)
        if v != int(v):
            raise ValueError(token)
        return int(v)
    return int(token)


def parse_n_grid(text) -> tuple[int, ...]:
    """``"1024,2048"``, ``"2^10..2^14"`` (powers of the base) or a sequence of ints."""
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        if "^" in lo and "^" in hi:
            b1, e1 = lo.split("^")
            b2, e2 = hi.split("^")
            if b1.strip() != b2.strip():
                raise ConfigError(f"range endpoints need one base: {text!r}")
            return tuple(int(b1) ** e for e in range(int(e1), int(e2) + 1))
        return tuple(range(_parse_int(lo), _parse_int(hi) + 1))
    return tuple(_parse_int(t) for t in text.split(",") if t.strip())


@dataclass
class ExperimentConfig:
    pattern: str = "triangle"
    tau: float = 2.5
    gamma: float = 2.0
    d: int = 1
    mode: str = "general"
    n: tuple[int, ...] = (1024, 2048, 4096)
    seeds: int = 10
    seed_base: int = 0
    eps: float = 0.1
    output: str | None = None
    workers: int = 1
    k: int = 4
    step: float = 0.02
    samples: int = 200_000
    radius: float = 32.0
    method: str = "tree"
    kind: str = "geo"
    node_limit: int = 200_000
    class_alpha: tuple[float, ...] | None = None
    class_beta: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        try:
            self.gamma = parse_gamma(self.gamma)
            self.tau = float(self.tau)
            self.d = int(self.d)
            self.n = parse_n_grid(self.n)
            self.seeds = int(self.seeds)
            self.seed_base = int(self.seed_base)
            self.eps = float(self.eps)
            self.workers = int(self.workers)
            self.k = int(self.k)
            self.step = float(self.step)
            self.samples = int(self.samples)
            self.radius = float(self.radius)
            self.node_limit = int(self.node_limit)
            if isinstance(self.class_alpha, str):
                self.class_alpha = tuple(float(v) for v in self.class_alpha.split(","))
            if isinstance(self.class_beta, str):
                self.class_beta = tuple(float(v) for v in self.class_beta.split(","))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc
        if not 2.0 < self.tau < 3.0:
            raise ConfigError(f"tau must lie in (2, 3), got {self.tau}")
        if not self.gamma > 1.0:
            raise ConfigError(f"gamma must exceed 1 or be inf, got {self.gamma}")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if not self.n or any(v < 2 for v in self.n):
            raise ConfigError("n grid needs sizes >= 2")
        if any(b <= a for a, b in zip(self.n, self.n[1:])):
            raise ConfigError(f"n grid must be strictly increasing, got {self.n}")
        if self.seeds < 1 or self.workers < 1:
            raise ConfigError("seeds and workers must be positive")
        if not 0.0 < self.eps < 1.0:
            raise ConfigError("eps must lie in (0, 1)")
        if self.step <= 0 or self.samples < 2 or self.radius <= 0:
            raise ConfigError("step, samples and radius must be positive")
        if (self.class_alpha is None) != (self.class_beta is None):
            raise ConfigError("class_alpha and class_beta go together")

    def pattern_obj(self) -> Pattern:
        try:
            return resolve_pattern(self.pattern)
        except (PatternError, ValueError) as exc:
            raise ConfigError(f"bad pattern {self.pattern!r}: {exc}") from exc

    def instance(self) -> OptInstance:
        return OptInstance(self.pattern_obj(), self.tau, self.gamma, self.d, self.mode)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["gamma"] = "inf" if math.isinf(self.gamma) else self.gamma
        out["n"] = list(self.n)
        return out


_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Read the ``[experiment]`` section of a flat key-value file; ``overrides`` win."""
    values: dict = {}
    if path is not None:
        cp = configparser.ConfigParser()
        try:
            read = cp.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not read:
            raise ConfigError(f"config file not found: {path}")
        if not cp.has_section("experiment"):
            raise ConfigError(f"{path} has no [experiment] section")
        for key, val in cp.items("experiment"):
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = val
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return ExperimentConfig(**values)


# --------------------------------------------------------------------------- scaling


def fit_slope(ns, means) -> dict:
    """OLS of log mean count on log n; sizes with zero mean are dropped and listed."""
    ns = np.asarray(ns, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    ok = means > 0
    excluded = [int(v) for v in ns[~ok]]
    if ok.sum() < 2:
        return {"slope": math.nan, "intercept": math.nan, "residuals": [], "excluded_n": excluded}
    x, y = np.log(ns[ok]), np.log(means[ok])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return {"slope": float(slope), "intercept": float(intercept), "residuals": resid.tolist(),
            "excluded_n": excluded}


def _mean_by_n(rows) -> tuple[list[int], list[float]]:
    by: dict[int, list[int]] = {}
    for r in rows:
        by.setdefault(int(r["n"]), []).append(int(r["count"]))
    ns = sorted(by)
    return ns, [float(np.mean(by[n])) for n in ns]


def run_scaling_experiment(cfg: ExperimentConfig, *, f_star: float | None = None) -> dict:
    h = cfg.pattern_obj()
    if f_star is None:
        f_star = solve_instance(cfg.instance(), check_unique=False, node_limit=cfg.node_limit).f_star
    spec = None
    if cfg.class_alpha is not None:
        spec = VertexClassSpec(cfg.class_alpha, cfg.class_beta, cfg.eps)
    text = h.to_text()

    def cell(n_seed):
        n, s = n_seed
        t0 = time.perf_counter()
        g = sample_girg(GirgParams(n=n, d=cfg.d, tau=cfg.tau, gamma=cfg.gamma, seed=cfg.seed_base + s))
        c = count_ordered(g, h, cfg.mode) if spec is None else count_in_class(g, h, cfg.mode, spec)
        return {"n": n, "seed": cfg.seed_base + s, "pattern": text, "mode": cfg.mode, "count": c,
                "norm_count": c / n ** f_star, "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3)}

    cells = [(n, s) for n in cfg.n for s in range(cfg.seeds)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(cell, cells))  # map keeps (n, seed) order
    else:
        rows = [cell(c) for c in cells]
    ns, means = _mean_by_n(rows)
    fit = fit_slope(ns, means)
    if cfg.output:
        write_scaling_csv(rows, cfg.output)
    return {"rows": rows, "f_star": f_star, **fit, "means": dict(zip(ns, means))}


def write_scaling_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SCALING_CSV_FIELDS, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({**r, "norm_count": repr(float(r["norm_count"]))})
    return path


def slope_from_csv(path) -> dict:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    ns, means = _mean_by_n(rows)
    return fit_slope(ns, means)


# --------------------------------------------------------------------------- atlas and DOT


def _atlas_row(rep: SolveReport) -> dict:
    d = rep.to_dict()
    d["stats"] = {k: v for k, v in d["stats"].items() if k != "ms"}
    d["alpha_class"] = [classify_alpha_value(a, rep.instance.tau) for a in rep.optimizer.alpha]
    return d


def run_atlas(k: int, tau: float, gamma=2.0, d: int = 1, mode: str = "general", *, output=None,
              node_limit: int = 200_000) -> dict:
    """Solve every connected pattern on ``k`` vertices; optionally write JSON plus one DOT per pattern."""
    if not 1 <= k <= 5:
        raise ConfigError("atlas supports 1 <= k <= 5")
    rows, reports, unclassified = [], [], []
    for idx, h in enumerate(enumerate_patterns(k, connected_only=True)):
        rep = solve_instance(OptInstance(h, tau, gamma, d, mode), node_limit=node_limit)
        row = _atlas_row(rep)
        row["index"] = idx
        rows.append(row)
        reports.append(rep)
        if "OTHER" in row["alpha_class"]:
            unclassified.append({"pattern": row["pattern"], "alpha": row["alpha"], "unique": row["unique"]})
    atlas = {"k": k, "tau": tau, "gamma": "inf" if math.isinf(parse_gamma(gamma)) else gamma, "d": d,
             "variant": mode, "rows": rows, "unclassified": unclassified}
    if output is not None:
        out = Path(output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "atlas.json").write_text(json.dumps(atlas, indent=2, sort_keys=True) + "\n")
        for row, rep in zip(rows, reports):
            (out / f"pattern_{row['index']:02d}.dot").write_text(export_structure_dot(rep, tau))
    return atlas


def _shade(beta: float, d: int) -> str:
    # -1/d -> black, 0 -> light gray
    t = min(max((beta + 1.0 / d) * d, 0.0), 1.0)
    level = int(round(0xD0 * t))
    return f"#{level:02x}{level:02x}{level:02x}"


def export_structure_dot(report: SolveReport, tau: float | None = None) -> str:
    inst = report.instance
    tau = inst.tau if tau is None else tau
    h = inst.pattern
    a = report.optimizer
    non_unique = report.unique != "unique"
    lines = ["graph structure {"]
    label = f"{h.to_text()}  f*={report.f_star:.6g}  tau={tau:g}  {inst.variant}"
    if non_unique:
        lines.append('  bgcolor="#e6e6e6";')
        label += f"  [{report.unique}]"
    lines.append(f'  label="{label}";')
    lines.append("  node [shape=circle, style=filled, fontname=Helvetica];")
    for v in range(1, h.k + 1):
        val = a.alpha[v - 1]
        cls = classify_alpha_value(val, tau)
        lines.append(f'  {v} [label="{v}\\n{val:.4g}", fillcolor="{CLASS_COLORS[cls]}", class="{cls}"];')
    non_edge_style = "dotted" if inst.variant == "induced" else "dashed"
    for i, j in h.pairs():
        b = a.beta_of(i, j)
        style = "solid" if h.has_edge(i, j) else non_edge_style
        lines.append(f'  {i} -- {j} [style={style}, color="{_shade(b, inst.dim)}", label="{b:.4g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- tree comparison


def run_tree_compare(tree: Pattern, params: GirgParams, seeds: int = 10, *, weights=None,
                     seed_base: int = 0, irg_scale: float = 1.0) -> dict:
    """Paired GIRG/IRG ordered counts with a shared weight sequence per seed.

    ``irg_scale`` multiplies the IRG connection probability before capping.
    """
    if not tree.is_tree():
        raise ConfigError(f"{tree.to_text()} is not a tree")
    rows = []
    for s in range(seeds):
        p = GirgParams(n=params.n, d=params.d, tau=params.tau, gamma=params.gamma, seed=seed_base + s)
        geo = count_ordered(sample_girg(p, weights=weights), tree)
        irg = count_ordered(sample_irg(p, weights=weights, scale=irg_scale), tree)
        rows.append({"seed": p.seed, "girg": geo, "irg": irg, "ratio": geo / irg if irg else math.inf})
    ratios = np.array([r["ratio"] for r in rows])
    finite = ratios[np.isfinite(ratios) & (ratios > 0)]
    return {
        "pattern": tree.to_text(),
        "n": params.n,
        "irg_scale": irg_scale,
        "rows": rows,
        "min": float(ratios.min()),
        "max": float(ratios.max()),
        "geo_mean": float(np.exp(np.log(finite).mean())) if finite.size else math.nan,
    }


# --------------------------------------------------------------------------- entry point


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key-value file with an [experiment] section")
    p.add_argument("--pattern")
    p.add_argument("--tau", type=float)
    p.add_argument("--gamma")
    p.add_argument("-d", "--d", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--output", "-o")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="girgmotif", description="Subgraph counts in geometric random graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal structure of one pattern")
    _add_common(p)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--no-unique", action="store_true")

    p = sub.add_parser("atlas", help="optimal structures of all connected patterns on k vertices")
    _add_common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--node-limit", type=int)

    p = sub.add_parser("sample", help="sample a GIRG or IRG and write an edge list")
    _add_common(p)
    p.add_argument("--n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=("girg", "irg"), default="girg")

    p = sub.add_parser("count", help="ordered pattern count on a stored or freshly sampled graph")
    _add_common(p)
    p.add_argument("--graph", help="edge-list path written by 'sample'")
    p.add_argument("--n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("scaling", help="count over an n grid and fit the log-log slope")
    _add_common(p)
    p.add_argument("--n")
    p.add_argument("--seeds", type=int)
    p.add_argument("--seed-base", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--class-alpha")
    p.add_argument("--class-beta")

    p = sub.add_parser("constants", help="Monte Carlo or empirical limit constants")
    _add_common(p)
    p.add_argument("--kind", choices=("geo", "nongeo", "empirical"))
    p.add_argument("--samples", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--method", choices=("tree", "box"))
    p.add_argument("--n")
    p.add_argument("--seeds", type=int)
    p.add_argument("--seed-base", type=int)

    p = sub.add_parser("tree-compare", help="paired GIRG/IRG tree counts")
    _add_common(p)
    p.add_argument("--n")
    p.add_argument("--seeds", type=int)
    p.add_argument("--seed-base", type=int)

    p = sub.add_parser("export-dot", help="DOT diagram of an optimal structure")
    _add_common(p)
    p.add_argument("--report", help="SolveReport JSON; solved from the flags when absent")

    p = sub.add_parser("export-lp", help="write the MILP in LP text format")
    _add_common(p)
    return ap


def _overrides(ns: argparse.Namespace) -> dict:
    skip = {"command", "config", "report", "graph", "seed", "model", "exact", "no_unique"}
    return {k: v for k, v in vars(ns).items() if k not in skip and k in _CONFIG_KEYS}


def _emit(obj, output=None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2)
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _report_from_json(path) -> SolveReport:
    from .milp import Assignment

    data = json.loads(Path(path).read_text())
    inst = OptInstance(parse_pattern(data["pattern"]), data["tau"], data["gamma"], data["d"], data["variant"])
    opt = Assignment.from_dict({"alpha": data["alpha"], "beta": data["beta"]})
    return SolveReport(inst, opt, data["f_star"], data["unique"], [], data.get("stats", {}))


def _run(ns: argparse.Namespace) -> int:
    cfg = load_config(ns.config, _overrides(ns))
    cmd = ns.command
    if cmd == "solve":
        rep = solve_instance(cfg.instance(), check_unique=not ns.no_unique, node_limit=cfg.node_limit,
                             exact=ns.exact)
        _emit(rep.to_dict(), cfg.output)
    elif cmd == "atlas":
        atlas = run_atlas(cfg.k, cfg.tau, cfg.gamma, cfg.d, cfg.mode, output=cfg.output, node_limit=cfg.node_limit)
        if not cfg.output:
            _emit(atlas)
        else:
            flags = {r["pattern"]: r["unique"] for r in atlas["rows"]}
            _emit({"output": cfg.output, "patterns": len(atlas["rows"]), "unique": flags,
                   "unclassified": atlas["unclassified"]})
    elif cmd == "sample":
        params = GirgParams(n=cfg.n[0], d=cfg.d, tau=cfg.tau, gamma=cfg.gamma, seed=ns.seed)
        g = sample_girg(params) if ns.model == "girg" else sample_irg(params)
        summary = {"model": g.model, "n": g.n, "edges": g.num_edges, "mean_degree": g.mean_degree}
        if cfg.output:
            edges, side = write_graph(g, cfg.output)
            summary.update(edge_list=str(edges), sidecar=str(side))
        _emit(summary)
    elif cmd == "count":
        h = cfg.pattern_obj()
        if ns.graph:
            g = read_graph(ns.graph)
        else:
            g = sample_girg(GirgParams(n=cfg.n[0], d=cfg.d, tau=cfg.tau, gamma=cfg.gamma, seed=ns.seed))
        t0 = time.perf_counter()
        c = count_ordered(g, h, cfg.mode, workers=cfg.workers)
        _emit({"n": g.n, "seed": g.params.seed if hasattr(g, "params") else None, "pattern": h.to_text(),
               "mode": cfg.mode, "count": c, "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3)})
    elif cmd == "scaling":
        res = run_scaling_experiment(cfg)
        _emit({"pattern": cfg.pattern_obj().to_text(), "f_star": res["f_star"], "slope": res["slope"],
               "intercept": res["intercept"], "residuals": res["residuals"], "excluded_n": res["excluded_n"],
               "csv": cfg.output})
    elif cmd == "constants":
        h = cfg.pattern_obj()
        if cfg.kind == "geo":
            est = mc_geo_constant(h, cfg.tau, cfg.gamma, cfg.d, cfg.mode, cfg.samples, cfg.radius,
                                  cfg.seed_base, method=cfg.method)
            _emit(est.to_dict(), cfg.output)
        elif cfg.kind == "nongeo":
            est = mc_nongeo_constant(h, cfg.tau, cfg.gamma, cfg.d, cfg.mode, cfg.samples, cfg.seed_base)
            _emit(est.to_dict(), cfg.output)
        else:
            rows = empirical_constant(h, cfg.tau, cfg.gamma, cfg.d, cfg.n, cfg.seeds, cfg.mode,
                                      seed_base=cfg.seed_base)
            regime = hamiltonian_regime(h.k, cfg.tau).regime if h.k >= 3 else None
            _emit({"pattern": h.to_text(), "variant": cfg.mode, "regime": regime, "rows": rows}, cfg.output)
    elif cmd == "tree-compare":
        params = GirgParams(n=cfg.n[0], d=cfg.d, tau=cfg.tau, gamma=cfg.gamma)
        _emit(run_tree_compare(cfg.pattern_obj(), params, cfg.seeds, seed_base=cfg.seed_base), cfg.output)
    elif cmd == "export-dot":
        rep = _report_from_json(ns.report) if ns.report else solve_instance(cfg.instance(), node_limit=cfg.node_limit)
        _emit(export_structure_dot(rep, rep.instance.tau), cfg.output)
    elif cmd == "export-lp":
        _emit(build_milp(cfg.instance()).to_lp_text(), cfg.output)
    return EXIT_OK


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return _run(ns)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SolverError, LPError, FloatingPointError, OverflowError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, RegimeError, PatternError, ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
