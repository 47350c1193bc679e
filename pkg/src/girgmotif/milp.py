"""Exponent function, optimal-structure MILP, branch-and-bound and uniqueness checks.

Notation: ``alpha_i`` are weight exponents, ``beta_ij`` distance exponents
of pattern vertex pairs, listed for ``(1,2), (1,3), ..., (k-1,k)``.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lp import OPTIMAL, LinearProgram, solve_lp
from .pattern import Pattern, automorphism_count

__all__ = [
    "VARIANTS",
    "Assignment",
    "OptInstance",
    "MilpModel",
    "SolveReport",
    "GridResult",
    "SolverError",
    "BudgetExceeded",
    "objective_f",
    "edge_terms",
    "is_feasible",
    "special_assignments",
    "build_milp",
    "branch_and_bound",
    "solve_instance",
    "check_uniqueness",
    "grid_oracle",
    "grid_bruteforce",
    "classify_alpha_value",
    "alpha_class_values",
    "rescale_dimension",
    "pair_list",
]

VARIANTS = ("general", "induced")
UNIQUE, NON_UNIQUE, AMBIGUOUS = "unique", "non-unique", "tolerance-ambiguous"

CUT_TOL = 1e-7
TIGHT_CUT_TOL = 1e-9
SAME_TOL = 1e-6
INT_TOL = 1e-7
TRIANGLE_TOL = 1e-9
HARD_EDGE_TOL = 1e-12
DEFAULT_NODE_LIMIT = 200_000


class SolverError(RuntimeError):
    pass


class BudgetExceeded(SolverError):
    pass


def pair_list(k: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, k + 1), 2))


def _pair_index(k: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return (i - 1) * (2 * k - i) // 2 + (j - i - 1)


@dataclass(frozen=True)
class Assignment:
    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        k = len(alpha)
        if len(beta) != k * (k - 1) // 2:
            raise ValueError(f"beta needs {k * (k - 1) // 2} entries for k={k}, got {len(beta)}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def beta_of(self, i: int, j: int) -> float:
        return self.beta[_pair_index(self.k, i, j)]

    def distance(self, other: "Assignment") -> float:
        a = np.abs(np.subtract(self.alpha, other.alpha))
        b = np.abs(np.subtract(self.beta, other.beta))
        return float(max(a.max(initial=0.0), b.max(initial=0.0)))

    def to_dict(self) -> dict:
        pairs = pair_list(self.k)
        return {"alpha": list(self.alpha), "beta": [[i, j, v] for (i, j), v in zip(pairs, self.beta)]}

    @classmethod
    def from_dict(cls, data: dict) -> "Assignment":
        alpha = data["alpha"]
        k = len(alpha)
        beta = [0.0] * (k * (k - 1) // 2)
        for i, j, v in data["beta"]:
            beta[_pair_index(k, int(i), int(j))] = float(v)
        return cls(tuple(alpha), tuple(beta))


def _gamma(value) -> float:
    if isinstance(value, str):
        return math.inf if value.strip().lower() in ("inf", "infinity", "oo") else float(value)
    return float(value)


@dataclass(frozen=True)
class OptInstance:
    pattern: Pattern
    tau: float
    gamma: float = 2.0
    dim: int = 1
    variant: str = "general"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", _gamma(self.gamma))
        if not 2.0 < self.tau < 3.0:
            raise ValueError(f"tau must lie in (2, 3), got {self.tau!r}")
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1 or be infinite, got {self.gamma!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be an integer >= 1, got {self.dim!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def k(self) -> int:
        return self.pattern.k

    @property
    def alpha_max(self) -> float:
        return 1.0 / (self.tau - 1.0)

    @property
    def beta_min(self) -> float:
        return -1.0 / self.dim

    @property
    def hard(self) -> bool:
        return math.isinf(self.gamma)

    def with_(self, **changes) -> "OptInstance":
        data = dict(pattern=self.pattern, tau=self.tau, gamma=self.gamma, dim=self.dim, variant=self.variant)
        data.update(changes)
        return OptInstance(**data)

    def gamma_text(self):
        return "inf" if self.hard else self.gamma


def _check_dims(inst: OptInstance, a: Assignment) -> None:
    if a.k != inst.k:
        raise ValueError(f"assignment has k={a.k}, instance has k={inst.k}")


def edge_terms(inst: OptInstance, a: Assignment) -> list[float]:
    """``alpha_i + alpha_j - d beta_ij - 1`` per pattern edge (unclipped)."""
    _check_dims(inst, a)
    d = inst.dim
    return [a.alpha[i - 1] + a.alpha[j - 1] - d * a.beta_of(i, j) - 1.0 for i, j in inst.pattern.edges]


def objective_f(inst: OptInstance, a: Assignment) -> float:
    """Growth exponent of the expected count in the class of ``a``.

    For infinite gamma, edge terms above ``-1e-12`` count as zero.
    """
    _check_dims(inst, a)
    k, d, tau = inst.k, inst.dim, inst.tau
    val = k + (1.0 - tau) * sum(a.alpha)
    for j in range(2, k + 1):
        val += d * min(a.beta_of(i, j) for i in range(1, j))
    terms = edge_terms(inst, a)
    if inst.hard:
        if any(t < -HARD_EDGE_TOL for t in terms):
            return -math.inf
    else:
        val += inst.gamma * sum(min(t, 0.0) for t in terms)
    return val


def is_feasible(inst: OptInstance, a: Assignment, tol: float = 1e-7) -> bool:
    _check_dims(inst, a)
    k, d = inst.k, inst.dim
    if any(x < -tol or x > inst.alpha_max + tol for x in a.alpha):
        return False
    if any(b < inst.beta_min - tol or b > tol for b in a.beta):
        return False
    for i, j in pair_list(k):
        for s in range(1, k + 1):
            if s in (i, j):
                continue
            if a.beta_of(i, j) > max(a.beta_of(i, s), a.beta_of(s, j)) + tol:
                return False
    if inst.variant == "induced":
        for i, j in inst.pattern.non_edges():
            if a.alpha[i - 1] + a.alpha[j - 1] > 1.0 + d * a.beta_of(i, j) + tol:
                return False
    return True


def special_assignments(k: int, dim: int) -> tuple[Assignment, Assignment]:
    """The hub point (alpha=1/2, beta=0) and the local point (alpha=0, beta=-1/d)."""
    p = k * (k - 1) // 2
    return (Assignment((0.5,) * k, (0.0,) * p), Assignment((0.0,) * k, (-1.0 / dim,) * p))


# --------------------------------------------------------------------------- model


@dataclass
class MilpModel:
    """Maximization model ``c.x`` s.t. ``A_ub x <= b_ub``, bounds, binaries."""

    names: list[str]
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    row_names: list[str]
    lb: np.ndarray
    ub: np.ndarray
    binary: np.ndarray
    alpha_idx: list[int]
    beta_idx: list[int]
    zeta_idx: list[int]
    delta_idx: list[int]
    z_triples: list[tuple[int, int, int]]
    instance: OptInstance

    @property
    def n_continuous(self) -> int:
        return len(self.names) - len(self.binary)

    @property
    def n_binary(self) -> int:
        return len(self.binary)

    def count_rows(self, prefix: str) -> int:
        return sum(1 for r in self.row_names if r.startswith(prefix))

    def vector_from_assignment(self, a: Assignment) -> np.ndarray:
        """Complete MILP vector for a feasible ``a`` (tight ``zeta``/``delta``, consistent ``z``)."""
        inst = self.instance
        x = np.zeros(len(self.names))
        x[self.alpha_idx] = a.alpha
        x[self.beta_idx] = a.beta
        k = inst.k
        for t, j in enumerate(range(2, k + 1)):
            x[self.zeta_idx[t]] = min(a.beta_of(i, j) for i in range(1, j))
        for t, term in enumerate(edge_terms(inst, a)):
            x[self.delta_idx[t]] = 0.0 if inst.hard else min(term, 0.0)
        for t, (i, j, s) in enumerate(self.z_triples):
            x[self.binary[t]] = 1.0 if a.beta_of(i, s) >= a.beta_of(j, s) else 0.0
        return x

    def assignment_from_vector(self, x) -> Assignment:
        x = np.asarray(x, dtype=np.float64) + 0.0  # drop negative zeros
        return Assignment(tuple(x[self.alpha_idx]), tuple(x[self.beta_idx]))

    def to_lp_text(self) -> str:
        """The model in LP file format."""

        def fmt(v: float) -> str:
            return repr(float(v))

        def expr(coefs) -> str:
            parts = []
            for j, v in coefs:
                if v == 0:
                    continue
                sign = "-" if v < 0 else "+"
                parts.append(f"{sign} {fmt(abs(v))} {self.names[j]}")
            if not parts:
                return "0 " + self.names[0]
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else text

        lines = ["\\ pattern " + self.instance.pattern.to_text(), "Maximize",
                 " obj: " + expr(enumerate(self.c))]
        lines.append("Subject To")
        for r, name in enumerate(self.row_names):
            row = self.A_ub[r]
            lines.append(f" {name}: {expr(enumerate(row))} <= {fmt(self.b_ub[r])}")
        lines.append("Bounds")
        bset = set(self.binary.tolist())
        for j, nm in enumerate(self.names):
            if j in bset:
                continue
            lines.append(f" {fmt(self.lb[j])} <= {nm} <= {fmt(self.ub[j])}")
        lines.append("Binary")
        for j in self.binary:
            lines.append(f" {self.names[j]}")
        lines.append("End")
        return "\n".join(lines) + "\n"


def build_milp(inst: OptInstance) -> MilpModel:
    """Variables ``alpha, beta, zeta_2..zeta_k, delta (per edge), z_ijs``.

    Infinite gamma fixes ``delta`` to zero, which turns the ``delta`` rows into
    ``alpha_i + alpha_j >= 1 + d beta_ij`` for every edge.
    """
    h, k, d, tau = inst.pattern, inst.k, inst.dim, inst.tau
    pairs = pair_list(k)
    names: list[str] = []
    lb: list[float] = []
    ub: list[float] = []

    def add(name, lo, hi):
        names.append(name)
        lb.append(lo)
        ub.append(hi)
        return len(names) - 1

    alpha_idx = [add(f"a_{i}", 0.0, inst.alpha_max) for i in range(1, k + 1)]
    beta_idx = [add(f"b_{i}_{j}", inst.beta_min, 0.0) for i, j in pairs]
    zeta_idx = [add(f"zeta_{j}", inst.beta_min, 0.0) for j in range(2, k + 1)]
    delta_lo = 0.0 if inst.hard else -1.0
    delta_idx = [add(f"delta_{i}_{j}", delta_lo, 0.0) for i, j in h.edges]
    z_triples = [(i, j, s) for i, j in pairs for s in range(1, k + 1) if s not in (i, j)]
    binary = [add(f"z_{i}_{j}_{s}", 0.0, 1.0) for i, j, s in z_triples]
    nv = len(names)

    c = np.zeros(nv)
    c[alpha_idx] = 1.0 - tau
    c[zeta_idx] = d
    if not inst.hard:
        c[delta_idx] = inst.gamma

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    row_names: list[str] = []

    def row(name, coefs, b):
        r = np.zeros(nv)
        for j, v in coefs:
            r[j] += v
        rows.append(r)
        rhs.append(b)
        row_names.append(name)

    def bidx(i, j):
        return beta_idx[_pair_index(k, i, j)]

    for t, j in enumerate(range(2, k + 1)):
        for i in range(1, j):
            row(f"zeta_{j}_{i}", [(zeta_idx[t], 1.0), (bidx(i, j), -1.0)], 0.0)
    for t, (i, j, s) in enumerate(z_triples):
        z = binary[t]
        # z = 1 selects beta_is as the max, z = 0 selects beta_js
        row(f"tri_{i}_{j}_{s}_a", [(bidx(i, j), 1.0), (bidx(i, s), -1.0), (z, 1.0 / d)], 1.0 / d)
        row(f"tri_{i}_{j}_{s}_b", [(bidx(i, j), 1.0), (bidx(j, s), -1.0), (z, -1.0 / d)], 0.0)
    for t, (i, j) in enumerate(h.edges):
        row(f"edge_{i}_{j}", [(delta_idx[t], 1.0), (alpha_idx[i - 1], -1.0), (alpha_idx[j - 1], -1.0),
                              (bidx(i, j), float(d))], -1.0)
    if inst.variant == "induced":
        for i, j in h.non_edges():
            row(f"nonedge_{i}_{j}", [(alpha_idx[i - 1], 1.0), (alpha_idx[j - 1], 1.0), (bidx(i, j), -float(d))], 1.0)

    A = np.vstack(rows) if rows else np.zeros((0, nv))
    return MilpModel(names=names, c=c, A_ub=A, b_ub=np.asarray(rhs, dtype=np.float64), row_names=row_names,
                     lb=np.asarray(lb), ub=np.asarray(ub), binary=np.asarray(binary, dtype=np.int64),
                     alpha_idx=alpha_idx, beta_idx=beta_idx, zeta_idx=zeta_idx, delta_idx=delta_idx,
                     z_triples=z_triples, instance=inst)


# --------------------------------------------------------------------------- branch and bound


@dataclass
class MilpResult:
    status: str
    x: np.ndarray | None
    value: float | None
    nodes: int
    lp_iters: int


def _triangle_ok(model: MilpModel, x: np.ndarray) -> bool:
    inst = model.instance
    a = model.assignment_from_vector(x)
    for i, j, s in model.z_triples:
        if a.beta_of(i, j) > max(a.beta_of(i, s), a.beta_of(j, s)) + TRIANGLE_TOL:
            return False
    return True


def _violated_binaries(model: MilpModel, x: np.ndarray) -> list[int]:
    a = model.assignment_from_vector(x)
    out = []
    for t, (i, j, s) in enumerate(model.z_triples):
        if a.beta_of(i, j) > max(a.beta_of(i, s), a.beta_of(j, s)) + TRIANGLE_TOL:
            out.append(t)
    return out


def _rows_ok(A, b, x, tol=1e-9) -> bool:
    if A is None or A.size == 0:
        return True
    return bool(np.all(A.dot(x) <= b + tol))


def branch_and_bound(model: MilpModel, objective=None, *, A_extra=None, b_extra=None, A_eq=None, b_eq=None,
                     incumbents: Sequence[np.ndarray] = (), node_limit: int = DEFAULT_NODE_LIMIT,
                     prune_tol: float = 1e-9, exact: bool = False) -> MilpResult:
    """Best-bound branch-and-bound over the ``z`` binaries.

    A node whose relaxed ``beta`` already satisfies every triangle-max
    constraint is completed to an integral point with the same ``alpha,
    beta`` and no worse objective, so it is fathomed without branching.
    Among violated triples the most fractional ``z`` is branched on (ties
    to the lowest index); children are explored ``z = 0`` first.
    """
    c = model.c if objective is None else np.asarray(objective, dtype=np.float64)
    A_ub, b_ub = model.A_ub, model.b_ub
    if A_extra is not None and len(A_extra):
        A_ub = np.vstack([A_ub, np.asarray(A_extra, dtype=np.float64)])
        b_ub = np.concatenate([b_ub, np.asarray(b_extra, dtype=np.float64)])
    A_eq = None if A_eq is None or len(A_eq) == 0 else np.asarray(A_eq, dtype=np.float64)
    b_eq = None if A_eq is None else np.asarray(b_eq, dtype=np.float64)
    nodes = 0
    lp_iters = 0
    best_val = -math.inf
    best_x = None

    def consider(x):
        nonlocal best_val, best_x
        if not _rows_ok(A_ub, b_ub, x):
            return
        if A_eq is not None and not np.all(np.abs(A_eq.dot(x) - b_eq) <= 1e-9):
            return
        v = float(c.dot(x))
        if v > best_val + prune_tol or best_x is None and v > best_val:
            best_val, best_x = v, x

    for x in incumbents:
        consider(np.asarray(x, dtype=np.float64))

    def relax(lb, ub):
        nonlocal lp_iters, nodes
        nodes += 1
        if nodes > node_limit:
            raise BudgetExceeded(f"branch-and-bound node limit {node_limit} exceeded")
        res = solve_lp(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, lb=lb, ub=ub), exact=exact)
        lp_iters += res.iterations
        if res.status != OPTIMAL:
            return None
        x = np.asarray(res.x, dtype=np.float64)
        return float(res.value), x

    def complete(x):
        # integral point sharing the relaxation's alpha and beta
        return model.vector_from_assignment(model.assignment_from_vector(x))

    heap: list = []
    seq = itertools.count()
    root = relax(model.lb.copy(), model.ub.copy())
    if root is not None:
        heapq.heappush(heap, (-root[0], next(seq), model.lb.copy(), model.ub.copy(), root[1]))
    while heap:
        negb, _, lb, ub, x = heapq.heappop(heap)
        bound = -negb
        if best_x is not None and bound <= best_val + prune_tol:
            break
        free = lb[model.binary] < ub[model.binary]
        # a violation left on a fixed z is rounding noise; branching on it would recreate the node
        viol = [t for t in _violated_binaries(model, x) if free[t]]
        if not viol:
            consider(complete(x))
            if best_x is None or bound > best_val + prune_tol:
                # completion lost feasibility of extra rows; fall back to exact integrality
                zs = x[model.binary]
                if np.all(np.minimum(zs, 1 - zs) <= INT_TOL):
                    consider(x)
                else:
                    viol = [t for t in range(len(model.binary)) if free[t]]
            if not viol:
                continue
        zs = x[model.binary[viol]]
        frac = np.minimum(zs, 1.0 - zs)
        pick = viol[int(np.argmax(frac))]
        j = model.binary[pick]
        for v in (0.0, 1.0):
            clb, cub = lb.copy(), ub.copy()
            clb[j] = cub[j] = v
            child = relax(clb, cub)
            if child is None:
                continue
            if best_x is not None and child[0] <= best_val + prune_tol:
                continue
            heapq.heappush(heap, (-child[0], next(seq), clb, cub, child[1]))
    if best_x is None:
        return MilpResult("infeasible", None, None, nodes, lp_iters)
    return MilpResult(OPTIMAL, best_x, best_val, nodes, lp_iters)


# --------------------------------------------------------------------------- solve + uniqueness


@dataclass
class SolveReport:
    instance: OptInstance
    optimizer: Assignment
    f_star: float
    unique: str
    alternates: list[Assignment] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        inst = self.instance
        opt = self.optimizer.to_dict()
        return {
            "pattern": inst.pattern.to_text(),
            "tau": inst.tau,
            "gamma": inst.gamma_text(),
            "d": inst.dim,
            "variant": inst.variant,
            "f_star": self.f_star,
            "alpha": opt["alpha"],
            "beta": opt["beta"],
            "unique": self.unique,
            "alternates": [a.to_dict() for a in self.alternates],
            "stats": self.stats,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _objective_cut(model: MilpModel, target: float, tol: float):
    c = model.c
    return np.vstack([c, -c]), np.array([target + tol, -(target - tol)])


def check_uniqueness(inst: OptInstance, f_star: float, reference: Assignment | None = None, *,
                     node_limit: int = DEFAULT_NODE_LIMIT, model: MilpModel | None = None):
    """Re-optimize each ``+-alpha_i`` and ``+-beta_ij`` on the optimal face.

    The face is cut out by ``|objective - (f_star - k)| <= 1e-7``. A
    coordinate whose reference value sits on the bound it is pushed
    towards cannot move and is not re-solved. A move beyond ``1e-6`` whose
    end point is itself suboptimal by more than ``1e-9`` can be an artifact
    of the cut's slack on a flat face, so that direction is re-solved with
    a ``1e-9`` cut before it counts. Returns ``(verdict,
    alternates, stats)``; alternates are the distinct re-solve optimizers
    farther than ``1e-6`` from the reference.
    """
    if model is None:
        model = build_milp(inst)
    if reference is None:
        reference = solve_instance(inst, check_unique=False, node_limit=node_limit).optimizer
    A_cut, b_cut = _objective_cut(model, f_star - inst.k, CUT_TOL)
    A_tight, b_tight = _objective_cut(model, f_star - inst.k, TIGHT_CUT_TOL)
    retried = 0
    ref_x = model.vector_from_assignment(reference)
    coords = list(model.alpha_idx) + list(model.beta_idx)
    nodes = lp_iters = solves = skipped = 0
    alternates: list[Assignment] = []
    verdict = UNIQUE
    for j in coords:
        for sigma in (1.0, -1.0):
            bound = model.ub[j] if sigma > 0 else model.lb[j]
            if abs(ref_x[j] - bound) <= 1e-12:
                skipped += 1
                continue
            obj = np.zeros(len(model.names))
            obj[j] = sigma
            res = branch_and_bound(model, obj, A_extra=A_cut, b_extra=b_cut, incumbents=[ref_x],
                                   node_limit=node_limit, prune_tol=1e-9)
            solves += 1
            nodes += res.nodes
            lp_iters += res.lp_iters
            if res.status != OPTIMAL:
                verdict = AMBIGUOUS
                continue
            if sigma * res.x[j] > sigma * ref_x[j] + SAME_TOL and \
                    objective_f(inst, model.assignment_from_vector(res.x)) < f_star - TIGHT_CUT_TOL:
                # the move may come from the cut's slack alone; look again on a tight face
                res = branch_and_bound(model, obj, A_extra=A_tight, b_extra=b_tight, incumbents=[ref_x],
                                       node_limit=node_limit, prune_tol=1e-9)
                retried += 1
                nodes += res.nodes
                lp_iters += res.lp_iters
                if res.status != OPTIMAL:
                    verdict = AMBIGUOUS
                    continue
            if sigma * res.x[j] > sigma * ref_x[j] + SAME_TOL:
                if verdict == UNIQUE:
                    verdict = NON_UNIQUE
                alt = model.assignment_from_vector(res.x)
                if all(alt.distance(b) > SAME_TOL for b in alternates):
                    alternates.append(alt)
    stats = {"solves": solves, "skipped": skipped, "retried": retried, "nodes": nodes, "lp_iters": lp_iters}
    return verdict, alternates, stats


def _lex_min(model: MilpModel, target: float, node_limit: int):
    """Lexicographically smallest ``(alpha, beta)`` with model objective ``target``."""
    A_eq = [model.c.copy()]
    b_eq = [target]
    x_best = None
    nodes = lp_iters = 0
    for j in list(model.alpha_idx) + list(model.beta_idx):
        obj = np.zeros(len(model.names))
        obj[j] = -1.0
        res = branch_and_bound(model, obj, A_eq=np.vstack(A_eq), b_eq=np.array(b_eq), node_limit=node_limit)
        nodes += res.nodes
        lp_iters += res.lp_iters
        if res.status != OPTIMAL:
            break
        x_best = res.x
        row = np.zeros(len(model.names))
        row[j] = 1.0
        A_eq.append(row)
        b_eq.append(float(res.x[j]))
    return x_best, nodes, lp_iters


def solve_instance(inst: OptInstance, *, check_unique: bool = True, canonical: bool = True,
                   node_limit: int = DEFAULT_NODE_LIMIT, exact: bool = False) -> SolveReport:
    """Global optimum of the MILP with ``f_star = k + objective``.

    When the optimum is not unique and ``canonical`` is set, the reported
    optimizer is the lexicographically smallest one on the optimal face, so
    it does not depend on the pivoting path.
    """
    t0 = time.perf_counter()
    model = build_milp(inst)
    seeds = []
    for a in special_assignments(inst.k, inst.dim):
        if is_feasible(inst, a, tol=1e-12) and objective_f(inst, a) > -math.inf:
            seeds.append(model.vector_from_assignment(a))
    res = branch_and_bound(model, incumbents=seeds, node_limit=node_limit, exact=exact)
    if res.status != OPTIMAL:
        raise SolverError(f"MILP reported {res.status} for {inst.pattern.to_text()}")
    f_star = inst.k + res.value
    optimizer = model.assignment_from_vector(res.x)
    stats = {"nodes": res.nodes, "lp_iters": res.lp_iters}
    verdict, alternates = UNIQUE, []
    if check_unique:
        verdict, alternates, ustats = check_uniqueness(inst, f_star, optimizer, node_limit=node_limit, model=model)
        stats["nodes"] += ustats["nodes"]
        stats["lp_iters"] += ustats["lp_iters"]
        stats["uniqueness_solves"] = ustats["solves"]
        if verdict != UNIQUE and canonical:
            x, n2, it2 = _lex_min(model, res.value, node_limit)
            stats["nodes"] += n2
            stats["lp_iters"] += it2
            if x is not None:
                optimizer = model.assignment_from_vector(x)
    stats["ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    return SolveReport(inst, optimizer, f_star, verdict, alternates, stats)


# --------------------------------------------------------------------------- lattice oracle


@dataclass
class GridResult:
    assignment: Assignment
    value: float
    points: int


def _lattice(top: float, step: float) -> np.ndarray:
    m = int(math.floor(top / step + 1e-9))
    vals = [t * step for t in range(m + 1)]
    if top - vals[-1] > 1e-12:
        vals.append(top)
    return np.asarray(vals)


def _automorphisms(p: Pattern) -> list[tuple[int, ...]]:
    es = set(p.edges)
    out = []
    for perm in itertools.permutations(range(p.k)):
        if all((min(perm[i - 1], perm[j - 1]) + 1, max(perm[i - 1], perm[j - 1]) + 1) in es for i, j in p.edges):
            out.append(perm)
    return out


def _splits(mask: int):
    low = mask & -mask
    rest = mask ^ low
    sub = rest
    while True:
        a = low | sub
        if a != mask:
            yield a, mask ^ a
        if sub == 0:
            break
        sub = (sub - 1) & rest


def _bits(mask: int) -> list[int]:
    return [t for t in range(mask.bit_length()) if mask >> t & 1]


class _SubsetDP:
    """Best dendrogram heights for a batch of alpha vectors on a height lattice."""

    def __init__(self, inst: OptInstance, heights: np.ndarray):
        self.inst = inst
        self.H = heights
        k = inst.k
        self.masks = sorted((m for m in range(1, 1 << k) if bin(m).count("1") >= 2), key=lambda m: bin(m).count("1"))
        self.split_table = {m: list(_splits(m)) for m in self.masks}
        es = set(inst.pattern.edges)
        self.cross = {}
        for m in self.masks:
            for a, b in self.split_table[m]:
                e, ne = [], []
                for i in _bits(a):
                    for j in _bits(b):
                        pr = (min(i, j) + 1, max(i, j) + 1)
                        (e if pr in es else ne).append(pr)
                self.cross[(a, b)] = (e, ne)

    def run(self, alpha: np.ndarray, keep: bool = False):
        inst = self.inst
        k, d, H = inst.k, inst.dim, self.H
        A = alpha.shape[0]
        s = {}
        for i, j in pair_list(k):
            s[(i, j)] = (alpha[:, i - 1] + alpha[:, j - 1] - 1.0) / d
        pen = {}
        for pr in inst.pattern.edges:
            over = H[None, :] - s[pr][:, None]
            if inst.hard:
                pen[pr] = np.where(over > HARD_EDGE_TOL, np.inf, 0.0)
            else:
                pen[pr] = inst.gamma * d * np.maximum(over, 0.0)
        bad = {}
        if inst.variant == "induced":
            for pr in inst.pattern.non_edges():
                bad[pr] = H[None, :] < s[pr][:, None] - HARD_EDGE_TOL
        P = {}
        G = {}
        dh = d * H[None, :]
        for m in self.masks:
            best = None
            for a, b in self.split_table[m]:
                val = np.broadcast_to(dh, (A, H.size)).copy()
                if a in P:
                    val += P[a]
                if b in P:
                    val += P[b]
                e, ne = self.cross[(a, b)]
                for pr in e:
                    val -= pen[pr]
                for pr in ne:
                    if pr in bad:
                        val[bad[pr]] = -np.inf
                best = val if best is None else np.maximum(best, val)
            G[m] = best
            P[m] = np.maximum.accumulate(best, axis=1)
        full = (1 << k) - 1
        top = P[full][:, -1]
        return (top, G, P) if keep else top

    def reconstruct(self, alpha_row: np.ndarray) -> tuple[float, ...]:
        inst = self.inst
        k, d, H = inst.k, inst.dim, self.H
        top, G, P = self.run(alpha_row[None, :], keep=True)
        beta = {}
        es = set(inst.pattern.edges)

        def descend(m, hidx):
            # height index of cluster m given its parent allows up to hidx
            row = P[m][0]
            target = row[hidx]
            h = int(np.nonzero(G[m][0][: hidx + 1] == target)[0][0])
            # split achieving G[m][h]
            for a, b in self.split_table[m]:
                val = d * H[h]
                for c_ in (a, b):
                    if c_ in P:
                        val += P[c_][0][h]
                e, ne = self.cross[(a, b)]
                s_ok = True
                for pr in e:
                    sv = (alpha_row[pr[0] - 1] + alpha_row[pr[1] - 1] - 1.0) / d
                    over = H[h] - sv
                    if inst.hard:
                        if over > HARD_EDGE_TOL:
                            s_ok = False
                    else:
                        val -= inst.gamma * d * max(over, 0.0)
                if inst.variant == "induced":
                    for pr in ne:
                        sv = (alpha_row[pr[0] - 1] + alpha_row[pr[1] - 1] - 1.0) / d
                        if H[h] < sv - HARD_EDGE_TOL:
                            s_ok = False
                if s_ok and abs(val - G[m][0][h]) <= 1e-12 * max(1.0, abs(val)):
                    for i in _bits(a):
                        for j in _bits(b):
                            beta[(min(i, j) + 1, max(i, j) + 1)] = H[h]
                    for c_ in (a, b):
                        if c_ in P:
                            descend(c_, h)
                    return
            raise SolverError("lattice reconstruction failed")

        descend((1 << k) - 1, H.size - 1)
        del es
        return tuple(beta[pr] for pr in pair_list(k))


def grid_oracle(inst: OptInstance, step: float, *, max_points: float = 2e9, chunk: int = 8192) -> GridResult:
    """Exhaustive maximum of ``objective_f`` over a lattice.

    ``alpha`` runs over ``{0, step, 2 step, ...}`` up to ``1/(tau-1)`` and
    ``beta`` over ``{0, -step, ...}`` down to ``-1/d``; both box endpoints
    are always included. Triangle-max-feasible ``beta`` are exactly the
    height assignments of a rooted dendrogram over the pattern vertices, so
    for each ``alpha`` vector the best lattice ``beta`` comes from a
    dynamic program over vertex subsets instead of a scan over every
    ``beta`` vector. ``alpha`` vectors equivalent under a pattern
    automorphism are evaluated once, and vectors whose weight term alone
    cannot beat the incumbent are skipped.
    """
    k, d, tau = inst.k, inst.dim, inst.tau
    alat = _lattice(inst.alpha_max, step)
    H = -_lattice(1.0 / d, step)[::-1]
    M = alat.size
    if k == 1:
        return GridResult(Assignment((0.0,), ()), 1.0, M)
    autos = _automorphisms(inst.pattern)
    work = (M ** k / len(autos)) * H.size * (len(list(_splits((1 << k) - 1))) + 1)
    if work > max_points:
        raise BudgetExceeded(f"lattice search of about {work:.3g} cell updates exceeds budget {max_points:.3g}")
    dp = _SubsetDP(inst, H)
    best_val = -math.inf
    best_alpha = None
    for a in special_assignments(k, d):
        on_lattice = all(np.any(np.abs(alat - x) < 1e-12) for x in a.alpha) and \
            all(np.any(np.abs(H - x) < 1e-12) for x in a.beta)
        if on_lattice and is_feasible(inst, a, tol=1e-12):
            v = objective_f(inst, a)
            if v > best_val:
                best_val = v
    seed_val = best_val
    best_val = -math.inf
    weights = M ** np.arange(k - 1, -1, -1)
    points = 0
    lead = np.indices((M,) * (k - 1)).reshape(k - 1, -1).T if k > 1 else np.zeros((1, 0), dtype=int)
    for i0 in range(M):
        idx = np.hstack([np.full((lead.shape[0], 1), i0), lead])
        code = idx @ weights
        keep = np.ones(idx.shape[0], dtype=bool)
        for perm in autos:
            keep &= code <= idx[:, list(perm)] @ weights
        alpha = alat[idx[keep]]
        ub = k + (1.0 - tau) * alpha.sum(axis=1)
        floor = max(seed_val, best_val)
        alpha = alpha[ub > floor + 1e-12] if math.isfinite(floor) else alpha
        points += alpha.shape[0]
        for s in range(0, alpha.shape[0], chunk):
            blk = alpha[s:s + chunk]
            vals = k + (1.0 - tau) * blk.sum(axis=1) + dp.run(blk)
            t = int(np.argmax(vals))
            if vals[t] > best_val + 1e-12:
                best_val = float(vals[t])
                best_alpha = blk[t].copy()
    if best_alpha is None or best_val < seed_val - 1e-12:
        # nothing evaluated beats the special-point seed
        for a in special_assignments(k, d):
            if is_feasible(inst, a, tol=1e-12) and objective_f(inst, a) == seed_val:
                return GridResult(a, seed_val, points)
        raise SolverError("lattice oracle found no feasible point")
    beta = dp.reconstruct(best_alpha)
    a = Assignment(tuple(best_alpha), beta)
    check = objective_f(inst, a)
    if abs(check - best_val) > 1e-9:
        raise SolverError(f"lattice oracle inconsistency: {check} vs {best_val}")
    return GridResult(a, best_val, points)


def grid_bruteforce(inst: OptInstance, step: float, *, max_points: float = 2e6) -> GridResult:
    """Literal scan of every lattice ``(alpha, beta)``; for small cross-checks only."""
    k = inst.k
    alat = _lattice(inst.alpha_max, step)
    blat = -_lattice(1.0 / inst.dim, step)
    npairs = k * (k - 1) // 2
    total = alat.size ** k * blat.size ** npairs
    if total > max_points:
        raise BudgetExceeded(f"{total} lattice points exceed budget {max_points:.3g}")
    best = None
    best_val = -math.inf
    for al in itertools.product(alat, repeat=k):
        for be in itertools.product(blat, repeat=npairs):
            a = Assignment(al, be)
            if not is_feasible(inst, a, tol=1e-12):
                continue
            v = objective_f(inst, a)
            if v > best_val + 1e-12:
                best_val, best = v, a
    return GridResult(best, best_val, total)


# --------------------------------------------------------------------------- helpers


def alpha_class_values(tau: float) -> dict[str, float]:
    return {"0": 0.0, "(tau-2)/(tau-1)": (tau - 2.0) / (tau - 1.0), "1/2": 0.5, "1/(tau-1)": 1.0 / (tau - 1.0)}


def classify_alpha_value(alpha: float, tau: float, tol: float = 1e-6) -> str:
    """Nearest of the four weight classes, or ``"OTHER"`` if none is within ``tol``."""
    best, gap = "OTHER", math.inf
    for label, v in alpha_class_values(tau).items():
        g = abs(alpha - v)
        if g <= tol and g < gap:
            best, gap = label, g
    return best


def rescale_dimension(a: Assignment, d_from: int, d_to: int) -> Assignment:
    if d_from == d_to:
        return a
    f = d_from / d_to
    return Assignment(a.alpha, tuple(b * f for b in a.beta))


def orbit_size(p: Pattern) -> int:
    return math.factorial(p.k) // automorphism_count(p)


def to_fraction(x: float, max_den: int = 10_000) -> Fraction:
    return Fraction(x).limit_denominator(max_den)
