"""Dense two-phase primal simplex for small bounded linear programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._backend import get_kernels

__all__ = ["LinearProgram", "LPResult", "LPError", "solve_lp", "OPTIMAL", "INFEASIBLE", "UNBOUNDED"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LP_TOL = 1e-9
FEAS_TOL = 1e-7
DEGENERATE_SWITCH = 50


class LPError(RuntimeError):
    """The simplex stalled; ``diagnostics`` records where."""

    def __init__(self, message: str, diagnostics: dict):
        self.diagnostics = diagnostics
        super().__init__(f"{message}: {diagnostics}")


@dataclass
class LinearProgram:
    """``max c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``lb <= x <= ub``.

    Lower bounds must be finite; upper bounds may be ``inf``.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self) -> None:
        obj = self.c.dtype == object if isinstance(self.c, np.ndarray) else False
        dt = object if obj else np.float64
        self.c = np.asarray(self.c, dtype=dt).ravel()
        n = self.c.size
        self.A_ub = np.zeros((0, n), dtype=dt) if self.A_ub is None else np.asarray(self.A_ub, dtype=dt).reshape(-1, n)
        self.b_ub = np.zeros(0, dtype=dt) if self.b_ub is None else np.asarray(self.b_ub, dtype=dt).ravel()
        self.A_eq = np.zeros((0, n), dtype=dt) if self.A_eq is None else np.asarray(self.A_eq, dtype=dt).reshape(-1, n)
        self.b_eq = np.zeros(0, dtype=dt) if self.b_eq is None else np.asarray(self.b_eq, dtype=dt).ravel()
        self.lb = np.zeros(n, dtype=dt) if self.lb is None else np.asarray(self.lb, dtype=dt).ravel()
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=dt).ravel()
        if self.A_ub.shape[0] != self.b_ub.size or self.A_eq.shape[0] != self.b_eq.size:
            raise ValueError("constraint matrix and right-hand side differ in length")
        if self.lb.size != n or self.ub.size != n:
            raise ValueError("bounds must have one entry per variable")
        if not all(np.isfinite(float(v)) for v in self.lb):
            raise ValueError("lower bounds must be finite")

    @property
    def n(self) -> int:
        return self.c.size


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    iterations: int = 0
    info: dict = field(default_factory=dict)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    # the shortest decimal repr recovers intended rationals such as 2.2 = 11/5
    return Fraction(repr(float(v)))


def solve_lp(lp: LinearProgram, *, exact: bool = False, max_iter: int = 20000,
             backend: str | None = None) -> LPResult:
    """Solve ``lp``; returns a basic optimal solution or an infeasible/unbounded status.

    ``exact=True`` runs the same pivoting on rational numbers with zero tolerance.
    """
    if exact:
        conv = np.vectorize(_to_fraction, otypes=[object])
        dt = object
        tol = Fraction(0)
        kern = get_kernels("python")
        zero, one = Fraction(0), Fraction(1)
    else:
        conv = lambda a: np.asarray(a, dtype=np.float64)  # noqa: E731
        dt = np.float64
        tol = LP_TOL
        kern = get_kernels(backend)
        zero, one = 0.0, 1.0

    n = lp.n
    c = conv(lp.c) if n else np.zeros(0, dtype=dt)
    lb = conv(lp.lb) if n else np.zeros(0, dtype=dt)
    ub_f = np.asarray([float(u) for u in lp.ub], dtype=np.float64)
    finite_ub = np.nonzero(np.isfinite(ub_f))[0]
    if np.any(ub_f < np.asarray([float(v) for v in lp.lb]) - FEAS_TOL):
        return LPResult(INFEASIBLE, info={"reason": "empty bounds"})

    A_ub = conv(lp.A_ub) if lp.A_ub.size else np.zeros((0, n), dtype=dt)
    b_ub = conv(lp.b_ub) if lp.b_ub.size else np.zeros(0, dtype=dt)
    A_eq = conv(lp.A_eq) if lp.A_eq.size else np.zeros((0, n), dtype=dt)
    b_eq = conv(lp.b_eq) if lp.b_eq.size else np.zeros(0, dtype=dt)

    # shift x = lb + y, upper bounds become rows y_j <= ub_j - lb_j
    rows_ub = [A_ub]
    rhs_ub = [b_ub - A_ub.dot(lb) if A_ub.size else b_ub]
    if finite_ub.size:
        B = np.zeros((finite_ub.size, n), dtype=dt)
        if exact:
            B[:] = zero
        B[np.arange(finite_ub.size), finite_ub] = one
        rows_ub.append(B)
        ub_c = conv(lp.ub[finite_ub])
        rhs_ub.append(ub_c - lb[finite_ub])
    A1 = np.vstack(rows_ub) if rows_ub else np.zeros((0, n), dtype=dt)
    b1 = np.concatenate(rhs_ub)
    A2 = A_eq
    b2 = b_eq - A_eq.dot(lb) if A_eq.size else b_eq
    m1, m2 = A1.shape[0], A2.shape[0]
    m = m1 + m2

    # columns: structural y | slacks of <= rows | artificials
    neg1 = b1 < 0
    need_art = np.concatenate([neg1, np.ones(m2, dtype=bool)])
    art_rows = np.nonzero(need_art)[0]
    n_art = art_rows.size
    ncol = n + m1 + n_art + 1
    T = np.zeros((m + 1, ncol), dtype=dt)
    if exact:
        T[:] = zero
    T[:m1, :n] = A1
    T[:m1, n:n + m1] = np.eye(m1, dtype=dt) if not exact else _eye_obj(m1)
    T[:m1, -1] = b1
    T[m1:m, :n] = A2
    T[m1:m, -1] = b2
    for i in range(m):
        if T[i, -1] < 0:
            T[i, :-1] = -T[i, :-1]
            T[i, -1] = -T[i, -1]
    basis = np.zeros(m, dtype=np.int64)
    for i in range(m1):
        basis[i] = n + i
    for a, i in enumerate(art_rows):
        T[i, n + m1 + a] = one
        basis[i] = n + m1 + a

    total_iters = 0
    n_struct = n + m1
    if n_art:
        # phase 1: maximize -sum(artificials)
        T[m, :] = zero
        for i in art_rows:
            T[m, :n_struct] -= T[i, :n_struct]
            T[m, -1] -= T[i, -1]
        status, it = _iterate(kern, T, basis, ncol - 1, max_iter, tol, exact)
        total_iters += it
        if status == 2:
            raise LPError("iteration limit in phase 1", {"iterations": total_iters, "rows": m, "cols": ncol - 1})
        infeas = -T[m, -1]
        if float(infeas) > FEAS_TOL:
            return LPResult(INFEASIBLE, iterations=total_iters, info={"phase1": float(infeas)})
        # drive zero-level artificials out where a structural pivot exists
        for i in range(m):
            if basis[i] >= n_struct:
                row = T[i, :n_struct]
                cand = np.nonzero(np.abs(row.astype(np.float64)) > (1e-9 if not exact else 0))[0]
                if cand.size:
                    _pivot(T, basis, i, int(cand[0]))

    # phase 2
    T[m, :] = zero
    T[m, :n] = -c
    for i in range(m):
        j = basis[i]
        if j < n and c[j] != 0:
            T[m, :] += c[j] * T[i, :]
    status, it = _iterate(kern, T, basis, n_struct, max_iter - total_iters, tol, exact)
    total_iters += it
    if status == 2:
        raise LPError("iteration limit in phase 2", {"iterations": total_iters, "rows": m, "cols": ncol - 1})
    if status == 1:
        return LPResult(UNBOUNDED, iterations=total_iters)
    y = np.zeros(n, dtype=dt)
    if exact:
        y[:] = zero
    for i in range(m):
        j = basis[i]
        if j < n:
            y[j] = T[i, -1]
    x = lb + y
    value = c.dot(x) if n else zero
    if not exact:
        x = x.astype(np.float64)
        value = float(value)
    return LPResult(OPTIMAL, x=x, value=value, iterations=total_iters)


def _eye_obj(m: int) -> np.ndarray:
    out = np.empty((m, m), dtype=object)
    out[:] = Fraction(0)
    for i in range(m):
        out[i, i] = Fraction(1)
    return out


def _iterate(kern, T, basis, n_eligible, max_iter, tol, exact):
    if exact:
        return kern.simplex_iterate(T, basis, n_eligible, max_iter, tol, DEGENERATE_SWITCH)
    return kern.simplex_iterate(T, basis, n_eligible, max(max_iter, 0), float(tol), DEGENERATE_SWITCH)


def _pivot(T, basis, r, c):
    T[r, :] = T[r, :] / T[r, c]
    col = T[:, c].copy()
    col[r] = 0
    T -= np.outer(col, T[r, :])
    T[:, c] = 0
    T[r, c] = 1
    basis[r] = c
