from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from girgmotif.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LPError, solve_lp


def test_single_variable():
    res = solve_lp(LinearProgram([1.0], [[1.0]], [1.0], lb=[0.0], ub=[10.0]))
    assert res.status == OPTIMAL and res.value == pytest.approx(1.0)


def test_degenerate_simplex_vertex():
    res = solve_lp(LinearProgram([1.0, 1.0], [[1.0, 1.0]], [1.0]))
    assert res.status == OPTIMAL and res.value == pytest.approx(1.0)
    assert sorted(np.round(res.x, 12).tolist()) == [0.0, 1.0]


def test_infeasible():
    res = solve_lp(LinearProgram([1.0], [[1.0]], [-1.0], lb=[0.0]))
    assert res.status == INFEASIBLE
    assert solve_lp(LinearProgram([1.0], lb=[1.0], ub=[0.0])).status == INFEASIBLE


def test_unbounded():
    assert solve_lp(LinearProgram([1.0, 0.0], [[0.0, 1.0]], [1.0])).status == UNBOUNDED


def test_equality_rows():
    lp = LinearProgram([1.0, 2.0, -1.0], A_eq=[[1.0, 1.0, 1.0]], b_eq=[2.0], lb=[0, 0, 0], ub=[1.5, 1.5, 1.5])
    res = solve_lp(lp)
    assert res.status == OPTIMAL and res.value == pytest.approx(3.5)


def test_negative_lower_bounds():
    lp = LinearProgram([-1.0, -1.0], [[-1.0, -1.0]], [1.0], lb=[-3.0, -3.0], ub=[0.0, 0.0])
    res = solve_lp(lp)
    assert res.value == pytest.approx(1.0)


def test_iteration_cap_raises():
    rng = np.random.default_rng(4)
    lp = LinearProgram(rng.normal(size=8), rng.normal(size=(8, 8)), rng.uniform(1, 2, 8), lb=np.zeros(8),
                       ub=np.ones(8))
    with pytest.raises(LPError) as exc:
        solve_lp(lp, max_iter=1)
    assert "iterations" in exc.value.diagnostics


def test_exact_mode_rationals():
    lp = LinearProgram([Fraction(1), Fraction(1)], [[Fraction(3), Fraction(1)], [Fraction(1), Fraction(3)]],
                       [Fraction(1), Fraction(1)])
    res = solve_lp(lp, exact=True)
    assert res.value == Fraction(1, 2)
    assert all(isinstance(v, Fraction) for v in res.x)
    # float inputs are read through their shortest decimal form
    res = solve_lp(LinearProgram([1.0], [[2.2]], [1.1]), exact=True)
    assert res.value == Fraction(1, 2)


@pytest.mark.parametrize("exact", [False, True])
def test_against_highs(exact):
    rng = np.random.default_rng(17 if exact else 16)
    trials = 40 if exact else 300
    for _ in range(trials):
        n, m1, m2 = int(rng.integers(1, 7)), int(rng.integers(0, 7)), int(rng.integers(0, 3))
        c = np.round(rng.normal(size=n), 3)
        A = np.round(rng.normal(size=(m1, n)), 3)
        b = np.round(rng.uniform(-1, 3, size=m1), 3)
        Aeq = np.round(rng.normal(size=(m2, n)), 3)
        beq = np.round(rng.uniform(-1, 1, size=m2), 3)
        lb = np.round(rng.uniform(-2, 0, size=n), 3)
        ub = np.where(rng.random(n) < 0.8, np.round(lb + rng.uniform(0.5, 3, size=n), 3), np.inf)
        lp = LinearProgram(c, A if m1 else None, b if m1 else None, Aeq if m2 else None, beq if m2 else None,
                           lb=lb, ub=ub)
        ours = solve_lp(lp, exact=exact)
        ref = linprog(-c, A_ub=A if m1 else None, b_ub=b if m1 else None, A_eq=Aeq if m2 else None,
                      b_eq=beq if m2 else None, bounds=list(zip(lb, ub)), method="highs")
        expect = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
        assert ours.status == expect
        if expect == OPTIMAL:
            assert float(ours.value) == pytest.approx(-ref.fun, abs=1e-7)
            x = np.asarray([float(v) for v in ours.x])
            assert np.all(x >= lb - 1e-9) and np.all(x <= ub + 1e-9)
            if m1:
                assert np.all(A @ x <= b + 1e-7)
            if m2:
                assert np.allclose(Aeq @ x, beq, atol=1e-7)
