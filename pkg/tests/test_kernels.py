"""The compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest

from girgmotif import BACKEND
from girgmotif._backend import compiled_kernels, get_kernels
from girgmotif.counting import VertexClassSpec, count_in_class, count_ordered
from girgmotif.girg import GirgParams, sample_girg, sample_irg
from girgmotif.lp import LinearProgram, solve_lp
from girgmotif.pattern import enumerate_patterns, named_pattern

needs_ext = pytest.mark.skipif(compiled_kernels is None, reason="compiled kernels not built")


def test_backend_selection():
    assert BACKEND in ("compiled", "python")
    assert get_kernels("python").__name__.endswith("_pykernels")
    with pytest.raises(ValueError):
        get_kernels("fortran")


@needs_ext
@pytest.mark.parametrize("gamma, d", [(2.0, 1), (3.5, 2), ("inf", 1), ("inf", 3)])
def test_sampler_identical(gamma, d):
    params = GirgParams(n=1500, d=d, tau=2.4, gamma=gamma, seed=21)
    a = sample_girg(params, backend="compiled")
    b = sample_girg(params, backend="python")
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)


@needs_ext
def test_irg_sampler_identical():
    params = GirgParams(n=1500, tau=2.3, seed=5)
    a = sample_irg(params, backend="compiled")
    b = sample_irg(params, backend="python")
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)


@needs_ext
@pytest.mark.parametrize("mode", ["general", "induced"])
def test_counts_identical(mode):
    g = sample_girg(GirgParams(n=400, tau=2.5, seed=3))
    for k in (2, 3, 4):
        for h in enumerate_patterns(k):
            assert count_ordered(g, h, mode, backend="compiled") == count_ordered(g, h, mode, backend="python")


@needs_ext
def test_class_counts_identical():
    g = sample_girg(GirgParams(n=400, tau=2.5, seed=4))
    spec = VertexClassSpec((0.0, 0.2, 0.1), (-0.8, -0.5, -0.9), 0.2)
    h = named_pattern("P3")
    assert count_in_class(g, h, "general", spec, backend="compiled") == \
        count_in_class(g, h, "general", spec, backend="python")


@needs_ext
def test_simplex_identical():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n, m = int(rng.integers(2, 7)), int(rng.integers(1, 7))
        lp = LinearProgram(rng.normal(size=n), rng.normal(size=(m, n)), rng.uniform(-1, 3, size=m),
                           lb=np.full(n, -2.0), ub=np.full(n, 3.0))
        a = solve_lp(lp, backend="compiled")
        b = solve_lp(lp, backend="python")
        assert a.status == b.status
        assert a.iterations == b.iterations
        if a.x is not None:
            assert np.allclose(a.x, b.x, atol=1e-12)
