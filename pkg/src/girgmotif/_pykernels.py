"""Pure-Python / numpy kernels.

Semantically identical to the compiled ``_ckernels`` module; used when the
extension is not built, and as the reference in equivalence tests.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    z = x + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def pair_uniforms(key: int, u: int, vs: np.ndarray) -> np.ndarray:
    """Counter-based uniforms in [0, 1) for pairs ``(u, v)``, ``v`` in ``vs``."""
    lanes = (np.uint64(u) << np.uint64(32)) | vs.astype(np.uint64)
    h = _splitmix64_array(lanes ^ np.uint64(key))
    return (h >> np.uint64(11)).astype(np.float64) * _INV53


def sample_pair_edges(weights, positions, n_scale, mu, gamma, key, geometric):
    """Return ``(src, dst)`` arrays (0-based, ``src < dst``) of sampled edges."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    n = weights.shape[0]
    if geometric:
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        d = positions.shape[1]
    n_mu = n_scale * mu
    threshold = gamma == np.inf
    src_parts = []
    dst_parts = []
    for u in range(n - 1):
        vs = np.arange(u + 1, n, dtype=np.int64)
        prod = weights[u] * weights[u + 1:]
        if geometric:
            diff = np.abs(positions[u + 1:] - positions[u])
            diff = np.minimum(diff, 1.0 - diff)
            dist = diff.max(axis=1)
            distd = dist.copy()
            for _ in range(d - 1):
                distd = distd * dist
            denom = n_mu * distd
            if threshold:
                hit = prod > denom
            else:
                with np.errstate(divide="ignore"):
                    ratio = prod / denom
                uni = pair_uniforms(key, u, vs)
                capped = np.minimum(ratio, 1.0)
                hit = np.where(ratio >= 1.0, uni < 1.0, (uni < capped) & (uni < np.power(capped, gamma)))
        else:
            p = np.minimum(prod / n_mu, 1.0)
            hit = pair_uniforms(key, u, vs) < p
        if hit.any():
            sel = vs[hit]
            src_parts.append(np.full(sel.shape[0], u, dtype=np.int64))
            dst_parts.append(sel)
    if not src_parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    return np.concatenate(src_parts), np.concatenate(dst_parts)


def count_pattern(indptr, indices, rel, allowed, positions, dlo, dhi, v_start, v_end):
    """Backtracking count of ordered pattern embeddings.

    ``rel[t, s]`` (``s < t``, positions in the connected ordering) is ``1``
    when the images must be adjacent, ``-1`` when they must not be, ``0``
    otherwise. ``allowed`` is a ``(k, n)`` mask or empty; ``positions`` with
    ``dlo``/``dhi`` restrict pairwise torus distances to ``[lo, hi)`` when
    non-empty. Only first vertices in ``[v_start, v_end)`` are expanded.
    """
    k = rel.shape[0]
    n = indptr.shape[0] - 1
    nbr_lists = [indices[indptr[v]:indptr[v + 1]].tolist() for v in range(n)]
    nbr_sets = [set(lst) for lst in nbr_lists]
    use_mask = allowed.size > 0
    use_dist = positions.size > 0
    rel_l = rel.tolist()
    req = [[s for s in range(t) if rel_l[t][s] == 1] for t in range(k)]
    forbid = [[s for s in range(t) if rel_l[t][s] == -1] for t in range(k)]
    allowed_l = allowed.astype(bool).tolist() if use_mask else None
    if use_dist:
        pos = np.asarray(positions, dtype=np.float64)
        dlo_l = dlo.tolist()
        dhi_l = dhi.tolist()

    def dist(a, b):
        diff = np.abs(pos[a] - pos[b])
        return float(np.minimum(diff, 1.0 - diff).max())

    assign = [0] * k
    count = 0

    def extend(t):
        nonlocal count
        anchor = min(req[t], key=lambda s: len(nbr_lists[assign[s]]))
        for v in nbr_lists[assign[anchor]]:
            if use_mask and not allowed_l[t][v]:
                continue
            if v in assign[:t]:
                continue
            ok = True
            for s in req[t]:
                if s != anchor and v not in nbr_sets[assign[s]]:
                    ok = False
                    break
            if not ok:
                continue
            for s in forbid[t]:
                if v in nbr_sets[assign[s]]:
                    ok = False
                    break
            if not ok:
                continue
            if use_dist:
                for s in range(t):
                    dd = dist(assign[s], v)
                    if not (dlo_l[t][s] <= dd < dhi_l[t][s]):
                        ok = False
                        break
                if not ok:
                    continue
            assign[t] = v
            if t == k - 1:
                count += 1
            else:
                extend(t + 1)

    for v in range(v_start, v_end):
        if use_mask and not allowed_l[0][v]:
            continue
        assign[0] = v
        if k == 1:
            count += 1
        else:
            extend(1)
    return count


def simplex_iterate(T, basis, n_eligible, max_iter, tol, degenerate_switch):
    """Primal simplex on a maximization tableau, in place.

    ``T`` is ``(m + 1, N + 1)``: constraint rows ``[A | b]`` then the reduced
    cost row ``[r | -z]`` (entering columns have ``r < -tol``). Only the
    first ``n_eligible`` columns may enter. Dantzig pricing switches to
    Bland's rule after ``degenerate_switch`` consecutive degenerate pivots.

    Returns ``(status, iterations)`` with status 0 optimal, 1 unbounded,
    2 iteration limit.
    """
    m = T.shape[0] - 1
    rhs_col = T.shape[1] - 1
    degenerate = 0
    bland = False
    for it in range(max_iter):
        obj = T[m, :n_eligible]
        if bland:
            cand = [j for j in range(n_eligible) if obj[j] < -tol]
            if not cand:
                return 0, it
            c = cand[0]
        else:
            c = int(np.argmin(obj))
            if not obj[c] < -tol:
                return 0, it
        col = T[:m, c]
        mask = col > tol
        if not mask.any():
            return 1, it
        rows = np.nonzero(mask)[0]
        ratios = [T[i, rhs_col] / col[i] for i in rows]
        best = min(ratios)
        r = min((i for i, q in zip(rows, ratios) if q <= best + tol), key=lambda i: basis[i])
        if best <= tol:
            degenerate += 1
            if degenerate >= degenerate_switch:
                bland = True
        else:
            degenerate = 0
        piv = T[r, c]
        T[r, :] = T[r, :] / piv
        colv = T[:, c].copy()
        colv[r] = 0
        T -= np.outer(colv, T[r, :])
        T[:, c] = 0
        T[r, c] = 1
        basis[r] = c
    return 2, max_iter
