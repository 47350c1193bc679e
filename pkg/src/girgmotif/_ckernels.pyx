# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: pairwise edge sampling, backtracking counts, simplex pivots.

Each function mirrors its counterpart in ``_pykernels`` exactly.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t, INT64_MAX
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t splitmix64(uint64_t x) nogil:
    cdef uint64_t z = x + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double pair_uniform(uint64_t key, int64_t u, int64_t v) nogil:
    cdef uint64_t lane = ((<uint64_t>u) << 32) | (<uint64_t>v)
    return <double>(splitmix64(lane ^ key) >> 11) * INV53


def sample_pair_edges(weights, positions, double n_scale, double mu, double gamma,
                      key, bint geometric):
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    cdef double[:, ::1] x
    cdef Py_ssize_t d = 0
    if geometric:
        x = np.ascontiguousarray(positions, dtype=np.float64)
        d = x.shape[1]
    cdef uint64_t ukey = <uint64_t>key
    cdef double n_mu = n_scale * mu
    cdef bint threshold = gamma == INFINITY
    cdef Py_ssize_t cap = 1024, m = 0
    cdef int64_t *buf = <int64_t *>malloc(2 * cap * sizeof(int64_t))
    cdef int64_t *grown
    cdef Py_ssize_t u, v, j
    cdef double prod, diff, dist, distd, ratio, p, uni
    cdef bint hit
    cdef int64_t[::1] src_v, dst_v
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for u in range(n - 1):
                for v in range(u + 1, n):
                    prod = w[u] * w[v]
                    if geometric:
                        dist = 0.0
                        for j in range(d):
                            diff = fabs(x[v, j] - x[u, j])
                            if 1.0 - diff < diff:
                                diff = 1.0 - diff
                            if diff > dist:
                                dist = diff
                        distd = dist
                        for j in range(d - 1):
                            distd = distd * dist
                        if threshold:
                            hit = prod > n_mu * distd
                        else:
                            ratio = prod / (n_mu * distd)
                            uni = pair_uniform(ukey, u, v)
                            # ratio**gamma <= ratio below the cap: most pairs are
                            # rejected before the pow call
                            if ratio >= 1.0:
                                hit = uni < 1.0
                            else:
                                hit = uni < ratio and uni < pow(ratio, gamma)
                    else:
                        p = prod / n_mu
                        if p > 1.0:
                            p = 1.0
                        hit = pair_uniform(ukey, u, v) < p
                    if hit:
                        if m == cap:
                            cap *= 2
                            grown = <int64_t *>realloc(buf, 2 * cap * sizeof(int64_t))
                            if grown == NULL:
                                with gil:
                                    raise MemoryError()
                            buf = grown
                        buf[2 * m] = u
                        buf[2 * m + 1] = v
                        m += 1
        src = np.empty(m, dtype=np.int64)
        dst = np.empty(m, dtype=np.int64)
        src_v = src
        dst_v = dst
        for j in range(m):
            src_v[j] = buf[2 * j]
            dst_v[j] = buf[2 * j + 1]
        return src, dst
    finally:
        free(buf)


cdef inline bint has_edge(const int64_t[::1] indptr, const int64_t[::1] indices,
                          int64_t a, int64_t b) nogil:
    cdef int64_t lo, hi, mid, t
    if indptr[a + 1] - indptr[a] > indptr[b + 1] - indptr[b]:
        t = a
        a = b
        b = t
    lo = indptr[a]
    hi = indptr[a + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < b:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[a + 1] and indices[lo] == b


def count_pattern(indptr_in, indices_in, rel_in, allowed_in, positions_in, dlo_in, dhi_in,
                  int64_t v_start, int64_t v_end):
    cdef const int64_t[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef const int64_t[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int64)
    cdef const signed char[:, ::1] rel = np.ascontiguousarray(rel_in, dtype=np.int8)
    cdef Py_ssize_t k = rel.shape[0]
    cdef bint use_mask = allowed_in.size > 0
    cdef bint use_dist = positions_in.size > 0
    cdef const unsigned char[:, ::1] allowed = np.ascontiguousarray(
        allowed_in if use_mask else np.zeros((1, 1)), dtype=np.uint8)
    cdef const double[:, ::1] pos = np.ascontiguousarray(
        positions_in if use_dist else np.zeros((1, 1)), dtype=np.float64)
    cdef const double[:, ::1] dlo = np.ascontiguousarray(
        dlo_in if use_dist else np.zeros((1, 1)), dtype=np.float64)
    cdef const double[:, ::1] dhi = np.ascontiguousarray(
        dhi_in if use_dist else np.zeros((1, 1)), dtype=np.float64)
    cdef Py_ssize_t d = pos.shape[1]

    cdef int64_t[::1] assign = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] anchor = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] cur = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] end = np.zeros(k, dtype=np.int64)
    cdef int64_t count = 0
    cdef int64_t v0, v, a, best_deg, deg
    cdef Py_ssize_t t, s, j
    cdef bint ok
    cdef double diff, dist

    if k == 1:
        with nogil:
            for v0 in range(v_start, v_end):
                if use_mask and not allowed[0, v0]:
                    continue
                count += 1
        return int(count)

    with nogil:
        for v0 in range(v_start, v_end):
            if use_mask and not allowed[0, v0]:
                continue
            assign[0] = v0
            t = 1
            # open level 1
            best_deg = -1
            for s in range(t):
                if rel[t, s] == 1:
                    deg = indptr[assign[s] + 1] - indptr[assign[s]]
                    if best_deg < 0 or deg < best_deg:
                        best_deg = deg
                        anchor[t] = s
            cur[t] = indptr[assign[anchor[t]]]
            end[t] = indptr[assign[anchor[t]] + 1]
            while t >= 1:
                if cur[t] >= end[t]:
                    t -= 1
                    continue
                v = indices[cur[t]]
                cur[t] += 1
                if use_mask and not allowed[t, v]:
                    continue
                ok = True
                for s in range(t):
                    if assign[s] == v:
                        ok = False
                        break
                if not ok:
                    continue
                for s in range(t):
                    if rel[t, s] == 1:
                        if s != anchor[t] and not has_edge(indptr, indices, assign[s], v):
                            ok = False
                            break
                if not ok:
                    continue
                for s in range(t):
                    if rel[t, s] == -1:
                        if has_edge(indptr, indices, assign[s], v):
                            ok = False
                            break
                if not ok:
                    continue
                if use_dist:
                    for s in range(t):
                        dist = 0.0
                        for j in range(d):
                            diff = fabs(pos[assign[s], j] - pos[v, j])
                            if 1.0 - diff < diff:
                                diff = 1.0 - diff
                            if diff > dist:
                                dist = diff
                        if not (dlo[t, s] <= dist and dist < dhi[t, s]):
                            ok = False
                            break
                    if not ok:
                        continue
                assign[t] = v
                if t == k - 1:
                    if count == INT64_MAX:
                        with gil:
                            raise OverflowError("pattern count exceeds 64-bit range")
                    count += 1
                    continue
                t += 1
                best_deg = -1
                for s in range(t):
                    if rel[t, s] == 1:
                        deg = indptr[assign[s] + 1] - indptr[assign[s]]
                        if best_deg < 0 or deg < best_deg:
                            best_deg = deg
                            anchor[t] = s
                cur[t] = indptr[assign[anchor[t]]]
                end[t] = indptr[assign[anchor[t]] + 1]
    return int(count)


def simplex_iterate(double[:, ::1] T, long[::1] basis, Py_ssize_t n_eligible,
                    Py_ssize_t max_iter, double tol, Py_ssize_t degenerate_switch):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncol = T.shape[1]
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t it, i, j, c, r
    cdef Py_ssize_t degenerate = 0
    cdef bint bland = False
    cdef double best, ratio, piv, f, minval
    cdef int status = 2
    cdef Py_ssize_t done = max_iter
    with nogil:
        for it in range(max_iter):
            c = -1
            if bland:
                for j in range(n_eligible):
                    if T[m, j] < -tol:
                        c = j
                        break
            else:
                minval = T[m, 0]
                c = 0
                for j in range(1, n_eligible):
                    if T[m, j] < minval:
                        minval = T[m, j]
                        c = j
                if not minval < -tol:
                    c = -1
            if c < 0:
                status = 0
                done = it
                break
            best = INFINITY
            for i in range(m):
                if T[i, c] > tol:
                    ratio = T[i, rhs] / T[i, c]
                    if ratio < best:
                        best = ratio
            if best == INFINITY:
                status = 1
                done = it
                break
            r = -1
            for i in range(m):
                if T[i, c] > tol:
                    ratio = T[i, rhs] / T[i, c]
                    if ratio <= best + tol and (r < 0 or basis[i] < basis[r]):
                        r = i
            if best <= tol:
                degenerate += 1
                if degenerate >= degenerate_switch:
                    bland = True
            else:
                degenerate = 0
            piv = T[r, c]
            for j in range(ncol):
                T[r, j] = T[r, j] / piv
            for i in range(m + 1):
                if i != r:
                    f = T[i, c]
                    if f != 0.0:
                        for j in range(ncol):
                            T[i, j] -= f * T[r, j]
                    T[i, c] = 0.0
            T[r, c] = 1.0
            basis[r] = c
    return status, done
