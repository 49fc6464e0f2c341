# cython: language_level=3
"""Compiled hot kernels: bottleneck matching and integer transportation.

Same algorithms and arithmetic order as ``_pykernels`` so results agree bitwise.
"""

import math

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _minkowski(const double[:, :] P, const double[:, :] Q, double[:, :] D) noexcept nogil:
    cdef Py_ssize_t n = P.shape[0], k = P.shape[1], l = Q.shape[1]
    cdef Py_ssize_t i, j, r
    cdef double d, best
    for i in range(k):
        for j in range(l):
            best = 0.0
            for r in range(n):
                d = fabs(P[r, i] - Q[r, j])
                if d > best:
                    best = d
            D[i, j] = best


def minkowski_matrix(P, Q):
    cdef const double[:, :] Pv = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, :] Qv = np.ascontiguousarray(Q, dtype=np.float64)
    out = np.empty((Pv.shape[1], Qv.shape[1]))
    cdef double[:, :] Dv = out
    _minkowski(Pv, Qv, Dv)
    return out


cdef bint _augment(int u, const double[:, :] D, double t, int k,
                   int* match_col, char* seen) noexcept nogil:
    cdef int v
    for v in range(k):
        if D[u, v] <= t and not seen[v]:
            seen[v] = 1
            if match_col[v] < 0 or _augment(match_col[v], D, t, k, match_col, seen):
                match_col[v] = u
                return True
    return False


cdef bint _feasible(const double[:, :] D, double t, int k, int* match_col, char* seen) noexcept nogil:
    cdef int u, v
    for v in range(k):
        match_col[v] = -1
    for u in range(k):
        for v in range(k):
            seen[v] = 0
        if not _augment(u, D, t, k, match_col, seen):
            return False
    return True


cdef double _bottleneck_from(const double[:, :] D) except? -1.0:
    cdef int k = D.shape[0]
    cdef int i, j
    cdef double lower = 0.0, m
    if k == 0:
        return 0.0
    for i in range(k):
        m = INFINITY
        for j in range(k):
            if D[i, j] < m:
                m = D[i, j]
        if m > lower:
            lower = m
    for j in range(k):
        m = INFINITY
        for i in range(k):
            if D[i, j] < m:
                m = D[i, j]
        if m > lower:
            lower = m
    vals = np.unique(np.asarray(D))
    cdef double[:] vv = vals
    cdef int lo = <int>np.searchsorted(vals, lower, side="left")
    cdef int hi = vv.shape[0] - 1
    cdef int mid
    cdef int* match_col = <int*>malloc(k * sizeof(int))
    cdef char* seen = <char*>malloc(k * sizeof(char))
    try:
        while lo < hi:
            mid = (lo + hi) // 2
            if _feasible(D, vv[mid], k, match_col, seen):
                hi = mid
            else:
                lo = mid + 1
    finally:
        free(match_col)
        free(seen)
    return vv[lo]


def bottleneck_from_distances(D):
    cdef const double[:, :] Dv = np.ascontiguousarray(D, dtype=np.float64)
    return float(_bottleneck_from(Dv))


def bottleneck(P, Q):
    return float(_bottleneck_from(minkowski_matrix(P, Q)))


def bottleneck_many(Ps, Qs):
    cdef const double[:, :, :] Pv = np.ascontiguousarray(Ps, dtype=np.float64)
    cdef const double[:, :, :] Qv = np.ascontiguousarray(Qs, dtype=np.float64)
    cdef Py_ssize_t a, b
    out = np.empty((Pv.shape[0], Qv.shape[0]))
    cdef double[:, :] ov = out
    D = np.empty((Pv.shape[2], Qv.shape[2]))
    cdef double[:, :] Dv = D
    for a in range(Pv.shape[0]):
        for b in range(Qv.shape[0]):
            _minkowski(Pv[a], Qv[b], Dv)
            ov[a, b] = _bottleneck_from(Dv)
    return out


cdef int _transport(const long long[:] supply, const long long[:] demand,
                    const double[:, :] c, long long[:, :] flow) noexcept nogil:
    cdef int k = c.shape[0], l = c.shape[1], V = k + l
    cdef int i, j, u, v, it, target, source_row
    cdef long long remaining = 0, cap
    cdef double best, rc, nd, pu, dmax, true_dist
    cdef long long* sl = <long long*>malloc(k * sizeof(long long))
    cdef long long* dl = <long long*>malloc(l * sizeof(long long))
    cdef double* pot = <double*>malloc(V * sizeof(double))
    cdef double* dist = <double*>malloc(V * sizeof(double))
    cdef int* prev = <int*>malloc(V * sizeof(int))
    cdef char* done = <char*>malloc(V * sizeof(char))
    cdef int status = 0
    for i in range(k):
        sl[i] = supply[i]
        remaining += supply[i]
        for j in range(l):
            flow[i, j] = 0
    for j in range(l):
        dl[j] = demand[j]
    for v in range(V):
        pot[v] = 0.0

    while remaining > 0:
        for v in range(V):
            dist[v] = INFINITY
            prev[v] = -1
            done[v] = 0
        for i in range(k):
            if sl[i] > 0:
                dist[i] = 0.0
        for it in range(V):
            u = -1
            best = INFINITY
            for v in range(V):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = 1
            pu = pot[u]
            if u < k:
                for j in range(l):
                    v = k + j
                    if done[v]:
                        continue
                    rc = c[u, j] + pu - pot[v]
                    if rc < 0.0:
                        rc = 0.0
                    nd = best + rc
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = u
            else:
                j = u - k
                for i in range(k):
                    if flow[i, j] > 0 and not done[i]:
                        rc = -c[i, j] + pu - pot[i]
                        if rc < 0.0:
                            rc = 0.0
                        nd = best + rc
                        if nd < dist[i]:
                            dist[i] = nd
                            prev[i] = u
        target = -1
        best = INFINITY
        for j in range(l):
            v = k + j
            if dl[j] > 0 and dist[v] < INFINITY:
                true_dist = dist[v] + pot[v]
                if true_dist < best:
                    best = true_dist
                    target = v
        if target < 0:
            status = -1
            break
        cap = dl[target - k]
        v = target
        while prev[v] >= 0:
            u = prev[v]
            if u >= k and flow[v, u - k] < cap:
                cap = flow[v, u - k]
            v = u
        if sl[v] < cap:
            cap = sl[v]
        source_row = v
        v = target
        while prev[v] >= 0:
            u = prev[v]
            if u < k:
                flow[u, v - k] += cap
            else:
                flow[v, u - k] -= cap
            v = u
        sl[source_row] -= cap
        dl[target - k] -= cap
        remaining -= cap
        dmax = 0.0
        for v in range(V):
            if dist[v] < INFINITY and dist[v] > dmax:
                dmax = dist[v]
        for v in range(V):
            if dist[v] < INFINITY:
                pot[v] += dist[v]
            else:
                pot[v] += dmax

    free(sl)
    free(dl)
    free(pot)
    free(dist)
    free(prev)
    free(done)
    return status


def transport(supply, demand, cost):
    cdef const long long[:] s = np.ascontiguousarray(supply, dtype=np.int64)
    cdef const long long[:] d = np.ascontiguousarray(demand, dtype=np.int64)
    cdef const double[:, :] c = np.ascontiguousarray(cost, dtype=np.float64)
    if np.asarray(s).sum() != np.asarray(d).sum():
        raise ValueError("supply and demand totals differ")
    flow = np.zeros((c.shape[0], c.shape[1]), dtype=np.int64)
    cdef long long[:, :] f = flow
    cdef int status
    with nogil:
        status = _transport(s, d, c, f)
    if status != 0:
        raise RuntimeError("transport: no augmenting path")
    return flow


cdef double _transport_cost(const long long[:, :] flow, const double[:, :] cost) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    for i in range(flow.shape[0]):
        for j in range(flow.shape[1]):
            if flow[i, j] != 0:
                total += <double>flow[i, j] * cost[i, j]
    return total


def transport_cost(flow, cost):
    cdef const long long[:, :] f = np.ascontiguousarray(flow, dtype=np.int64)
    cdef const double[:, :] c = np.ascontiguousarray(cost, dtype=np.float64)
    return float(_transport_cost(f, c))


def emd_columns_many(Ps, Qs):
    cdef const double[:, :, :] Pv = np.ascontiguousarray(Ps, dtype=np.float64)
    cdef const double[:, :, :] Qv = np.ascontiguousarray(Qs, dtype=np.float64)
    cdef Py_ssize_t a, b
    cdef int mp = Pv.shape[2], mq = Qv.shape[2]
    cdef long long total = math.lcm(mp, mq)
    cdef long long[:] s = np.full(mp, total // mp, dtype=np.int64)
    cdef long long[:] d = np.full(mq, total // mq, dtype=np.int64)
    cdef double scale = <double>total
    out = np.empty((Pv.shape[0], Qv.shape[0]))
    cdef double[:, :] ov = out
    D = np.empty((mp, mq))
    cdef double[:, :] Dv = D
    flow = np.zeros((mp, mq), dtype=np.int64)
    cdef long long[:, :] f = flow
    cdef int status = 0
    with nogil:
        for a in range(Pv.shape[0]):
            for b in range(Qv.shape[0]):
                _minkowski(Pv[a], Qv[b], Dv)
                status = _transport(s, d, Dv, f)
                if status != 0:
                    break
                ov[a, b] = _transport_cost(f, Dv) / scale
            if status != 0:
                break
    if status != 0:
        raise RuntimeError("transport: no augmenting path")
    return out
