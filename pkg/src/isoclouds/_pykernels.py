"""Pure-Python implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable or when
``ISOCLOUDS_PURE_PYTHON=1`` is set. Both modules expose the same functions
and must return bitwise identical results.
"""

import math

import numpy as np


def minkowski_matrix(P, Q):
    """k x l matrix of L-infinity distances between columns of P and Q."""
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    return np.abs(P[:, :, None] - Q[:, None, :]).max(axis=0)


def _has_perfect_matching(adj, k):
    match_col = [-1] * k

    def augment(u, seen):
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_col[v] < 0 or augment(match_col[v], seen):
                    match_col[v] = u
                    return True
        return False

    for u in range(k):
        if not augment(u, [False] * k):
            return False
    return True


def bottleneck_from_distances(D):
    """Exact bottleneck value of a square distance matrix.

    Binary search over the sorted distinct entries; a threshold is feasible
    when the bipartite graph of entries <= threshold has a perfect matching.
    """
    D = np.asarray(D, dtype=np.float64)
    k = D.shape[0]
    if k == 0:
        return 0.0
    vals = np.unique(D)
    lower = max(D.min(axis=1).max(), D.min(axis=0).max())
    lo = int(np.searchsorted(vals, lower, side="left"))
    hi = len(vals) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        t = vals[mid]
        adj = [np.flatnonzero(D[i] <= t).tolist() for i in range(k)]
        if _has_perfect_matching(adj, k):
            hi = mid
        else:
            lo = mid + 1
    return float(vals[lo])


def bottleneck(P, Q):
    return bottleneck_from_distances(minkowski_matrix(P, Q))


def bottleneck_many(Ps, Qs):
    """Bottleneck distances between every stacked matrix Ps[a] and Qs[b]."""
    Ps = np.asarray(Ps, dtype=np.float64)
    Qs = np.asarray(Qs, dtype=np.float64)
    out = np.empty((Ps.shape[0], Qs.shape[0]))
    for a in range(Ps.shape[0]):
        for b in range(Qs.shape[0]):
            out[a, b] = bottleneck(Ps[a], Qs[b])
    return out


def transport(supply, demand, cost):
    """Integer min-cost transportation by successive shortest paths.

    ``supply`` and ``demand`` are nonnegative integer vectors with equal sums;
    returns the integer flow matrix. Dijkstra runs on reduced costs with node
    potentials; unreached nodes get the largest finite distance so reduced
    costs stay nonnegative.
    """
    cost = np.asarray(cost, dtype=np.float64)
    k, l = cost.shape
    supply_left = [int(s) for s in supply]
    demand_left = [int(d) for d in demand]
    if sum(supply_left) != sum(demand_left):
        raise ValueError("supply and demand totals differ")
    flow = [[0] * l for _ in range(k)]
    c = cost.tolist()
    pot = [0.0] * (k + l)  # rows 0..k-1, cols k..k+l-1
    inf = float("inf")
    remaining = sum(supply_left)

    while remaining > 0:
        dist = [inf] * (k + l)
        prev = [-1] * (k + l)
        done = [False] * (k + l)
        for i in range(k):
            if supply_left[i] > 0:
                dist[i] = 0.0
        for _ in range(k + l):
            u = -1
            best = inf
            for v in range(k + l):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            if u < k:
                pu = pot[u]
                row = c[u]
                for j in range(l):
                    v = k + j
                    if done[v]:
                        continue
                    rc = row[j] + pu - pot[v]
                    if rc < 0.0:
                        rc = 0.0
                    nd = best + rc
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = u
            else:
                j = u - k
                pu = pot[u]
                for i in range(k):
                    if flow[i][j] > 0 and not done[i]:
                        rc = -c[i][j] + pu - pot[i]
                        if rc < 0.0:
                            rc = 0.0
                        nd = best + rc
                        if nd < dist[i]:
                            dist[i] = nd
                            prev[i] = u
        target = -1
        best = inf
        for j in range(l):
            v = k + j
            if demand_left[j] > 0 and dist[v] < inf:
                true_dist = dist[v] + pot[v]
                if true_dist < best:
                    best = true_dist
                    target = v
        if target < 0:
            raise RuntimeError("transport: no augmenting path")
        cap = demand_left[target - k]
        v = target
        while prev[v] >= 0:
            u = prev[v]
            if u >= k:  # reverse arc col u -> row v
                cap = min(cap, flow[v][u - k])
            v = u
        cap = min(cap, supply_left[v])
        source_row = v
        v = target
        while prev[v] >= 0:
            u = prev[v]
            if u < k:
                flow[u][v - k] += cap
            else:
                flow[v][u - k] -= cap
            v = u
        supply_left[source_row] -= cap
        demand_left[target - k] -= cap
        remaining -= cap
        dmax = max(d for d in dist if d < inf)
        for v in range(k + l):
            pot[v] += dist[v] if dist[v] < inf else dmax
    return np.array(flow, dtype=np.int64).reshape(k, l)


def transport_cost(flow, cost):
    """Sum of flow * cost, accumulated row-major; flow stays unscaled."""
    total = 0.0
    k, l = flow.shape
    for i in range(k):
        for j in range(l):
            if flow[i, j]:
                total += float(flow[i, j]) * float(cost[i, j])
    return total


def emd_columns_many(Ps, Qs):
    """Column-distribution EMD between every Ps[a] and Qs[b] (equal column weights)."""
    Ps = np.asarray(Ps, dtype=np.float64)
    Qs = np.asarray(Qs, dtype=np.float64)
    mp, mq = Ps.shape[2], Qs.shape[2]
    total = math.lcm(mp, mq)
    supply = np.full(mp, total // mp, dtype=np.int64)
    demand = np.full(mq, total // mq, dtype=np.int64)
    scale = float(total)
    out = np.empty((Ps.shape[0], Qs.shape[0]))
    for a in range(Ps.shape[0]):
        for b in range(Qs.shape[0]):
            D = minkowski_matrix(Ps[a], Qs[b])
            flow = transport(supply, demand, D)
            out[a, b] = transport_cost(flow, D) / scale
    return out
