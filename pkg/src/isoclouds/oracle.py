"""Brute-force references and random instance generators.

Nothing here calls the optimized solvers it is meant to check: bottleneck
and assignment are enumerated over permutations, transport over spanning-tree
vertices of the transport polytope, and congruence is decided by orthogonal
Procrustes alignment under every point permutation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GenerationFailure, InvalidInput, TooLarge
from .geometry import PointCloud, as_cloud, center, spectrum

MAX_BOTTLENECK_K = 8
MAX_ISOMETRY_M = 7


def _permutations(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.int64).reshape(-1, k)


def brute_bottleneck(P, Q) -> float:
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape:
        raise InvalidInput(f"shape mismatch: {P.shape} vs {Q.shape}")
    k = P.shape[1]
    if k > MAX_BOTTLENECK_K:
        raise TooLarge(f"brute-force bottleneck is capped at k={MAX_BOTTLENECK_K}, got {k}")
    if k == 0:
        return 0.0
    D = np.abs(P[:, :, None] - Q[:, None, :]).max(axis=0)
    perms = _permutations(k)
    return float(D[np.arange(k), perms].max(axis=1).min())


def brute_sm(P, Q) -> float:
    """Exhaustive minimum over row-sign strings and column bijections."""
    P = np.asarray(P, dtype=np.float64)
    best = math.inf
    for signs in itertools.product((1.0, -1.0), repeat=P.shape[0]):
        best = min(best, brute_bottleneck(np.array(signs)[:, None] * P, Q))
    return best


def brute_assignment(C) -> float:
    C = np.asarray(C, dtype=np.float64)
    k = C.shape[0]
    if k > MAX_BOTTLENECK_K:
        raise TooLarge(f"brute-force assignment is capped at k={MAX_BOTTLENECK_K}, got {k}")
    perms = _permutations(k)
    sums = C[np.arange(k), perms].sum(axis=1)
    best = perms[int(np.argmin(sums))]
    return math.fsum(C[np.arange(k), best])


def _tree_flow(edges, wc, wd):
    """Unique flow supported on the given edges if they form a spanning tree, else None."""
    k, l = len(wc), len(wd)
    parent = list(range(k + l))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    adj = {v: set() for v in range(k + l)}
    for i, j in edges:
        a, b = find(i), find(k + j)
        if a == b:
            return None
        parent[a] = b
        adj[i].add(k + j)
        adj[k + j].add(i)
    remaining = list(wc) + list(wd)
    flow = {}
    for _ in range(len(edges)):
        leaf = min(v for v in adj if len(adj[v]) == 1)
        (other,) = adj[leaf]
        edge = (leaf, other - k) if leaf < k else (other, leaf - k)
        flow[edge] = remaining[leaf]
        remaining[other] -= remaining[leaf]
        remaining[leaf] = 0
        adj[other].discard(leaf)
        adj[leaf].clear()
    return flow


def transport_vertices(weights_c, weights_d):
    """All vertices of the transport polytope, as dicts {(i, j): Fraction}."""
    wc = [Fraction(w) for w in weights_c]
    wd = [Fraction(w) for w in weights_d]
    k, l = len(wc), len(wd)
    if k > 4 or l > 4:
        raise TooLarge("transport vertex enumeration is capped at 4 x 4")
    cells = [(i, j) for i in range(k) for j in range(l)]
    vertices = []
    seen = set()
    for edges in itertools.combinations(cells, k + l - 1):
        flow = _tree_flow(edges, wc, wd)
        if flow is None or any(f < 0 for f in flow.values()):
            continue
        key = tuple(sorted((e, f) for e, f in flow.items() if f != 0))
        if key not in seen:
            seen.add(key)
            vertices.append(dict(key))
    return vertices


def brute_transport(weights_c, weights_d, C) -> float:
    """Minimum transport cost over every vertex of the transport polytope."""
    C = np.asarray(C, dtype=np.float64)
    best = math.inf
    for vertex in transport_vertices(weights_c, weights_d):
        cost = math.fsum(float(f) * C[i, j] for (i, j), f in vertex.items())
        best = min(best, cost)
    return best


@dataclass(frozen=True, eq=False)
class IsometryWitness:
    """``B[permutation[i]] = orthogonal @ A[i] + translation`` up to ``residual``."""

    orthogonal: np.ndarray
    translation: np.ndarray
    permutation: np.ndarray
    residual: float


def brute_isometry_check(A, B, tol: float = 1e-9, orientation: str = "full") -> IsometryWitness | None:
    """Search every point bijection for an orthogonal alignment of the centered clouds.

    ``orientation="rigid"`` restricts to det = +1. Returns the first witness
    whose largest point error is at most ``tol * r_A``.
    """
    cA, cB = center(A), center(B)
    if cA.points.shape != cB.points.shape:
        raise InvalidInput(f"clouds differ in size: {cA.points.shape} vs {cB.points.shape}")
    if cA.m > MAX_ISOMETRY_M:
        raise TooLarge(f"brute-force isometry check is capped at m={MAX_ISOMETRY_M}, got {cA.m}")
    if abs(cA.radius - cB.radius) > tol * max(cA.radius, cB.radius) + 1e-300:
        return None
    X = cA.points
    perms = _permutations(cA.m)
    Y = cB.points[perms]  # (p, m, n)
    H = np.einsum("pmi,mj->pij", Y, X)
    U, _, Vt = np.linalg.svd(H)
    if orientation == "rigid":
        d = np.sign(np.linalg.det(U @ Vt))
        d[d == 0] = 1.0
        U = U.copy()
        U[:, :, -1] *= d[:, None]
    Q = U @ Vt
    residuals = np.linalg.norm(np.einsum("pij,mj->pmi", Q, X) - Y, axis=2).max(axis=1)
    ok = np.flatnonzero(residuals <= tol * cA.radius)
    if len(ok) == 0:
        return None
    p = int(ok[0])
    translation = cB.center - Q[p] @ cA.center
    return IsometryWitness(Q[p], translation, perms[p], float(residuals[p]))


def pairwise_distance_multiset(A) -> np.ndarray:
    pts = as_cloud(A).points
    if len(pts) < 2:
        raise InvalidInput("need at least two points")
    i, j = np.triu_indices(len(pts), k=1)
    return np.sort(np.linalg.norm(pts[i] - pts[j], axis=1))


def random_orthogonal(n: int, rng: np.random.Generator, det: int | None = None) -> np.ndarray:
    """Haar-random orthogonal matrix; ``det`` forces +1 or -1."""
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    Q = Q * np.sign(np.diag(R))
    if det is not None and np.sign(np.linalg.det(Q)) != det:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_isometry(cloud, rng: np.random.Generator, det: int | None = None) -> PointCloud:
    """Apply a random orthogonal map, translation and point shuffle."""
    cloud = as_cloud(cloud)
    Q = random_orthogonal(cloud.n, rng, det)
    t = rng.normal(scale=3.0, size=cloud.n)
    moved = cloud.points @ Q.T + t
    return PointCloud(moved[rng.permutation(cloud.m)])


def regular_polygon(m: int, radius: float = 1.0) -> np.ndarray:
    angles = 2 * np.pi * np.arange(m) / m
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def _platonic(m: int) -> np.ndarray | None:
    phi = (1 + 5**0.5) / 2
    if m == 4:
        return np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float)
    if m == 6:
        return np.vstack([np.eye(3), -np.eye(3)])
    if m == 8:
        return np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
    if m == 12:
        pts = []
        for a, b in itertools.product((-1.0, 1.0), repeat=2):
            pts += [(0, a, b * phi), (a, b * phi, 0), (b * phi, 0, a)]
        return np.array(pts)
    if m == 20:
        pts = [list(p) for p in itertools.product((-1.0, 1.0), repeat=3)]
        for a, b in itertools.product((-1.0, 1.0), repeat=2):
            pts += [(0, a / phi, b * phi), (a / phi, b * phi, 0), (b * phi, 0, a / phi)]
        return np.array(pts)
    return None


def _symmetric(n: int, m: int) -> np.ndarray:
    if n == 1:
        return np.linspace(-1.0, 1.0, m)[:, None]
    if n == 2:
        return regular_polygon(m)
    if n == 3:
        pts = _platonic(m)
        if pts is not None:
            return pts / np.linalg.norm(pts[0])
        return np.column_stack([regular_polygon(m), np.zeros(m)])
    if m == n + 1:
        simplex = np.eye(n + 1) - 1.0 / (n + 1)
        basis = np.linalg.svd(simplex)[2][:n]
        return simplex @ basis.T
    if m == 2 * n:
        return np.vstack([np.eye(n), -np.eye(n)])
    if m == 2**n:
        return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    raise GenerationFailure(f"no symmetric template for n={n}, m={m}")


def random_cloud(n: int, m: int, seed: int, mode: str = "generic", rel_gap: float = 1e-2) -> PointCloud:
    """Deterministic random cloud for a seed.

    ``generic`` resamples Gaussian clouds until the covariance eigenvalues are
    separated by ``rel_gap * max(lambda_1, 1)``; ``symmetric`` returns a
    regular polygon or polytope; ``chiral`` returns a generic cloud that is
    not congruent to its mirror image by a rigid motion.
    """
    from .metrics import lac
    from .pci import is_principally_generic
    from .wmi import QUANTUM, mirror_wmi, wmi

    if n < 1 or m < 1:
        raise InvalidInput(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if mode == "symmetric":
        return PointCloud(_symmetric(n, m))
    if mode not in ("generic", "chiral"):
        raise InvalidInput(f"unknown mode {mode!r}")
    if m <= n:
        # centered points span at most m - 1 dimensions: never generic, never chiral
        raise GenerationFailure(f"mode {mode!r} needs m > n, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        pts = rng.normal(size=(m, n))
        if not is_principally_generic(spectrum(pts), rel_gap).is_generic:
            continue
        if mode == "chiral":
            W = wmi(pts)
            if lac(W, mirror_wmi(W)).value <= 10 * QUANTUM:
                continue
        return PointCloud(pts)
    raise GenerationFailure(f"no {mode} cloud found for n={n}, m={m} after 1000 tries")
