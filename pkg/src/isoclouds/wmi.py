"""Weighted Matrices Invariant: a complete invariant for every finite cloud.

For each ordered sequence of ``n - 1`` distinct points, Gram-Schmidt on the
centered points plus an orientation-fixing last vector gives a basis; the
cloud written in that basis is one matrix. Matrices equal up to column order
are collapsed, with weight = multiplicity / number of sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInput
from .geometry import CenteredCloud, PointCloud, as_cloud, center

QUANTUM = 1e-9
DEP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SequenceBasis:
    """Orthonormal basis (rows) built from a point sequence, or ``None`` if degenerate."""

    vectors: np.ndarray | None

    @property
    def degenerate(self) -> bool:
        return self.vectors is None


def _last_vector(partial: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the rows of ``partial`` with det(basis) > 0.

    Component i is the cofactor det[v_1, ..., v_{n-1}, e_i], so the completed
    determinant equals the squared norm of the result.
    """
    n = partial.shape[1]
    out = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        out[i] = np.linalg.det(np.vstack([partial, e]))
    return out / np.linalg.norm(out)


def basis_from_sequence(c, seq, tau_dep: float = DEP_TOL) -> SequenceBasis:
    c = center(c)
    seq = [int(i) for i in seq]
    if len(seq) != c.n - 1:
        raise InvalidInput(f"need a sequence of {c.n - 1} points, got {len(seq)}")
    if len(set(seq)) != len(seq):
        raise InvalidInput(f"sequence indices must be distinct: {seq}")
    if any(i < 0 or i >= c.m for i in seq):
        raise InvalidInput(f"sequence indices out of range 0..{c.m - 1}: {seq}")
    floor = tau_dep * c.radius
    vectors = []
    for i in seq:
        u = c.points[i].copy()
        # two passes of modified Gram-Schmidt keep orthogonality at machine precision
        for _ in range(2):
            for v in vectors:
                u -= (u @ v) * v
        norm = np.linalg.norm(u)
        if norm <= floor or norm == 0.0:
            return SequenceBasis(None)
        vectors.append(u / norm)
    partial = np.array(vectors).reshape(len(vectors), c.n)
    V = np.vstack([partial, _last_vector(partial)])
    V.setflags(write=False)
    return SequenceBasis(V)


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    matrix: np.ndarray  # quantized entries, columns sorted
    key: tuple
    order: np.ndarray  # column permutation applied to the input


def canonicalize_matrix(M, quantum: float = QUANTUM) -> CanonicalForm:
    """Quantize to multiples of ``quantum`` (half-even) and sort columns lexicographically."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise InvalidInput(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix entries must be finite")
    q = np.rint(M / quantum).astype(np.int64)
    order = np.lexsort(q[::-1]) if M.shape[1] else np.arange(0)
    q = np.ascontiguousarray(q[:, order])
    return CanonicalForm(q * quantum, (M.shape[0], M.shape[1], q.tobytes()), order)


@dataclass(frozen=True, eq=False)
class WeightedMatrix:
    """One equivalence class of WMI matrices.

    ``matrix`` is a representative with columns in canonical order (full
    precision, not quantized); ``count`` is how many sequences produced it.
    """

    matrix: np.ndarray
    weight: Fraction
    key: tuple
    count: int


@dataclass(frozen=True, eq=False)
class WMIDistribution:
    entries: tuple[WeightedMatrix, ...]
    m: int
    n: int
    sequences: int  # number of ordered point sequences, the weight denominator
    quantum: float = QUANTUM

    @property
    def weights(self) -> list[Fraction]:
        return [e.weight for e in self.entries]

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def stacked(self) -> np.ndarray:
        """Representatives as an array of shape (entries, n, m)."""
        return np.stack([e.matrix for e in self.entries])

    def sort_key(self) -> tuple:
        """Total order on distributions; representative bytes break ties between equal keys."""
        return (self.n, self.m, tuple((e.key, e.count, e.matrix.tobytes()) for e in self.entries))

    def __len__(self) -> int:
        return len(self.entries)


def sequence_count(m: int, n: int) -> int:
    """Ordered selections of ``n - 1`` distinct points out of ``m``."""
    return math.perm(m, n - 1)


def _collapse(matrices, m, n, quantum) -> WMIDistribution:
    groups: dict[tuple, list] = {}
    for M in matrices:
        form = canonicalize_matrix(M, quantum)
        if form.key in groups:
            groups[form.key][1] += 1
        else:
            rep = np.ascontiguousarray(M[:, form.order])
            rep.setflags(write=False)
            groups[form.key] = [rep, 1]
    total = len(matrices)
    entries = tuple(
        WeightedMatrix(rep, Fraction(count, total), key, count)
        for key, (rep, count) in sorted(groups.items())
    )
    return WMIDistribution(entries, m, n, total, quantum)


def sequence_matrices(c: CenteredCloud, tau_dep: float = DEP_TOL):
    """Yield ``(sequence, matrix)`` for every ordered sequence of n-1 distinct points."""
    P = c.sample_matrix
    for seq in itertools.permutations(range(c.m), c.n - 1):
        basis = basis_from_sequence(c, seq, tau_dep)
        if basis.degenerate:
            yield seq, np.zeros((c.n, c.m))
        else:
            yield seq, basis.vectors @ P


def wmi_2d(c, quantum: float = QUANTUM, tau_dep: float = DEP_TOL) -> WMIDistribution:
    """One matrix per point p: the cloud in the basis (p/|p|, its +90 degree turn)."""
    c = center(c)
    if c.n != 2:
        raise InvalidInput(f"wmi_2d needs points in R^2, got dimension {c.n}")
    P = c.sample_matrix
    floor = tau_dep * c.radius
    matrices = []
    for p in c.points:
        norm = np.hypot(p[0], p[1])
        if norm <= floor or norm == 0.0:
            matrices.append(np.zeros((2, c.m)))
            continue
        v1 = p / norm
        basis = np.array([v1, [-v1[1], v1[0]]])
        matrices.append(basis @ P)
    return _collapse(matrices, c.m, 2, quantum)


def wmi_general(c, quantum: float = QUANTUM, tau_dep: float = DEP_TOL) -> WMIDistribution:
    c = center(c)
    if c.n == 2:
        return wmi_2d(c, quantum, tau_dep)
    if c.m < c.n - 1:
        raise InvalidInput(f"need at least n-1 = {c.n - 1} points, got {c.m}")
    matrices = [M for _, M in sequence_matrices(c, tau_dep)]
    return _collapse(matrices, c.m, c.n, quantum)


def wmi(cloud, quantum: float = QUANTUM, tau_dep: float = DEP_TOL) -> WMIDistribution:
    return wmi_general(center(cloud), quantum, tau_dep)


def mirror_wmi(w: WMIDistribution) -> WMIDistribution:
    """WMI of the mirror image: negate the last row of every matrix, weights kept."""
    entries = []
    for e in w.entries:
        M = e.matrix.copy()
        M[-1] = -M[-1]
        form = canonicalize_matrix(M, w.quantum)
        rep = np.ascontiguousarray(M[:, form.order])
        rep.setflags(write=False)
        entries.append(WeightedMatrix(rep, e.weight, form.key, e.count))
    entries.sort(key=lambda e: e.key)
    return WMIDistribution(tuple(entries), w.m, w.n, w.sequences, w.quantum)


def reflect(cloud) -> PointCloud:
    """Mirror image of a cloud in the hyperplane x_n = 0."""
    pts = as_cloud(cloud).points.copy()
    pts[:, -1] = -pts[:, -1]
    return PointCloud(pts)
