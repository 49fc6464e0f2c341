"""Exact metrics on invariants: Linear Assignment Cost and (nested) Earth Mover's Distance.

Weights are exact fractions. EMD scales them to a common integer
denominator, so the transport solver moves integer amounts and the returned
flow satisfies its marginal constraints exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .errors import InvalidInput
from .wmi import WMIDistribution, mirror_wmi, wmi

_MAX_DENOMINATOR = 2**53


@dataclass(frozen=True, eq=False)
class FlowMatrix:
    """Flow ``numerators / denominator`` between two weighted distributions."""

    numerators: np.ndarray
    denominator: int
    row_weights: tuple[Fraction, ...]
    col_weights: tuple[Fraction, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.numerators.shape

    def fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.denominator) for x in row] for row in self.numerators]

    def is_feasible(self) -> bool:
        """All marginal and total-flow constraints, checked in exact arithmetic."""
        F = self.fractions()
        if any(f < 0 or f > 1 for row in F for f in row):
            return False
        rows_ok = all(sum(row, Fraction(0)) <= w for row, w in zip(F, self.row_weights))
        cols = [sum(col, Fraction(0)) for col in zip(*F)] if F else []
        cols_ok = all(s <= w for s, w in zip(cols, self.col_weights))
        return rows_ok and cols_ok and sum(map(sum, F), Fraction(0)) == 1

    def transposed(self) -> FlowMatrix:
        return FlowMatrix(self.numerators.T.copy(), self.denominator, self.col_weights, self.row_weights)


@dataclass(frozen=True, eq=False)
class MetricReport:
    """A metric value with the witness that attains it.

    ``witness`` is a column permutation (assignment, LAC) or a FlowMatrix (EMD);
    ``cost`` is the cost matrix the witness is evaluated against.
    """

    value: float
    witness: object
    cost: np.ndarray
    mirrored: bool = False
    extra: dict = field(default_factory=dict)

    def reevaluate(self) -> float:
        if isinstance(self.witness, FlowMatrix):
            F = self.witness.numerators.astype(np.float64) / self.witness.denominator
            return float((F * self.cost).sum())
        perm = np.asarray(self.witness)
        return math.fsum(self.cost[np.arange(len(perm)), perm])


def assignment_min_cost(C) -> MetricReport:
    """Minimum-cost perfect assignment by shortest augmenting paths with potentials.

    O(k^3). Rows are inserted one at a time; each insertion runs a
    Dijkstra-like search over reduced costs and augments along the shortest
    alternating path. Witness ``perm[i]`` is the column assigned to row ``i``.
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidInput(f"assignment needs a square cost matrix, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidInput("costs must be finite")
    k = C.shape[0]
    if k == 0:
        return MetricReport(0.0, np.zeros(0, dtype=np.int64), C)
    # 1-based columns; column 0 is the virtual root of each search.
    u = np.zeros(k + 1)
    v = np.zeros(k + 1)
    owner = np.zeros(k + 1, dtype=np.int64)
    way = np.zeros(k + 1, dtype=np.int64)
    for i in range(1, k + 1):
        owner[0] = i
        j0 = 0
        minv = np.full(k + 1, np.inf)
        used = np.zeros(k + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            reduced = C[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            u[owner[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    perm = np.empty(k, dtype=np.int64)
    perm[owner[1:] - 1] = np.arange(k)
    value = math.fsum(C[np.arange(k), perm])
    return MetricReport(value, perm, C)


def _check_same_size(WA: WMIDistribution, WB: WMIDistribution):
    if WA.n != WB.n or WA.m != WB.m:
        raise InvalidInput(f"LAC needs equal (m, n): got {(WA.m, WA.n)} and {(WB.m, WB.n)}")


def _expand(W: WMIDistribution) -> np.ndarray:
    return np.repeat(np.arange(len(W)), [e.count for e in W.entries])


def _lac_ordered(WA: WMIDistribution, WB: WMIDistribution) -> MetricReport:
    small = kernels.bottleneck_many(WA.stacked(), WB.stacked())
    rows, cols = _expand(WA), _expand(WB)
    report = assignment_min_cost(small[rows][:, cols])
    return MetricReport(report.value, report.witness, report.cost,
                        extra={"row_entries": rows, "col_entries": cols})


def lac(WA: WMIDistribution, WB: WMIDistribution) -> MetricReport:
    """Linear Assignment Cost between two WMIs of clouds with equal (m, n).

    Each entry is expanded to ``count`` unit copies so the assignment is a
    bijection of all sequence matrices; the cost of a pair is their
    bottleneck distance. Arguments are processed in a canonical order so
    ``lac(A, B)`` and ``lac(B, A)`` agree bitwise.
    """
    _check_same_size(WA, WB)
    if WA.sort_key() <= WB.sort_key():
        return _lac_ordered(WA, WB)
    r = _lac_ordered(WB, WA)
    inverse = np.empty_like(r.witness)
    inverse[r.witness] = np.arange(len(r.witness))
    return MetricReport(r.value, inverse, r.cost.T.copy(),
                        extra={"row_entries": r.extra["col_entries"], "col_entries": r.extra["row_entries"]})


def _as_wmi(x, quantum, tau_dep) -> WMIDistribution:
    if isinstance(x, WMIDistribution):
        return x
    kwargs = {}
    if quantum is not None:
        kwargs["quantum"] = quantum
    if tau_dep is not None:
        kwargs["tau_dep"] = tau_dep
    return wmi(x, **kwargs)


def _pair_key(X: WMIDistribution, Y: WMIDistribution):
    a, b = X.sort_key(), Y.sort_key()
    return (a, b) if a <= b else (b, a)


def _mirror_pair(WA, WB):
    """Pick one of the equal-valued pairs (A', B), (A, B') by a symmetric rule."""
    first = (mirror_wmi(WA), WB)
    second = (WA, mirror_wmi(WB))
    return first if _pair_key(*first) <= _pair_key(*second) else second


def _isometry_min(fn, WA, WB) -> MetricReport:
    direct = fn(WA, WB)
    mirrored = fn(*_mirror_pair(WA, WB))
    if mirrored.value < direct.value:
        return MetricReport(mirrored.value, mirrored.witness, mirrored.cost, True, mirrored.extra)
    return direct


def lac_isometry_report(A, B, quantum=None, tau_dep=None) -> MetricReport:
    """min(LAC(A, B), LAC(A', B)) with A' a mirror image; zero iff A and B are isometric."""
    WA, WB = _as_wmi(A, quantum, tau_dep), _as_wmi(B, quantum, tau_dep)
    _check_same_size(WA, WB)
    return _isometry_min(lac, WA, WB)


def lac_isometry(A, B, quantum=None, tau_dep=None) -> float:
    return lac_isometry_report(A, B, quantum, tau_dep).value


def _to_fraction(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, (int, np.integer)):
        return Fraction(int(w))
    if isinstance(w, str):
        return Fraction(w)
    return Fraction(float(w)).limit_denominator(10**6)


def _weights(ws, side: str) -> tuple[Fraction, ...]:
    ws = tuple(_to_fraction(w) for w in ws)
    if not ws:
        raise InvalidInput(f"{side} distribution is empty")
    if any(w <= 0 for w in ws):
        raise InvalidInput(f"{side} weights must be positive")
    if sum(ws, Fraction(0)) != 1:
        raise InvalidInput(f"{side} weights sum to {sum(ws, Fraction(0))}, not 1")
    return ws


def emd(weights_c, weights_d, C) -> MetricReport:
    """Earth Mover's Distance between weighted distributions with ground costs ``C``."""
    wc = _weights(weights_c, "first")
    wd = _weights(weights_d, "second")
    C = np.asarray(C, dtype=np.float64)
    if C.shape != (len(wc), len(wd)):
        raise InvalidInput(f"cost matrix shape {C.shape} does not match weights ({len(wc)}, {len(wd)})")
    if not np.all(np.isfinite(C)) or np.any(C < 0):
        raise InvalidInput("costs must be finite and nonnegative")
    denominator = math.lcm(*(w.denominator for w in wc + wd))
    if denominator >= _MAX_DENOMINATOR:
        raise InvalidInput(f"common weight denominator {denominator} is too large for exact flow")
    supply = np.array([w.numerator * (denominator // w.denominator) for w in wc], dtype=np.int64)
    demand = np.array([w.numerator * (denominator // w.denominator) for w in wd], dtype=np.int64)
    flow = kernels.transport(supply, demand, C)
    value = kernels.transport_cost(flow, C) / denominator
    return MetricReport(value, FlowMatrix(flow, denominator, wc, wd), C)


def _columns(P, name):
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] == 0:
        raise InvalidInput(f"{name} must be a non-empty n x m matrix, got shape {P.shape}")
    return P


def emd_columns_report(P, Q) -> MetricReport:
    """EMD between the columns of P and Q, each column weighted 1/(column count), L-inf ground distance."""
    P, Q = _columns(P, "P"), _columns(Q, "Q")
    if P.shape[0] != Q.shape[0]:
        raise InvalidInput(f"row counts differ: {P.shape[0]} vs {Q.shape[0]}")
    swap = (P.shape, P.tobytes()) > (Q.shape, Q.tobytes())
    X, Y = (Q, P) if swap else (P, Q)
    C = kernels.minkowski_matrix(X, Y)
    wx = [Fraction(1, X.shape[1])] * X.shape[1]
    wy = [Fraction(1, Y.shape[1])] * Y.shape[1]
    r = emd(wx, wy, C)
    if swap:
        return MetricReport(r.value, r.witness.transposed(), r.cost.T.copy())
    return r


def emd_columns(P, Q) -> float:
    return emd_columns_report(P, Q).value


def _emd_wmi_ordered(WA: WMIDistribution, WB: WMIDistribution) -> MetricReport:
    C = kernels.emd_columns_many(WA.stacked(), WB.stacked())
    return emd(WA.weights, WB.weights, C)


def emd_wmi(WA: WMIDistribution, WB: WMIDistribution) -> MetricReport:
    """Nested EMD: outer EMD over weighted matrices, inner column EMD as ground distance.

    The clouds may have different numbers of points.
    """
    if WA.n != WB.n:
        raise InvalidInput(f"dimension mismatch: {WA.n} vs {WB.n}")
    if WA.sort_key() <= WB.sort_key():
        return _emd_wmi_ordered(WA, WB)
    r = _emd_wmi_ordered(WB, WA)
    return MetricReport(r.value, r.witness.transposed(), r.cost.T.copy())


def emd_isometry_report(A, B, quantum=None, tau_dep=None) -> MetricReport:
    """Nested EMD minimized over the mirror image, for classification up to reflections."""
    WA, WB = _as_wmi(A, quantum, tau_dep), _as_wmi(B, quantum, tau_dep)
    if WA.n != WB.n:
        raise InvalidInput(f"dimension mismatch: {WA.n} vs {WB.n}")
    return _isometry_min(emd_wmi, WA, WB)
