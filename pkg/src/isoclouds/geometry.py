"""Point clouds, covariance, symmetric eigendecomposition and bottleneck matching.

A point cloud is stored as an ``m x n`` array (one point per row). Matrices
read as clouds of their columns (``n x k`` arrays, "column clouds") are the
objects compared by :func:`bottleneck`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import InvalidInput, NumericalFailure

CENTER_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite multiset of ``m`` points in R^n; duplicates are allowed."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise InvalidInput(f"points must be an m x n array, got shape {pts.shape}")
        if pts.shape[0] < 1:
            raise InvalidInput("a point cloud needs at least one point")
        if pts.shape[1] < 1:
            raise InvalidInput("points need at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("point coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def transformed(self, orthogonal, translation=None) -> PointCloud:
        """Image of the cloud under ``p -> orthogonal @ p + translation``."""
        pts = self.points @ np.asarray(orthogonal, dtype=np.float64).T
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=np.float64)
        return PointCloud(pts)


def as_cloud(cloud) -> PointCloud:
    return cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)


@dataclass(frozen=True, eq=False)
class CenteredCloud:
    """A cloud translated so its center of mass is the origin.

    ``center`` is the original center of mass; ``radius`` is the largest
    Euclidean norm of a centered point.
    """

    points: np.ndarray
    center: np.ndarray
    radius: float

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def sample_matrix(self) -> np.ndarray:
        """The ``n x m`` matrix whose columns are the centered points."""
        return self.points.T


def center(cloud) -> CenteredCloud:
    if isinstance(cloud, CenteredCloud):
        return cloud
    cloud = as_cloud(cloud)
    pts = cloud.points
    mean = pts.mean(axis=0)
    shifted = pts - mean
    radius = float(np.sqrt((shifted**2).sum(axis=1)).max())
    # Rounding in the mean can leave a visible residual; recentre once.
    if np.abs(shifted.sum(axis=0)).max() > CENTER_TOL * radius:
        shifted = shifted - shifted.mean(axis=0)
    return CenteredCloud(_frozen(shifted), _frozen(mean), radius)


def covariance(cloud) -> np.ndarray:
    """Covariance ``P P^T / (n - 1)`` of the centered sample matrix.

    The divisor uses the dimension ``n``; for ``n = 1`` the divisor is 1.
    Only the scale of the eigenvalues depends on this choice.
    """
    c = center(cloud)
    P = c.sample_matrix
    divisor = c.n - 1 if c.n > 1 else 1
    M = P @ P.T / divisor
    return (M + M.T) / 2


@dataclass(frozen=True, eq=False)
class CovarianceSpectrum:
    """Eigenvalues sorted non-increasing, eigenvectors as the columns of ``eigenvectors``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def gap(self) -> float:
        """Smallest consecutive gap, counting the last eigenvalue against zero."""
        lam = np.append(self.eigenvalues, 0.0)
        return float(np.min(lam[:-1] - lam[1:]))

    @property
    def basis(self) -> np.ndarray:
        """Rows are the eigenvectors, so ``basis @ p`` gives principal coordinates."""
        return self.eigenvectors.T


def _sign_convention(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        idx = int(np.argmax(np.abs(V[:, j])))
        if V[idx, j] < 0:
            V[:, j] = -V[:, j]
    return V


def eigen_sym(M, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> CovarianceSpectrum:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Sweeps rotate every off-diagonal pair (p, q), p < q, in row order until the
    off-diagonal Frobenius mass is at most ``tol`` times the matrix norm.
    Eigenvectors are signed so their largest-magnitude coordinate is positive
    (first index on ties).
    """
    a = np.array(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix entries must be finite")
    a = (a + a.T) / 2
    n = a.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(a)
    threshold = tol * scale

    offdiag = ~np.eye(n, dtype=bool)

    def off(x):
        return np.sqrt(np.sum(x[offdiag] ** 2))

    sweeps = 0
    while off(a) > threshold:
        if sweeps >= max_sweeps:
            raise NumericalFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff  # theta^2 would overflow; t ~ 1 / (2 theta)
                else:
                    theta = diff / (2.0 * apq)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        sweeps += 1

    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    V = V[:, order]
    floor = -1e-12 * max(abs(lam[0]) if n else 0.0, 1.0)
    lam[(lam < 0) & (lam >= floor)] = 0.0
    return CovarianceSpectrum(_frozen(lam), _frozen(_sign_convention(V)))


def spectrum(cloud) -> CovarianceSpectrum:
    return eigen_sym(covariance(cloud))


def minkowski_dist(u, v) -> float:
    """L-infinity distance between two vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise InvalidInput(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.max(np.abs(u - v))) if u.size else 0.0


def _column_cloud(P, name: str) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2:
        raise InvalidInput(f"{name} must be an n x k matrix, got shape {P.shape}")
    return P


def bottleneck(P, Q) -> float:
    """Exact bottleneck distance between the column clouds of P and Q.

    The minimum over column bijections of the largest L-infinity displacement.
    The result is always one of the k^2 pairwise column distances.
    """
    P = _column_cloud(P, "P")
    Q = _column_cloud(Q, "Q")
    if P.shape != Q.shape:
        raise InvalidInput(f"column clouds differ in shape: {P.shape} vs {Q.shape}")
    return kernels.bottleneck(P, Q)


def columns_equal(P, Q) -> bool:
    """True when some column bijection matches P and Q exactly."""
    P = _column_cloud(P, "P")
    Q = _column_cloud(Q, "Q")
    return P.shape == Q.shape and bottleneck(P, Q) == 0.0
