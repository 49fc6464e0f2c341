"""Principal coordinates of principally generic clouds and the sign-symmetrized metric."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import InvalidInput, NotGeneric
from .geometry import (
    CenteredCloud,
    CovarianceSpectrum,
    bottleneck,
    center,
    covariance,
    eigen_sym,
)

GENERIC_REL_TOL = 1e-9


@dataclass(frozen=True)
class GenericityReport:
    is_generic: bool
    gap: float
    lambda_n: float
    threshold_used: float


def is_principally_generic(spec: CovarianceSpectrum, rel_tol: float = GENERIC_REL_TOL) -> GenericityReport:
    """Distinct, positive eigenvalues, judged relative to ``max(lambda_1, 1)``."""
    lam = spec.eigenvalues
    threshold = rel_tol * max(float(lam[0]), 1.0)
    gaps = lam[:-1] - lam[1:]
    min_gap = float(gaps.min()) if len(gaps) else float("inf")
    lambda_n = float(lam[-1])
    return GenericityReport(
        is_generic=bool(min_gap > threshold and lambda_n > threshold),
        gap=spec.gap,
        lambda_n=lambda_n,
        threshold_used=threshold,
    )


@dataclass(frozen=True, eq=False)
class PCM:
    """Principal Coordinates Matrix: entry (j, i) is ``p_i . v_j``.

    Columns are unordered and each row is defined up to sign; ``orientation``
    is the determinant sign (+1 or -1) of the eigenvector basis used.
    """

    matrix: np.ndarray
    spectrum: CovarianceSpectrum
    orientation: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    def oriented(self) -> np.ndarray:
        """The matrix re-expressed in a positively oriented eigenbasis."""
        M = self.matrix.copy()
        if self.orientation < 0:
            M[-1] = -M[-1]
        return M


def pcm(c, spec: CovarianceSpectrum | None = None, rel_tol: float = GENERIC_REL_TOL) -> PCM:
    c = center(c)
    if spec is None:
        spec = eigen_sym(covariance(c))
    report = is_principally_generic(spec, rel_tol)
    if not report.is_generic:
        raise NotGeneric(
            f"covariance eigenvalues {spec.eigenvalues.tolist()} are not distinct and positive "
            f"(gap {report.gap:.3g}, threshold {report.threshold_used:.3g}); use WMI-based metrics"
        )
    M = spec.basis @ c.sample_matrix
    M.setflags(write=False)
    orientation = 1 if np.linalg.det(spec.eigenvectors) > 0 else -1
    return PCM(M, spec, orientation)


def sign_strings(n: int, orientation: str = "full"):
    """All sign strings in {+1,-1}^n; ``rigid`` keeps those with an even number of flips."""
    for signs in itertools.product((1.0, -1.0), repeat=n):
        if orientation == "rigid" and np.prod(signs) < 0:
            continue
        yield np.array(signs)


def _matrix_of(P, orientation):
    if isinstance(P, PCM):
        return P.oriented() if orientation == "rigid" else P.matrix
    return np.asarray(P, dtype=np.float64)


def sm_matrices_witness(P, Q, orientation: str = "full") -> tuple[float, np.ndarray]:
    """SM value together with a minimizing sign string (first in enumeration order)."""
    if orientation not in ("full", "rigid"):
        raise InvalidInput(f"orientation must be 'full' or 'rigid', got {orientation!r}")
    A = _matrix_of(P, orientation)
    B = _matrix_of(Q, orientation)
    if A.ndim != 2 or A.shape != B.shape:
        raise InvalidInput(f"matrix shapes differ: {A.shape} vs {B.shape}")
    signs = list(sign_strings(A.shape[0], orientation))
    flipped = np.stack([s[:, None] * A for s in signs])
    values = kernels.bottleneck_many(flipped, B[None])[:, 0]
    best = int(np.argmin(values))
    return float(values[best]), signs[best]


def sm_matrices(P, Q, orientation: str = "full") -> float:
    """Bottleneck distance minimized over row-sign changes of ``P``.

    With ``orientation="rigid"`` only sign strings of determinant +1 are used
    and PCM inputs are first expressed in positively oriented bases, so the
    result vanishes only for orientation-preserving congruence.
    """
    return sm_matrices_witness(P, Q, orientation)[0]


def sm_clouds(A, B, orientation: str = "full", rel_tol: float = GENERIC_REL_TOL) -> float:
    """Symmetrized metric between two principally generic clouds of equal size."""
    cA, cB = center(A), center(B)
    if cA.points.shape != cB.points.shape:
        raise InvalidInput(f"clouds differ in size: {cA.points.shape} vs {cB.points.shape}")
    return sm_matrices(pcm(cA, rel_tol=rel_tol), pcm(cB, rel_tol=rel_tol), orientation)


def cov_perturbation_bound(A, B) -> tuple[float, float, float]:
    """Covariance difference norms and the bound ``n * m * W(A, B) * (r_A + r_B)``.

    Returns ``(||E||_2, ||E||_inf, bound)`` for ``E = cov(A) - cov(B)``, where
    ``||E||_inf`` is the maximum absolute row sum and ``W`` is the bottleneck
    distance between the centered clouds.
    """
    cA, cB = center(A), center(B)
    if cA.points.shape != cB.points.shape:
        raise InvalidInput(f"clouds differ in size: {cA.points.shape} vs {cB.points.shape}")
    E = covariance(cA) - covariance(cB)
    two_norm = float(np.linalg.norm(E, 2))
    max_norm = float(np.abs(E).sum(axis=1).max())
    w = cA.m * bottleneck(cA.sample_matrix, cB.sample_matrix) * (cA.radius + cB.radius)
    return two_norm, max_norm, cA.n * w
