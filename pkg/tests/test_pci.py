import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K_POINTS, T_POINTS, rectangle
from isoclouds import InvalidInput, NotGeneric
from isoclouds.geometry import CovarianceSpectrum, center, covariance, spectrum
from isoclouds.oracle import brute_isometry_check, brute_sm, random_cloud, random_isometry, random_orthogonal
from isoclouds.pci import (
    cov_perturbation_bound,
    is_principally_generic,
    pcm,
    sign_strings,
    sm_clouds,
    sm_matrices,
    sm_matrices_witness,
)


def _spec(*lam):
    return CovarianceSpectrum(np.array(lam, dtype=float), np.eye(len(lam)))


class TestGenericity:
    def test_trapezium(self):
        assert is_principally_generic(spectrum(T_POINTS)).is_generic

    def test_square(self):
        report = is_principally_generic(spectrum(rectangle(1.0, 1.0)))
        assert not report.is_generic
        assert report.gap == 0.0

    def test_rectangle(self):
        assert is_principally_generic(spectrum(rectangle(3.0, 2.0))).is_generic

    def test_zero_eigenvalue(self):
        assert not is_principally_generic(_spec(2.0, 0.0)).is_generic

    def test_relative_threshold(self):
        assert not is_principally_generic(_spec(1e6, 1e6 - 1e-4)).is_generic
        assert is_principally_generic(_spec(1e6, 1e6 - 1e-2)).is_generic
        report = is_principally_generic(_spec(1e6, 1.0), rel_tol=1e-3)
        assert report.threshold_used == 1e3
        assert not report.is_generic


class TestPCM:
    def test_trapezium(self):
        np.testing.assert_allclose(pcm(T_POINTS).matrix, T_POINTS.T, atol=1e-12)

    def test_kite(self):
        np.testing.assert_allclose(pcm(K_POINTS).matrix, K_POINTS.T, atol=1e-12)

    def test_rectangle_equals_sample_matrix(self):
        R = rectangle(3.0, 1.0)
        np.testing.assert_allclose(pcm(R).matrix, R.T, atol=1e-12)

    def test_square_not_generic(self):
        with pytest.raises(NotGeneric):
            pcm(rectangle(1.0, 1.0))

    def test_principal_axes_round_trip(self, rng):
        # rows with distinct norms, centered: the cloud is its own principal frame
        P = rng.normal(size=(3, 8)) * np.array([[5.0], [2.0], [0.5]])
        P -= P.mean(axis=1, keepdims=True)
        G = P @ P.T
        w, V = np.linalg.eigh(G)
        P = V.T[::-1] @ P  # express in eigenbasis, descending
        M = pcm(P.T).matrix
        signs = np.sign((M * P).sum(axis=1))
        np.testing.assert_allclose(signs[:, None] * M, P, atol=1e-10)

    def test_orientation(self, rng):
        p = pcm(random_cloud(3, 6, seed=4))
        assert p.orientation == int(np.sign(np.linalg.det(p.spectrum.eigenvectors)))
        assert np.linalg.det(p.spectrum.eigenvectors * np.array([1, 1, p.orientation])) > 0


class TestSM:
    def test_trapezium_kite(self):
        assert sm_matrices(pcm(T_POINTS), pcm(K_POINTS)) == 1.5
        assert sm_clouds(T_POINTS, K_POINTS) == 1.5

    def test_sign_flip_is_zero(self, rng):
        P = rng.normal(size=(3, 5))
        for s in sign_strings(3):
            assert sm_matrices(s[:, None] * P, P) == 0.0

    def test_witness(self):
        flipped = np.array([[1.0], [-1.0]]) * T_POINTS.T
        value, signs = sm_matrices_witness(T_POINTS.T, flipped)
        assert value == 0.0
        np.testing.assert_array_equal(signs, [1.0, -1.0])

    def test_sign_strings(self):
        assert len(list(sign_strings(3))) == 8
        rigid = list(sign_strings(3, "rigid"))
        assert len(rigid) == 4
        assert all(np.prod(s) == 1 for s in rigid)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInput):
            sm_matrices(np.zeros((2, 3)), np.zeros((2, 4)))
        with pytest.raises(InvalidInput):
            sm_clouds(T_POINTS, T_POINTS[:3])

    def test_bad_orientation(self):
        with pytest.raises(InvalidInput):
            sm_matrices(np.zeros((2, 3)), np.zeros((2, 3)), orientation="mirror")

    def test_not_generic_propagates(self):
        with pytest.raises(NotGeneric):
            sm_clouds(rectangle(1.0, 1.0), T_POINTS)

    def test_matches_brute_force(self, rng):
        for _ in range(15):
            P, Q = rng.normal(size=(2, 2, 5))
            assert sm_matrices(P, Q) == brute_sm(P, Q)

    def test_representative_independent(self, rng):
        A = random_cloud(3, 6, seed=11).points
        B = random_cloud(3, 6, seed=12).points
        PA, PB = pcm(A).matrix, pcm(B).matrix
        base = sm_matrices(PA, PB)
        for s in sign_strings(3):
            assert sm_matrices(s[:, None] * PA, PB) == base
            assert sm_matrices(PA, s[:, None] * PB) == base

    @pytest.mark.parametrize("seed", range(5))
    def test_rectangles(self, seed):
        r = np.random.default_rng(seed)
        l2, l1 = np.sort(r.uniform(0.1, 5.0, 2))
        m2, m1 = np.sort(r.uniform(0.1, 5.0, 2))
        expected = max(abs(l1 - m1), abs(l2 - m2))
        assert abs(sm_clouds(rectangle(l1, l2), rectangle(m1, m2)) - expected) <= 1e-9

    def test_rigid_detects_mirror(self):
        A = random_cloud(3, 6, seed=1, mode="chiral")
        Q = random_orthogonal(3, np.random.default_rng(5), det=-1)
        B = A.transformed(Q, [1.0, 2.0, 3.0])
        assert sm_clouds(A, B, orientation="full") <= 1e-9 * center(A).radius
        assert sm_clouds(A, B, orientation="rigid") > 1e-3

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 4), st.integers(0, 4))
    def test_isometry_invariance(self, seed, n, extra):
        A = random_cloud(n, n + 1 + extra, seed=seed)
        rng = np.random.default_rng(seed)
        r = center(A).radius
        assert sm_clouds(A, random_isometry(A, rng)) <= 1e-9 * r
        assert sm_clouds(A, random_isometry(A, rng, det=1), orientation="rigid") <= 1e-9 * r

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_metric_axioms(self, seed):
        rng = np.random.default_rng(seed)
        P, Q, R = (pcm(random_cloud(2, 5, seed=int(s))) for s in rng.integers(0, 2**31, 3))
        assert sm_matrices(P, Q) == sm_matrices(Q, P)
        assert sm_matrices(P, R) <= sm_matrices(P, Q) + sm_matrices(Q, R) + 1e-12
        assert sm_matrices(P, P) == 0.0

    def test_zero_iff_isometric(self, rng):
        for seed in range(8):
            A = random_cloud(2, 5, seed=seed)
            B = random_isometry(A, rng) if seed % 2 else random_cloud(2, 5, seed=seed + 100)
            zero = sm_clouds(A, B) <= 1e-9 * center(A).radius
            assert zero == (brute_isometry_check(A, B) is not None)


def _power_two_norm(E, iters=500):
    x = np.ones(E.shape[1])
    for _ in range(iters):
        y = E.T @ (E @ x)
        x = y / np.linalg.norm(y)
    return float(np.sqrt(np.linalg.norm(E.T @ (E @ x))))


class TestCovPerturbation:
    def test_identical(self):
        assert cov_perturbation_bound(T_POINTS, T_POINTS) == (0.0, 0.0, 0.0)

    def test_power_iteration_oracle(self):
        A = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
        B = A + np.array([[0.1, 0.0], [0.0, -0.1], [0.05, 0.05], [-0.1, 0.1]])
        E = covariance(A) - covariance(B)
        two, inf, _ = cov_perturbation_bound(A, B)
        assert abs(two - _power_two_norm(E)) <= 1e-12
        assert inf == np.abs(E).sum(axis=1).max()

    def test_bound_holds(self, rng):
        for _ in range(30):
            A = rng.normal(size=(6, 3))
            B = A + rng.uniform(-0.05, 0.05, size=A.shape)
            two, inf, bound = cov_perturbation_bound(A, B)
            assert two <= bound and inf <= bound

    def test_size_mismatch(self):
        with pytest.raises(InvalidInput):
            cov_perturbation_bound(T_POINTS, T_POINTS[:3])
