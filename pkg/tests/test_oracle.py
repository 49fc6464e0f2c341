from fractions import Fraction

import numpy as np
import pytest

from conftest import K_POINTS, T_POINTS
from isoclouds import GenerationFailure, InvalidInput, TooLarge
from isoclouds.geometry import bottleneck, center, spectrum
from isoclouds.metrics import lac, lac_isometry
from isoclouds.oracle import (
    brute_bottleneck,
    brute_isometry_check,
    pairwise_distance_multiset,
    random_cloud,
    random_isometry,
    random_orthogonal,
    transport_vertices,
)
from isoclouds.pci import is_principally_generic, sm_clouds
from isoclouds.wmi import mirror_wmi, reflect, wmi


class TestBruteBottleneck:
    def test_trapezium_kite(self):
        assert brute_bottleneck(T_POINTS.T, K_POINTS.T) == 1.5

    def test_identical(self, rng):
        P = rng.normal(size=(3, 5))
        assert brute_bottleneck(P, P) == 0.0

    def test_matches_matching(self, rng):
        for _ in range(20):
            P, Q = rng.normal(size=(2, 2, 5))
            assert brute_bottleneck(P, Q) == bottleneck(P, Q)

    def test_cap(self):
        with pytest.raises(TooLarge):
            brute_bottleneck(np.zeros((1, 9)), np.zeros((1, 9)))


class TestTransportVertices:
    def test_two_by_two(self):
        verts = transport_vertices([Fraction(1, 2)] * 2, [Fraction(1, 2)] * 2)
        assert len(verts) == 2

    def test_vertices_feasible(self):
        wc = [Fraction(1, 3)] * 3
        wd = [Fraction(1, 4)] * 4
        for v in transport_vertices(wc, wd):
            rows = [sum(f for (i, _), f in v.items() if i == r) for r in range(3)]
            cols = [sum(f for (_, j), f in v.items() if j == c) for c in range(4)]
            assert rows == wc and cols == wd
            assert all(f > 0 for f in v.values())

    def test_cap(self):
        with pytest.raises(TooLarge):
            transport_vertices([Fraction(1, 5)] * 5, [1])


class TestIsometryCheck:
    def test_rotated_permuted(self, rng):
        A = rng.normal(size=(6, 3))
        B = random_isometry(A, rng)
        w = brute_isometry_check(A, B)
        assert w is not None and w.residual <= 1e-9 * center(A).radius
        moved = A @ w.orthogonal.T + w.translation
        np.testing.assert_allclose(moved, B.points[w.permutation], atol=1e-9)

    def test_trapezium_kite(self):
        assert brute_isometry_check(T_POINTS, K_POINTS) is None

    def test_chiral_mirror(self):
        A = random_cloud(3, 5, seed=6, mode="chiral")
        B = reflect(A)
        assert brute_isometry_check(A, B, orientation="rigid") is None
        assert brute_isometry_check(A, B) is not None

    def test_cap(self):
        with pytest.raises(TooLarge):
            brute_isometry_check(np.eye(8), np.eye(8))

    def test_size_mismatch(self):
        with pytest.raises(InvalidInput):
            brute_isometry_check(T_POINTS, T_POINTS[:3])

    @pytest.mark.parametrize("seed", range(6))
    def test_cross_validates_invariants(self, seed):
        rng = np.random.default_rng(seed)
        A = random_cloud(2, 5, seed=seed)
        B = random_isometry(A, rng) if seed % 2 else random_cloud(2, 5, seed=seed + 50)
        truth = brute_isometry_check(A, B) is not None
        tol = 1e-9 * center(A).radius
        assert (sm_clouds(A, B) <= tol) == truth
        assert (lac_isometry(A, B) <= tol) == truth


class TestDistanceMultiset:
    def test_trapezium(self):
        expected = np.sort([2**0.5, 2**0.5, 2.0, 10**0.5, 10**0.5, 4.0])
        np.testing.assert_allclose(pairwise_distance_multiset(T_POINTS), expected, atol=1e-12)

    def test_kite_matches(self):
        np.testing.assert_allclose(
            pairwise_distance_multiset(K_POINTS), pairwise_distance_multiset(T_POINTS), atol=1e-12
        )

    def test_two_points(self):
        np.testing.assert_allclose(pairwise_distance_multiset([[0.0, 0.0], [3.0, 4.0]]), [5.0])


class TestGenerators:
    def test_generic(self):
        A = random_cloud(2, 4, seed=1)
        assert is_principally_generic(spectrum(A)).is_generic

    def test_deterministic(self):
        np.testing.assert_array_equal(random_cloud(3, 6, seed=9).points, random_cloud(3, 6, seed=9).points)

    @pytest.mark.parametrize("m", [3, 5, 8])
    def test_symmetric_polygon(self, m):
        lam = spectrum(random_cloud(2, m, seed=0, mode="symmetric")).eigenvalues
        assert abs(lam[0] - lam[1]) <= 1e-12

    @pytest.mark.parametrize("n,m", [(3, 4), (3, 6), (3, 8), (4, 5), (4, 8), (4, 16)])
    def test_symmetric_polytopes(self, n, m):
        lam = spectrum(random_cloud(n, m, seed=0, mode="symmetric")).eigenvalues
        assert np.ptp(lam) <= 1e-12 * lam[0]

    def test_chiral(self):
        W = wmi(random_cloud(3, 4, seed=2, mode="chiral"))
        assert lac(W, mirror_wmi(W)).value > 1e-8

    def test_needs_more_points(self):
        with pytest.raises(GenerationFailure):
            random_cloud(3, 3, seed=0)

    def test_no_template(self):
        with pytest.raises(GenerationFailure):
            random_cloud(4, 7, seed=0, mode="symmetric")

    def test_bad_mode(self):
        with pytest.raises(InvalidInput):
            random_cloud(2, 4, seed=0, mode="other")

    def test_orthogonal_det(self, rng):
        for det in (1, -1):
            Q = random_orthogonal(4, rng, det)
            np.testing.assert_allclose(Q @ Q.T, np.eye(4), atol=1e-12)
            assert np.sign(np.linalg.det(Q)) == det
