import numpy as np
import pytest

from sscpursuit.graph import (
    build_adjacency,
    check_nfc,
    connected_components,
    estimate_num_clusters_eigengap,
    laplacian_spectrum,
    normalized_laplacian,
)
from sscpursuit.numerics import RngStream


def random_block_graph(block_sizes, rng, weight_lo=0.5, weight_hi=1.5):
    """Symmetric nonnegative graph whose components are exactly the blocks."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    n = sum(block_sizes)
    A = np.zeros((n, n))
    start = 0
    truth = np.empty(n, dtype=int)
    for b, size in enumerate(block_sizes):
        raw = gen.uniform(weight_lo, weight_hi, size=(size, size))
        block = np.triu(raw, k=1)
        block = block + block.T
        A[start : start + size, start : start + size] = block
        truth[start : start + size] = b
        start += size
    return A, truth


class TestBuildAdjacency:
    def test_zero(self):
        assert not build_adjacency(np.zeros((3, 3))).any()

    def test_abs_and_symmetrize(self):
        B = np.zeros((3, 3))
        B[1, 0] = -2.0
        A = build_adjacency(B)
        assert A[1, 0] == A[0, 1] == 2.0

    def test_random_sparse_properties(self):
        gen = RngStream(0, (10,)).generator()
        B = gen.standard_normal((8, 8)) * (gen.random((8, 8)) < 0.3)
        np.fill_diagonal(B, 0.0)
        A = build_adjacency(B)
        assert np.array_equal(A, A.T)
        assert A.min() >= 0
        assert not np.diag(A).any()

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            build_adjacency(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            build_adjacency(np.eye(3))


class TestConnectedComponents:
    def test_all_isolated(self):
        labels = connected_components(np.zeros((3, 3)))
        assert len(set(labels.tolist())) == 3

    def test_two_blocks(self):
        A, truth = random_block_graph([3, 4], RngStream(1))
        labels = connected_components(A)
        assert len(set(labels.tolist())) == 2
        assert len(set(labels[:3].tolist())) == 1 and len(set(labels[3:].tolist())) == 1

    def test_path_graph(self):
        A = np.zeros((5, 5))
        for i in range(4):
            A[i, i + 1] = A[i + 1, i] = 1.0
        assert len(set(connected_components(A).tolist())) == 1


class TestCheckNfc:
    def test_block_diagonal_ok(self):
        A, truth = random_block_graph([4, 3], RngStream(2))
        ok, violations = check_nfc(A, truth)
        assert ok and violations == []

    def test_single_cross_edge(self):
        A, truth = random_block_graph([3, 3], RngStream(3))
        A[0, 5] = A[5, 0] = 0.7
        ok, violations = check_nfc(A, truth)
        assert not ok
        assert violations == [(0, 5, 0.7)]

    def test_zero_matrix_vacuous(self):
        ok, violations = check_nfc(np.zeros((4, 4)), np.array([0, 0, 1, 1]))
        assert ok and violations == []

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            check_nfc(np.zeros((3, 3)), np.array([0, 1]))

    def test_nfc_implies_components_refine_truth(self):
        for seed in range(10):
            A, truth = random_block_graph([3, 2, 4], RngStream(seed, (20,)))
            ok, _ = check_nfc(A, truth)
            assert ok
            comp = connected_components(A)
            for c in set(comp.tolist()):
                assert len(set(truth[comp == c].tolist())) == 1


class TestLaplacian:
    def test_zero_eigs_match_components(self):
        for seed in range(50):
            gen = RngStream(seed, (30,)).generator()
            k = int(gen.integers(1, 5))
            sizes = [int(gen.integers(1, 6)) for _ in range(k)]
            A, _ = random_block_graph(sizes, gen)
            w, _ = laplacian_spectrum(A)
            n_zero = int(np.sum(np.abs(w) <= 1e-8))
            n_comp = len(set(connected_components(A).tolist()))
            assert n_zero == n_comp

    def test_isolated_node_row_is_zero(self):
        A = np.zeros((3, 3))
        A[0, 1] = A[1, 0] = 1.0
        L = normalized_laplacian(A)
        assert not L[2].any() and not L[:, 2].any()
        assert L[0, 0] == 1.0


class TestEigengap:
    def test_two_block_ideal(self):
        A, _ = random_block_graph([5, 4], RngStream(4))
        assert estimate_num_clusters_eigengap(A, 5) == 2

    def test_three_singletons(self):
        assert estimate_num_clusters_eigengap(np.zeros((3, 3)), 3) == 3

    def test_weak_cross_edge(self):
        A, _ = random_block_graph([4, 4], RngStream(5))
        A[0, 7] = A[7, 0] = 1e-6
        # spectrum check: second eigenvalue is tiny, third is order one
        w, _ = laplacian_spectrum(A, k=3)
        assert w[1] < 1e-4 < w[2]
        assert estimate_num_clusters_eigengap(A, 5) == 2

    def test_component_count_recovered(self):
        for seed in range(20):
            gen = RngStream(seed, (31,)).generator()
            k = int(gen.integers(1, 6))
            sizes = [int(gen.integers(2, 6)) for _ in range(k)]
            A, _ = random_block_graph(sizes, gen)
            assert estimate_num_clusters_eigengap(A, 8) == k

    def test_component_count_recovered_on_weak_internal_connectivity(self):
        # two path-graph components: within-component gaps are small, so the
        # component count must come from the zero-eigenvalue count
        n = 8
        A = np.zeros((2 * n, 2 * n))
        for i in range(n - 1):
            A[i, i + 1] = A[i + 1, i] = 1.0
            A[n + i, n + i + 1] = A[n + i + 1, n + i] = 1.0
        assert estimate_num_clusters_eigengap(A, 10) == 2

    def test_invalid_l_max(self):
        with pytest.raises(ValueError):
            estimate_num_clusters_eigengap(np.zeros((3, 3)), 0)
