import numpy as np
import pytest

from sscpursuit.datamodel import (
    SubspaceArrangement,
    SyntheticConfig,
    affinity,
    generate_points,
    load_labels_csv,
    load_points_csv,
    normalize_columns,
    principal_angles,
    sample_arrangement_common_core,
    sample_arrangement_random,
    sample_arrangement_shared_intersection,
    save_labels_csv,
    save_points_csv,
)
from sscpursuit.exceptions import NotOrthonormalError, ParseError
from sscpursuit.numerics import RngStream, random_orthonormal


class TestArrangements:
    def test_full_basis_self_affinity(self):
        arr = sample_arrangement_random(4, (4,), RngStream(0))
        assert affinity(arr.bases[0], arr.bases[0]) == pytest.approx(1.0, abs=1e-12)

    def test_lines_in_high_dimension_nearly_orthogonal(self):
        vals = []
        for seed in range(100):
            arr = sample_arrangement_random(100, (1, 1), RngStream(seed, (50,)))
            vals.append(affinity(arr.bases[0], arr.bases[1]))
        vals = np.array(vals)
        assert np.mean(vals < 0.5) >= 0.95
        assert vals.mean() < 0.2

    def test_deterministic_per_seed(self):
        a = sample_arrangement_random(6, (2, 3), RngStream(7))
        b = sample_arrangement_random(6, (2, 3), RngStream(7))
        for U, V in zip(a.bases, b.bases):
            assert np.array_equal(U, V)

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            sample_arrangement_random(3, (4,), RngStream(0))

    def test_arrangement_validates_orthonormality(self):
        with pytest.raises(NotOrthonormalError):
            SubspaceArrangement((np.ones((4, 2)),))


class TestSharedIntersection:
    def test_affinity_sqrt_t_over_d(self):
        arr = sample_arrangement_shared_intersection(200, 3, 20, 5, RngStream(1))
        for k in range(3):
            for l in range(k + 1, 3):
                assert affinity(arr.bases[k], arr.bases[l]) == pytest.approx(
                    0.5, abs=1e-10
                )

    def test_orthogonal_when_t_zero(self):
        arr = sample_arrangement_shared_intersection(30, 3, 5, 0, RngStream(2))
        assert affinity(arr.bases[0], arr.bases[1]) == pytest.approx(0.0, abs=1e-10)

    def test_identical_when_t_equals_d(self):
        arr = sample_arrangement_shared_intersection(20, 3, 5, 5, RngStream(3))
        assert affinity(arr.bases[0], arr.bases[2]) == pytest.approx(1.0, abs=1e-10)

    def test_grid_of_t_and_d(self):
        for d in (5, 10, 20):
            for t in range(d + 1):
                arr = sample_arrangement_shared_intersection(
                    2 * (2 * (d - t) + t) + t + 1, 2, d, t, RngStream(d, (t,))
                )
                got = affinity(arr.bases[0], arr.bases[1])
                assert got == pytest.approx(np.sqrt(t / d), abs=1e-10)

    def test_too_small_ambient(self):
        with pytest.raises(ValueError):
            sample_arrangement_shared_intersection(10, 3, 5, 0, RngStream(0))


class TestCommonCore:
    def test_min_affinity_bound(self):
        arr = sample_arrangement_common_core(300, (20, 40, 60, 80), 4, RngStream(4))
        affs = [
            affinity(arr.bases[k], arr.bases[l])
            for k in range(4)
            for l in range(k + 1, 4)
        ]
        assert min(affs) >= np.sqrt(4 / 20) - 1e-10

    def test_zero_core_independent(self):
        arr = sample_arrangement_common_core(50, (3, 4), 0, RngStream(5))
        assert arr.dims == (3, 4)

    def test_full_core_identical(self):
        arr = sample_arrangement_common_core(20, (4, 4), 4, RngStream(6))
        assert affinity(arr.bases[0], arr.bases[1]) == pytest.approx(1.0, abs=1e-10)

    def test_invalid_core(self):
        with pytest.raises(ValueError):
            sample_arrangement_common_core(20, (4, 6), 5, RngStream(0))


class TestGeneratePoints:
    def test_noiseless_unit_columns(self):
        arr = sample_arrangement_random(10, (3, 4), RngStream(7))
        ds = generate_points(arr, SyntheticConfig(10, (5, 6), 0.0, RngStream(8)))
        assert np.array_equal(ds.Y, ds.X)
        assert np.allclose(np.linalg.norm(ds.X, axis=0), 1.0, atol=1e-12)
        assert np.array_equal(ds.truth, [0] * 5 + [1] * 6)

    def test_points_lie_in_their_subspace(self):
        arr = sample_arrangement_random(12, (2, 5), RngStream(9))
        ds = generate_points(arr, SyntheticConfig(12, (4, 3), 0.0, RngStream(10)))
        for col, lab in zip(ds.X.T, ds.truth):
            U = arr.bases[lab]
            assert np.linalg.norm(col - U @ (U.T @ col)) <= 1e-12

    def test_noise_norm_concentration(self):
        m, sigma = 200, 0.5
        arr = sample_arrangement_random(m, (5,), RngStream(11))
        ds = generate_points(arr, SyntheticConfig(m, (1000,), sigma, RngStream(12)))
        z = ds.Y - ds.X
        mean_sq = float(np.mean(np.sum(z**2, axis=0)))
        assert abs(mean_sq - sigma**2) <= 0.05 * sigma**2

    def test_noise_isotropy(self):
        m, sigma = 6, 0.8
        arr = sample_arrangement_random(m, (2,), RngStream(13))
        ds = generate_points(arr, SyntheticConfig(m, (10_000,), sigma, RngStream(14)))
        z = ds.Y - ds.X
        cov = z @ z.T / z.shape[1]
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() <= 0.02 * sigma**2 / m + 1e-12

    def test_general_position(self):
        m = 8
        arr = sample_arrangement_random(m, (2, 2), RngStream(15))
        ds = generate_points(arr, SyntheticConfig(m, (8, 8), 0.3, RngStream(16)))
        gen = RngStream(17).generator()
        for _ in range(10):
            cols = gen.choice(ds.Y.shape[1], size=m, replace=False)
            assert np.linalg.matrix_rank(ds.Y[:, cols]) == m

    def test_deterministic(self):
        arr = sample_arrangement_random(6, (2,), RngStream(18))
        a = generate_points(arr, SyntheticConfig(6, (5,), 0.4, RngStream(19)))
        b = generate_points(arr, SyntheticConfig(6, (5,), 0.4, RngStream(19)))
        assert np.array_equal(a.Y, b.Y)

    def test_sampling_densities(self):
        cfg = SyntheticConfig(10, (41, 81), 0.0, RngStream(0))
        assert cfg.sampling_densities((10, 20)) == (4.0, 4.0)

    def test_mismatched_counts(self):
        arr = sample_arrangement_random(6, (2, 2), RngStream(20))
        with pytest.raises(ValueError):
            generate_points(arr, SyntheticConfig(6, (5,), 0.0, RngStream(0)))


class TestNormalizeColumns:
    def test_already_unit(self):
        Y = np.eye(3)
        Yn, zeros = normalize_columns(Y)
        assert np.abs(Yn - Y).max() <= 1e-15
        assert zeros == []

    def test_scaling_removed(self):
        Y = np.array([[7.0], [0.0]])
        Yn, _ = normalize_columns(Y)
        assert np.allclose(Yn[:, 0], [1.0, 0.0])

    def test_zero_column_reported(self):
        Y = np.array([[1.0, 0.0], [1.0, 0.0]])
        Yn, zeros = normalize_columns(Y)
        assert zeros == [1]
        assert not Yn[:, 1].any()


class TestAffinityAndAngles:
    def test_identical(self):
        U = random_orthonormal(8, 3, RngStream(21))
        assert affinity(U, U) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(principal_angles(U, U), 0.0, atol=1e-6)

    def test_orthogonal_lines(self):
        e1 = np.array([[1.0], [0.0]])
        e2 = np.array([[0.0], [1.0]])
        assert affinity(e1, e2) == pytest.approx(0.0, abs=1e-12)
        assert principal_angles(e1, e2) == pytest.approx([np.pi / 2], abs=1e-12)

    def test_frobenius_vs_angle_forms_agree(self):
        for seed in range(100):
            rng = RngStream(seed, (60,))
            dk = 2 + seed % 3
            dl = 2 + (seed // 3) % 4
            U = random_orthonormal(12, dk, rng.child(0))
            V = random_orthonormal(12, dl, rng.child(1))
            via_angles = np.sqrt(
                np.sum(np.cos(principal_angles(U, V)) ** 2) / min(dk, dl)
            )
            assert affinity(U, V) == pytest.approx(via_angles, abs=1e-10)

    def test_symmetry_and_range(self):
        U = random_orthonormal(9, 2, RngStream(22, (0,)))
        V = random_orthonormal(9, 4, RngStream(22, (1,)))
        a = affinity(U, V)
        assert a == pytest.approx(affinity(V, U), abs=1e-12)
        assert -1e-12 <= a <= 1 + 1e-12

    def test_not_orthonormal_rejected(self):
        with pytest.raises(NotOrthonormalError):
            affinity(np.ones((4, 2)), np.eye(4)[:, :2])


class TestCsvIO:
    def test_round_trip(self, tmp_path):
        arr = sample_arrangement_random(5, (2,), RngStream(23))
        ds = generate_points(arr, SyntheticConfig(5, (7,), 0.2, RngStream(24)))
        data = tmp_path / "points.csv"
        labels = tmp_path / "labels.csv"
        save_points_csv(ds.Y, data)
        save_labels_csv(ds.truth, labels)
        Y2 = load_points_csv(data)
        t2 = load_labels_csv(labels)
        assert np.array_equal(Y2, ds.Y)
        assert np.array_equal(t2, ds.truth)

    def test_parse_error_carries_line(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n3.0,oops\n", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_points_csv(bad)
        assert err.value.line == 2

    def test_ragged_rows_rejected(self, tmp_path):
        bad = tmp_path / "ragged.csv"
        bad.write_text("1.0,2.0\n3.0\n", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_points_csv(bad)
        assert err.value.line == 2

    def test_empty_file_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("", encoding="utf-8")
        with pytest.raises(ParseError):
            load_points_csv(bad)
