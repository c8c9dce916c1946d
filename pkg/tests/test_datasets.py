"""Generator geometry, seeding, and CSV plumbing."""

import numpy as np
import pytest

from topodiv import (
    PointCloud,
    ValidationError,
    build_filtration,
    compute_barcode,
    pairwise_distances,
)
from topodiv.datasets import (
    DatasetSpec,
    circle_cloud,
    figure_eight_cloud,
    generate,
    load_csv,
    nested_spheres_cloud,
    random_square_cloud,
    save_csv,
    three_clusters_cloud,
    torus_cloud,
    two_clusters_cloud,
)


class TestDatasetSpec:
    def test_defaults_fill_in(self):
        assert generate(DatasetSpec("circle")).points.shape == (100, 2)
        assert generate(DatasetSpec("random")).points.shape == (500, 2)
        assert generate(DatasetSpec("clusters2")).points.shape == (200, 2)
        assert generate(DatasetSpec("clusters3")).points.shape == (300, 2)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValidationError):
            DatasetSpec("moebius")

    def test_bad_size_rejected(self):
        with pytest.raises(ValidationError):
            DatasetSpec("circle", size=0)

    def test_file_needs_path(self):
        with pytest.raises(ValidationError):
            DatasetSpec("file")

    def test_planar_datasets_refuse_other_dimensions(self):
        with pytest.raises(ValidationError):
            DatasetSpec("circle", ambient_dim=3)
        assert DatasetSpec("clusters2", ambient_dim=2).ambient_dim == 2

    def test_curved_datasets_need_room(self):
        with pytest.raises(ValidationError):
            DatasetSpec("spheres", ambient_dim=2)
        with pytest.raises(ValidationError):
            DatasetSpec("torus", ambient_dim=2)

    def test_json_round_trip(self):
        spec = DatasetSpec("torus", size=150, seed=3, ambient_dim=10)
        assert DatasetSpec.from_json(spec.to_json()) == spec

    def test_same_spec_same_cloud(self):
        spec = DatasetSpec("clusters3", size=60, seed=11)
        a = generate(spec)
        b = generate(spec)
        assert np.array_equal(a.points, b.points)

    def test_seeds_differ(self):
        a = generate(DatasetSpec("random", size=50, seed=0))
        b = generate(DatasetSpec("random", size=50, seed=1))
        assert not np.array_equal(a.points, b.points)


class TestCircle:
    def test_unit_radius(self):
        cloud = circle_cloud(100, seed=2)
        radii = np.linalg.norm(cloud.points, axis=1)
        assert np.abs(radii - 1.0).max() <= 1e-12

    def test_carries_one_loop(self):
        cloud = circle_cloud(60, seed=7)
        filtration = build_filtration(pairwise_distances(cloud), max_dim=2)
        bars = compute_barcode(filtration, dims=(1,))
        long = [b for b in bars if b.length > 1.0]
        assert len(long) == 1


class TestRandomSquare:
    def test_inside_unit_square(self):
        pts = random_square_cloud(500, seed=4).points
        assert pts.min() >= 0.0 and pts.max() <= 1.0


class TestTwoClusters:
    def test_density_contrast(self):
        pts = two_clusters_cloud(200, seed=0).points
        dense, sparse = pts[:100], pts[100:]
        assert sparse.var() / dense.var() > 10.0

    def test_shared_mean(self):
        for seed in range(3):
            pts = two_clusters_cloud(200, seed=seed).points
            assert np.linalg.norm(pts[:100].mean(axis=0)) < 0.05
            assert np.linalg.norm(pts[100:].mean(axis=0)) < 0.25


class TestThreeClusters:
    def test_block_means_sit_on_centers(self):
        pts = three_clusters_cloud(300, seed=0).points
        means = [pts[:100].mean(axis=0), pts[100:200].mean(axis=0), pts[200:].mean(axis=0)]
        for mean, center in zip(means, [(0.0, 0.0), (1.0, 0.0), (5.0, 0.0)]):
            assert np.linalg.norm(mean - np.array(center)) < 0.05

    def test_two_clusters_much_closer(self):
        pts = three_clusters_cloud(300, seed=1).points
        m0, m1, m2 = pts[:100].mean(axis=0), pts[100:200].mean(axis=0), pts[200:].mean(axis=0)
        near = np.linalg.norm(m0 - m1)
        assert near < np.linalg.norm(m0 - m2) / 3.0
        assert near < np.linalg.norm(m1 - m2) / 3.0


class TestSpheres:
    def test_block_radii_are_exact(self):
        cloud, centers = nested_spheres_cloud(220, seed=0, ambient_dim=101)
        assert cloud.points.shape == (220, 101)
        assert centers.shape == (11, 101)
        per = 20
        for k in range(10):
            block = cloud.points[k * per : (k + 1) * per]
            radii = np.linalg.norm(block - centers[k], axis=1)
            assert np.abs(radii - 1.0).max() <= 1e-9
        outer = cloud.points[10 * per :]
        assert np.abs(np.linalg.norm(outer, axis=1) - 5.0).max() <= 1e-9

    def test_small_spheres_nest_inside_big_one(self):
        cloud, centers = nested_spheres_cloud(220, seed=1, ambient_dim=101)
        inner = cloud.points[:200]
        assert np.linalg.norm(inner, axis=1).max() < 5.0
        assert (np.linalg.norm(centers[:10], axis=1) + 1.0 < 5.0).all()

    def test_small_spheres_pairwise_disjoint(self):
        _, centers = nested_spheres_cloud(220, seed=2, ambient_dim=101)
        small = centers[:10]
        gaps = np.linalg.norm(small[:, None] - small[None, :], axis=2)
        assert gaps[np.triu_indices(10, k=1)].min() > 2.0

    def test_three_dimensional_placement_works(self):
        for seed in range(3):
            cloud, centers = nested_spheres_cloud(66, seed=seed, ambient_dim=3)
            assert cloud.points.shape == (66, 3)
            small = centers[:10]
            gaps = np.linalg.norm(small[:, None] - small[None, :], axis=2)
            assert gaps[np.triu_indices(10, k=1)].min() > 2.0

    def test_spec_wraps_sampler(self):
        via_spec = generate(DatasetSpec("spheres", size=220, seed=0))
        direct, _ = nested_spheres_cloud(220, seed=0, ambient_dim=101)
        assert np.array_equal(via_spec.points, direct.points)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValidationError):
            nested_spheres_cloud(10, seed=0, ambient_dim=3)


class TestTorus:
    def test_embedding_is_three_dimensional(self):
        pts = torus_cloud(150, seed=0, ambient_dim=100).points
        assert pts.shape == (150, 100)
        singular = np.linalg.svd(pts, compute_uv=False)
        assert singular[3] < 1e-8 * singular[0]

    def test_norms_stay_in_tube_range(self):
        pts = torus_cloud(200, seed=1, ambient_dim=100).points
        norms = np.linalg.norm(pts, axis=1)
        assert norms.min() >= 1.0 - 1e-9
        assert norms.max() <= 3.0 + 1e-9

    def test_small_ambient_dimension(self):
        pts = torus_cloud(80, seed=2, ambient_dim=3).points
        norms = np.linalg.norm(pts, axis=1)
        assert pts.shape == (80, 3)
        assert norms.min() >= 1.0 - 1e-9 and norms.max() <= 3.0 + 1e-9


class TestFigureEight:
    def test_points_satisfy_curve_equation(self):
        pts = figure_eight_cloud(100, seed=0).points
        x, y = pts[:, 0], pts[:, 1]
        assert np.abs(y ** 2 - (x ** 2) * (1.0 - x ** 2)).max() <= 1e-12

    def test_no_coincident_points(self):
        for seed in range(20):
            w = pairwise_distances(figure_eight_cloud(100, seed=seed)).values
            off_diagonal = w[np.triu_indices(100, k=1)]
            assert off_diagonal.min() > 0.0


class TestCsv:
    def test_round_trip_is_bit_equal(self, tmp_path):
        cloud = random_square_cloud(40, seed=9)
        path = tmp_path / "cloud.csv"
        save_csv(cloud, path)
        assert np.array_equal(load_csv(path).points, cloud.points)

    def test_header_row_skipped(self, tmp_path):
        path = tmp_path / "with_header.csv"
        path.write_text("x,y,z\n1,2,3\n4,5,6\n")
        cloud = load_csv(path)
        assert cloud.points.shape == (2, 3)
        assert np.array_equal(cloud.points, [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(ValidationError):
            load_csv(path)

    def test_non_numeric_cell_rejected(self, tmp_path):
        path = tmp_path / "bad_cell.csv"
        path.write_text("1,2\n3,four\n")
        with pytest.raises(ValidationError):
            load_csv(path)

    def test_empty_and_header_only_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(ValidationError):
            load_csv(empty)
        header_only = tmp_path / "header.csv"
        header_only.write_text("x,y\n")
        with pytest.raises(ValidationError):
            load_csv(header_only)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            load_csv(tmp_path / "nope.csv")

    def test_file_spec_subsamples_rows(self, tmp_path):
        cloud = random_square_cloud(20, seed=5)
        path = tmp_path / "full.csv"
        save_csv(cloud, path)
        spec = DatasetSpec("file", size=5, seed=3, path=str(path))
        sub = generate(spec)
        assert sub.points.shape == (5, 2)
        rows = {tuple(row) for row in cloud.points}
        assert all(tuple(row) in rows for row in sub.points)
        assert np.array_equal(sub.points, generate(spec).points)
