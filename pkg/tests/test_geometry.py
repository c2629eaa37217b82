"""Region geometry, discretization and region estimation."""

import numpy as np
import pytest

from gazelines.errors import InsufficientDataError
from gazelines.geometry import (
    Fixation,
    TextRegion,
    discretize,
    discretize_page,
    discretize_ys,
    estimate_region,
    line_centers,
)
from gazelines.simulate import SimConfig, simulate_page

from oracles import nearest_center_lines

TEN_LINE_REGION = TextRegion(y_top=0.0, y_bottom=10.0, x_left=0.0, x_right=10.0, n_lines=10)


class TestTypes:
    def test_fixation_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Fixation(0.0, np.nan, 1.0)
        with pytest.raises(ValueError):
            Fixation(0.0, 1.0, np.inf)

    def test_region_requires_positive_height(self):
        with pytest.raises(ValueError):
            TextRegion(5.0, 5.0, 0.0, 1.0, 3)

    def test_region_requires_lines(self):
        with pytest.raises(ValueError):
            TextRegion(0.0, 1.0, 0.0, 1.0, 0)


class TestLineCenters:
    def test_unit_spacing(self):
        assert line_centers(TEN_LINE_REGION).tolist() == [j + 0.5 for j in range(10)]

    def test_single_line(self):
        region = TextRegion(0.0, 1.0, 0.0, 1.0, 1)
        assert line_centers(region).tolist() == [0.5]

    def test_offset_region(self):
        region = TextRegion(100.0, 200.0, 0.0, 1.0, 4)
        assert line_centers(region).tolist() == [112.5, 137.5, 162.5, 187.5]

    def test_centers_strictly_increasing(self):
        region = TextRegion(-3.0, 17.0, 0.0, 1.0, 7)
        assert (np.diff(line_centers(region)) > 0).all()


class TestDiscretize:
    def test_nearest_center(self):
        assert discretize(Fixation(0.0, 1.0, 3.2), TEN_LINE_REGION) == 4

    def test_boundary_takes_lower_line(self):
        assert discretize(Fixation(0.0, 0.0, 1.0), TEN_LINE_REGION) == 1

    def test_out_of_region_clamps(self):
        assert discretize(Fixation(0.0, 0.0, -4.2), TEN_LINE_REGION) == 1
        assert discretize(Fixation(0.0, 0.0, 55.0), TEN_LINE_REGION) == 10

    def test_idempotent_at_returned_center(self):
        centers = line_centers(TEN_LINE_REGION)
        for y in (-2.0, 0.3, 4.999, 5.0, 9.99, 12.0):
            line = discretize(Fixation(0.0, 0.0, y), TEN_LINE_REGION)
            again = discretize(Fixation(0.0, 0.0, centers[line - 1]), TEN_LINE_REGION)
            assert again == line

    def test_agrees_with_distance_argmin(self):
        rng = np.random.default_rng(12)
        region = TextRegion(y_top=3.7, y_bottom=19.3, x_left=0.0, x_right=8.0, n_lines=13)
        ys = rng.uniform(-2.0, 25.0, size=2000)
        assert np.array_equal(discretize_ys(ys, region), nearest_center_lines(ys, region))


class TestDiscretizePage:
    def test_single_fixation(self):
        seq = discretize_page([Fixation(0.0, 0.5, 2.2)], TEN_LINE_REGION)
        assert len(seq) == 1 and seq.symbols[0] == 3

    def test_empty_page_rejected(self):
        with pytest.raises(ValueError):
            discretize_page([], TEN_LINE_REGION)

    def test_near_noiseless_page_matches_labels(self):
        page = simulate_page(SimConfig(sigma=0.02, seed=3, n_pages=1), 0)
        seq = discretize_page(page.fixations(), page.region)
        agreement = np.mean(seq.symbols == page.labels)
        assert agreement >= 0.99

    def test_heavy_noise_page_disagrees_with_labels(self):
        page = simulate_page(SimConfig(sigma=1.0, seed=3, n_pages=1), 0)
        seq = discretize_page(page.fixations(), page.region)
        assert np.mean(seq.symbols != page.labels) > 0.30


def _fixes(xs, ys):
    return [Fixation(float(i), float(x), float(y)) for i, (x, y) in enumerate(zip(xs, ys))]


class TestEstimateRegion:
    def test_exact_centers_batch_one(self):
        ys = np.arange(10) + 0.5
        xs = np.linspace(0.0, 9.0, 10)
        region = estimate_region(_fixes(xs, ys), 10, batch=1)
        assert region.y_top == 0.5
        assert region.y_bottom == 9.5
        assert region.n_lines == 10

    def test_translation_equivariance(self):
        rng = np.random.default_rng(8)
        ys = rng.normal(5.0, 2.0, 200)
        xs = rng.normal(1.0, 0.5, 200)
        base = estimate_region(_fixes(xs, ys), 5)
        shifted = estimate_region(_fixes(xs, ys + 123.456), 5)
        assert shifted.y_top == pytest.approx(base.y_top + 123.456, abs=1e-9)
        assert shifted.y_bottom == pytest.approx(base.y_bottom + 123.456, abs=1e-9)

    def test_cleaning_monotone_in_k_sigma(self):
        rng = np.random.default_rng(4)
        vals = np.concatenate([rng.normal(0.0, 1.0, 500), rng.uniform(-30, 30, 40)])
        survivors = []
        for k in (0.5, 1.0, 1.9, 3.0, 6.0):
            kept = vals[np.abs(vals - vals.mean()) <= k * vals.std()]
            survivors.append(kept.size)
        assert survivors == sorted(survivors)

    def test_identical_points_rejected(self):
        fixes = _fixes(np.full(50, 1.0), np.full(50, 2.0))
        with pytest.raises(InsufficientDataError):
            estimate_region(fixes, 10)

    def test_too_few_survivors_rejected(self):
        fixes = _fixes(np.arange(12), np.arange(12))
        with pytest.raises(InsufficientDataError):
            estimate_region(fixes, 10, batch=10)

    def test_recovers_height_under_contamination(self):
        page = simulate_page(SimConfig(sigma=0.2, seed=0, n_pages=1), 0)
        rng = np.random.default_rng(99)
        n_out = int(round(0.05 * len(page)))
        span = 25.0 * np.sqrt(3.0)
        lo, hi = 12.5 - span / 2, 12.5 + span / 2
        xs = np.concatenate([page.xs, rng.uniform(lo, hi, n_out)])
        ys = np.concatenate([page.ys, rng.uniform(lo, hi, n_out)])
        region = estimate_region(_fixes(xs, ys), 25)
        assert abs(region.height - 25.0) / 25.0 <= 0.05

    def test_bad_arguments(self):
        fixes = _fixes(np.arange(40), np.arange(40))
        with pytest.raises(ValueError):
            estimate_region(fixes, 0)
        with pytest.raises(ValueError):
            estimate_region(fixes, 5, k_sigma=0.0)
        with pytest.raises(ValueError):
            estimate_region(fixes, 5, batch=0)
