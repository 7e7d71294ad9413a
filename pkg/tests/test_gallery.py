import numpy as np
import pytest
from numpy.testing import assert_allclose

from tensorscape.gallery import (
    GALLERY,
    composition_counterexample,
    get_entry,
    hestenes,
    hestenes_descent_path,
    nopath,
    rational_global,
    surface_rows,
    takagi_bivariate,
    verify_entry,
)
from tensorscape.landscape import GLOBAL, SPURIOUS_FOUND, WEAKLY_GLOBAL_ONLY, GridBox, verify_global, verify_weakly_global


class TestRational:
    def test_values(self):
        assert rational_global(0.0) == 0.0
        assert rational_global(1.0) == 1.0
        assert_allclose(rational_global(10.0), 10100.0 / 10001.0, rtol=1e-15)

    def test_tail_limit(self):
        assert abs(rational_global(1e6) - 1.0) < 1e-11


class TestNopath:
    def test_top_edge_is_flat_zero(self):
        for x1 in (-1.0, -0.3, 0.0, 0.7, 1.0):
            assert nopath(x1, 1.0) == 0.0

    def test_axis_column_upper_branch(self):
        assert nopath(0.0, 0.5) == 0.0

    def test_axis_column_lower_branch(self):
        # at x1 = 0 the lower branch reduces to -2 x2^3 - 3 x2^2
        assert nopath(0.0, -1.0) == -1.0
        assert_allclose(nopath(0.0, -0.5), -2 * (-0.5) ** 3 - 3 * 0.25, rtol=1e-15)

    def test_bottom_edge_value(self):
        for x1 in (-0.9, -0.2, 0.4, 1.0):
            assert_allclose(nopath(x1, -1.0), -1.0, rtol=1e-12)

    def test_continuity_at_axis(self):
        rng = np.random.default_rng(0)
        x2 = rng.uniform(-1, 1, 1000)
        gaps = []
        for eps in (1e-2, 1e-3, 1e-4):
            gaps.append(np.abs(nopath(np.full_like(x2, eps), x2) - nopath(np.zeros_like(x2), x2)).max())
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-10

    def test_branch_seam_is_smooth(self):
        x1 = np.linspace(-1, 1, 101)
        below = nopath(x1, np.full_like(x1, -1e-9))
        above = nopath(x1, np.zeros_like(x1))
        assert np.abs(below - above).max() < 1e-8

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            nopath(1.5, 0.0)
        with pytest.raises(ValueError):
            nopath(0.0, -1.01)


class TestHestenes:
    def test_origin(self):
        assert hestenes(0.0, 0.0) == 0.0

    def test_descent_path_value(self):
        p = hestenes_descent_path(1.0)
        assert_allclose(hestenes(p[0], p[1]), -9.0 / 16.0, rtol=1e-15)

    def test_path_identity(self):
        t = np.linspace(0.0, 1.0, 100)
        pts = hestenes_descent_path(t)
        residual = hestenes(pts[:, 0], pts[:, 1]) + (9.0 / 16.0) * t**4
        assert np.abs(residual).max() <= 1e-12


class TestTakagi:
    def test_midline_is_zero(self):
        for x1 in (0.1, 0.37, 0.5, 0.9):
            assert takagi_bivariate(x1, 0.5) == 0.0

    def test_half_section_scaling(self):
        # the series at x1 = 1/2 sums to exactly 1/2
        for x2 in (0.9, 0.99):
            assert_allclose(takagi_bivariate(0.5, x2), abs(2 * x2 - 1) * 0.5, rtol=1e-15)

    def test_truncation_tail(self):
        v30 = takagi_bivariate(0.3712, 0.81, terms=30)
        v60 = takagi_bivariate(0.3712, 0.81, terms=60)
        assert abs(v60 - v30) < 2.0**-29

    def test_terms_guard(self):
        with pytest.raises(ValueError):
            takagi_bivariate(0.5, 0.5, terms=0)


class TestComposition:
    def test_values(self):
        assert composition_counterexample(0.0) == 1.0
        assert composition_counterexample(2.0) == 0.0
        assert composition_counterexample(-2.0) == 0.0

    def test_flat_spurious_minimum_at_origin(self):
        box = GridBox([-4.0], [4.0], 801)
        rep = verify_global(composition_counterexample, box)
        assert rep.verdict == SPURIOUS_FOUND
        assert any(p == (0.0,) and v == 1.0 for p, v in rep.grid_local_minima)

    def test_weak_verdict_sees_nonstrict_plateau(self):
        # the spurious minimum is a flat shelf whose edges continue at equal
        # value, so it is not strict in the set sense
        box = GridBox([-4.0], [4.0], 801)
        rep = verify_weakly_global(composition_counterexample, box)
        assert rep.verdict == WEAKLY_GLOBAL_ONLY

    def test_pieces_are_individually_clean(self):
        box = GridBox([-4.0], [4.0], 801)
        assert verify_global(np.abs, box).verdict == GLOBAL
        g = lambda x: np.maximum(-1.0, np.abs(x) - 2.0)
        assert verify_global(g, box).verdict == GLOBAL


class TestRegistry:
    @pytest.mark.parametrize("name", sorted(GALLERY))
    def test_claims_verify_on_their_boxes(self, name):
        report, ok = verify_entry(name)
        assert ok, f"{name}: verdict {report.verdict}"

    def test_unknown_entry(self):
        with pytest.raises(KeyError):
            get_entry("nope")

    def test_surface_rows_shapes(self):
        rows1 = surface_rows("rational_global", 11)
        assert rows1.shape == (11, 2)
        rows2 = surface_rows("hestenes", 11)
        assert rows2.shape == (121, 3)
