"""Tests for gap filling and standardization."""

import numpy as np
import pytest

from sparsedfm.data.imputation import Standardizer, fill_na, standardize
from sparsedfm.data.panel import TimePanel
from sparsedfm.errors import DataError


@pytest.mark.unit
class TestFillNa:
    """Balancing a panel before PCA."""

    def test_complete_panel_unchanged(self):
        """Nothing to fill means an identical copy."""
        values = np.arange(12.0).reshape(6, 2)
        balanced, mask = fill_na(TimePanel.from_array(values))
        np.testing.assert_array_equal(balanced, values)
        assert mask.all()

    def test_interior_gap_on_a_line(self):
        """A natural spline through collinear points stays on the line."""
        x = 2.0 * np.arange(8) + 1.0
        x[3] = np.nan
        balanced, mask = fill_na(TimePanel.from_array(x))
        assert balanced[3, 0] == pytest.approx(7.0)
        assert not mask[3, 0]

    def test_edges_filled_and_observed_kept(self):
        """Leading and trailing gaps are filled; observed cells are untouched."""
        x = np.array([np.nan, np.nan, 1.0, 3.0, 2.0, 4.0, 5.0, np.nan])
        balanced, _ = fill_na(TimePanel.from_array(x))
        assert np.isfinite(balanced).all()
        np.testing.assert_array_equal(balanced[2:7, 0], x[2:7])

    def test_collinear_example(self):
        """[1, NA, 3, 4] fills with 2."""
        balanced, _ = fill_na(TimePanel.from_array([1.0, np.nan, 3.0, 4.0]))
        assert balanced[1, 0] == pytest.approx(2.0)

    def test_constant_leading_gap(self):
        """[NA, 5, 5, 5] fills with 5 and the MA(3) keeps it there."""
        balanced, _ = fill_na(TimePanel.from_array([np.nan, 5.0, 5.0, 5.0]))
        assert balanced[0, 0] == pytest.approx(5.0)

    def test_natural_spline_values(self):
        """Knots (0,1), (3,7), (4,10), (5,12) solved by hand: M1 = 30/31."""
        x = np.array([1.0, np.nan, np.nan, 7.0, 10.0, 12.0])
        balanced, _ = fill_na(TimePanel.from_array(x))
        np.testing.assert_allclose(
            balanced[1:3, 0], [3.0 - 40.0 / 93.0, 5.0 - 50.0 / 93.0], atol=1e-10
        )

    def test_too_few_observations(self):
        """Fewer than three observations cannot be filled."""
        x = np.array([1.0, np.nan, 2.0, np.nan, np.nan, np.nan])
        with pytest.raises(DataError, match="at least 3"):
            fill_na(TimePanel.from_array(x))


@pytest.mark.unit
class TestStandardize:
    """Column z-scores from observed cells."""

    def test_zero_mean_unit_sd(self, sim_missing):
        """Observed cells have mean 0 and sample sd 1 per column."""
        panel = sim_missing.panel
        z, scaler = standardize(panel.values, panel.mask)
        np.testing.assert_allclose(np.nanmean(z, axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(np.nanstd(z, axis=0, ddof=1), 1.0)
        np.testing.assert_array_equal(np.isnan(z), ~panel.mask)
        np.testing.assert_allclose(
            scaler.unscale(z)[panel.mask], panel.values[panel.mask]
        )

    def test_two_points(self):
        """[1, 3] has mean 2 and sd √2."""
        z, scaler = standardize(np.array([[1.0], [3.0]]), np.ones((2, 1), bool))
        np.testing.assert_allclose(z[:, 0], [-1 / np.sqrt(2), 1 / np.sqrt(2)])
        np.testing.assert_allclose(scaler.sds, [np.sqrt(2)])

    def test_gap_example(self):
        """[0, 10, NA, 20] scales to [−1, 0, NA, 1]."""
        values = np.array([[0.0], [10.0], [np.nan], [20.0]])
        z, scaler = standardize(values, ~np.isnan(values))
        np.testing.assert_allclose(z[:, 0], [-1.0, 0.0, np.nan, 1.0])
        assert scaler.means[0] == 10.0 and scaler.sds[0] == 10.0

    def test_zero_variance(self):
        """A constant column cannot be scaled."""
        values = np.array([[1.0, 2.0], [1.0, 3.0], [1.0, 5.0]])
        with pytest.raises(DataError, match="zero variance") as exc:
            standardize(values, np.ones_like(values, dtype=bool), ["flat", "ok"])
        assert exc.value.column == "flat"

    def test_single_observation(self):
        """Two observations are the minimum."""
        values = np.array([[1.0], [np.nan], [np.nan]])
        with pytest.raises(DataError):
            standardize(values, ~np.isnan(values))

    def test_identity(self):
        """The identity scaler changes nothing."""
        x = np.array([[1.0, -2.0]])
        np.testing.assert_array_equal(Standardizer.identity(2).scale(x), x)
