"""Tests for TimePanel and CSV ingest/emission."""

import numpy as np
import pandas as pd
import pytest

from sparsedfm.data.panel import (
    TimePanel,
    load_csv,
    matrix_frame,
    read_column_labels,
    read_column_spec,
    write_csv,
)
from sparsedfm.errors import DataError


@pytest.mark.unit
class TestTimePanel:
    """Construction and validation."""

    def test_from_array_defaults(self):
        """Generated names and 1-based time labels."""
        panel = TimePanel.from_array(np.arange(6.0).reshape(3, 2))
        assert panel.names == ("X1", "X2")
        assert panel.index == ("1", "2", "3")
        assert (panel.n, panel.p) == (3, 2)

    def test_mask_tracks_nan(self):
        """The mask is false exactly at NaN cells."""
        panel = TimePanel.from_array([[1.0, np.nan], [2.0, 3.0]])
        assert panel.mask.tolist() == [[True, False], [True, True]]

    def test_values_are_read_only(self):
        """Panels are immutable."""
        panel = TimePanel.from_array(np.ones((3, 2)))
        with pytest.raises(ValueError):
            panel.values[0, 0] = 5.0

    def test_rejects_infinite(self):
        """Infinite values are not missing values."""
        with pytest.raises(DataError, match="infinite"):
            TimePanel.from_array([[1.0, np.inf], [2.0, 3.0]])

    def test_rejects_duplicate_names(self):
        """Column names must be unique."""
        with pytest.raises(DataError, match="unique"):
            TimePanel.from_array(np.ones((3, 2)), names=["a", "a"])

    def test_head_and_columns(self, small_panel):
        """Row prefixes and column subsets keep their labels."""
        head = small_panel.head(3)
        assert head.n == 3
        assert head.index == ("1", "2", "3")
        sub = small_panel.columns([2, 0])
        assert sub.names == ("c", "a")
        np.testing.assert_array_equal(sub.values[:, 1], small_panel.values[:, 0])

    def test_column_index(self, small_panel):
        """Lookup by name, DataError for unknown names."""
        assert small_panel.column_index("b") == 1
        with pytest.raises(DataError):
            small_panel.column_index("z")


@pytest.mark.unit
class TestLoadCsv:
    """CSV parsing."""

    def test_missing_tokens(self, csv_file):
        """NA and empty cells become missing."""
        path = csv_file("x,y\n1,NA\n,2.5\n3,4\n")
        panel = load_csv(path)
        assert panel.names == ("x", "y")
        assert np.isnan(panel.values[0, 1])
        assert np.isnan(panel.values[1, 0])
        assert panel.values[2].tolist() == [3.0, 4.0]

    def test_index_column(self, csv_file):
        """With has_index the first column holds the labels."""
        path = csv_file("time,x\n2020-01,1\n2020-02,2\n")
        panel = load_csv(path, has_index=True)
        assert panel.index == ("2020-01", "2020-02")
        assert panel.names == ("x",)

    def test_file_not_found(self, tmp_path):
        """A missing file is a DataError naming the file."""
        with pytest.raises(DataError, match="not found"):
            load_csv(tmp_path / "nope.csv")

    def test_bad_number_reports_position(self, csv_file):
        """The offending row and column are reported."""
        path = csv_file("x,y\n1,2\n3,abc\n")
        with pytest.raises(DataError) as exc:
            load_csv(path)
        assert exc.value.row == 3
        assert exc.value.column == "y"

    def test_long_row(self, csv_file):
        """Rows longer than the header are rejected."""
        path = csv_file("x,y\n1,2\n3,4,5\n")
        with pytest.raises(DataError):
            load_csv(path)

    def test_duplicate_header(self, csv_file):
        """Duplicate column names are rejected."""
        path = csv_file("x,x\n1,2\n3,4\n")
        with pytest.raises(DataError, match="duplicate"):
            load_csv(path)


@pytest.mark.unit
class TestWriteCsv:
    """CSV emission."""

    def test_reparses_exactly(self, tmp_path, small_panel):
        """Full precision and NA survive a write and a read."""
        values = np.array(small_panel.values)
        values[0, 2] = 1.0 / 3.0
        panel = small_panel.with_values(values)
        path = write_csv(panel, tmp_path / "out.csv", index=True)
        back = load_csv(path, has_index=True)
        np.testing.assert_array_equal(back.mask, panel.mask)
        np.testing.assert_array_equal(
            back.values[panel.mask], panel.values[panel.mask]
        )
        assert "NA" in path.read_text()

    def test_matrix_frame(self, tmp_path):
        """Plain matrices get the requested headers."""
        frame = matrix_frame(np.eye(2), ["F1", "F2"])
        path = write_csv(frame, tmp_path / "m.csv")
        assert path.read_text().splitlines()[0] == "F1,F2"
        assert isinstance(frame, pd.DataFrame)


@pytest.mark.unit
class TestReadColumnSpec:
    """Per-column integer files (lags, transform codes)."""

    def test_reads_in_name_order(self, csv_file):
        """Values follow the requested order, not the file order."""
        path = csv_file("b,a\n2,1\n", "lags.csv")
        assert read_column_spec(path, ["a", "b"]) == [1, 2]

    def test_missing_column(self, csv_file):
        """A column without an entry is a DataError."""
        path = csv_file("a\n1\n", "lags.csv")
        with pytest.raises(DataError, match="no lags entry"):
            read_column_spec(path, ["a", "b"], what="lags")

    def test_non_integer(self, csv_file):
        """Cells must be integers."""
        path = csv_file("a\n1.5\n", "codes.csv")
        with pytest.raises(DataError, match="not an integer"):
            read_column_spec(path, ["a"])

    def test_extra_rows(self, csv_file):
        """Exactly one value row is allowed."""
        path = csv_file("a\n1\n2\n", "codes.csv")
        with pytest.raises(DataError, match="exactly one"):
            read_column_spec(path, ["a"])


@pytest.mark.unit
class TestReadColumnLabels:
    """Per-column text files (loading plot groups)."""

    def test_reads_in_name_order(self, csv_file):
        """Labels follow the requested order and are stripped."""
        path = csv_file("b,a\n trade ,prices\n", "groups.csv")
        assert read_column_labels(path, ["a", "b"]) == ["prices", "trade"]

    def test_blank_label(self, csv_file):
        """Every column needs a label."""
        path = csv_file("a,b\nprices,\n", "groups.csv")
        with pytest.raises(DataError, match="blank groups entry"):
            read_column_labels(path, ["a", "b"])

    def test_missing_column(self, csv_file):
        """A column without an entry is a DataError."""
        path = csv_file("a\nprices\n", "groups.csv")
        with pytest.raises(DataError, match="no group entry"):
            read_column_labels(path, ["a", "b"], what="group")
