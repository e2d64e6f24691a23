"""Shared fixtures for data module tests."""

import pytest


@pytest.fixture
def csv_file(tmp_path):
    """Write CSV text to a temporary file and return its path."""

    def _write(text, name="panel.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
