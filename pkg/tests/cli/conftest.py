"""Shared fixtures for CLI tests."""

import pytest
from click.testing import CliRunner

from sparsedfm.cli.main import cli


@pytest.fixture
def runner(temp_home_dir):
    """Create a CLI runner with an isolated home directory."""
    return CliRunner()


@pytest.fixture
def simulated(runner, tmp_path):
    """A simulated 60×10 panel written by the simulate command."""
    outdir = tmp_path / "sim"
    result = runner.invoke(
        cli,
        ["simulate", "-o", str(outdir), "--n", "60", "--p", "10", "--seed", "4"],
    )
    assert result.exit_code == 0, result.output
    return outdir
