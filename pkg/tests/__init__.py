"""Tests for sparsedfm."""
