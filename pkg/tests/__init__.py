"""Tests for fuzzy-gifzs."""
