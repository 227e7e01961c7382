"""
Unit tests for validation utilities.
"""

import math

from tvglasso.utils.validators import (
    validate_penalty_grid,
    validate_square,
    validate_strictly_increasing,
    validate_time_grid,
)


class TestStrictlyIncreasing:
    """Tests for strictly increasing sequences."""

    def test_valid(self):
        """Test increasing sequences of sufficient length."""
        assert validate_strictly_increasing([1, 2, 5]) is True
        assert validate_strictly_increasing([3]) is True

    def test_repeated_value(self):
        """Test that a repeated value fails."""
        assert validate_strictly_increasing([1, 2, 2]) is False

    def test_min_length(self):
        """Test the minimum length requirement."""
        assert validate_strictly_increasing([4], min_length=2) is False
        assert validate_strictly_increasing([], min_length=1) is False


class TestTimeGrid:
    """Tests for time-grid validation."""

    def test_valid(self):
        """Test an increasing grid inside [0, 1]."""
        assert validate_time_grid([0.0, 0.25, 1.0]) is True

    def test_outside_unit_interval(self):
        """Test stamps below 0 or above 1."""
        assert validate_time_grid([-0.1, 0.5]) is False
        assert validate_time_grid([0.5, 1.01]) is False

    def test_not_increasing(self):
        """Test a decreasing grid."""
        assert validate_time_grid([0.5, 0.4]) is False

    def test_non_finite(self):
        """Test NaN stamps."""
        assert validate_time_grid([0.0, math.nan]) is False


class TestSquare:
    """Tests for nested-list matrix validation."""

    def test_valid(self):
        """Test a square matrix with and without a required size."""
        assert validate_square([[1.0, 0.0], [0.0, 1.0]]) is True
        assert validate_square([[1.0, 0.0], [0.0, 1.0]], dim=2) is True

    def test_wrong_size(self):
        """Test a size mismatch against the required dimension."""
        assert validate_square([[1.0]], dim=2) is False

    def test_ragged_or_empty(self):
        """Test ragged rows and an empty matrix."""
        assert validate_square([[1.0, 0.0], [0.0]]) is False
        assert validate_square([]) is False


class TestPenaltyGrid:
    """Tests for λ-grid validation."""

    def test_valid_any_order(self):
        """Test positive distinct values in any order."""
        assert validate_penalty_grid([0.1, 0.5, 0.2]) is True

    def test_invalid(self):
        """Test empty, non-positive, non-finite and repeated grids."""
        assert validate_penalty_grid([]) is False
        assert validate_penalty_grid([0.1, 0.0]) is False
        assert validate_penalty_grid([0.1, math.inf]) is False
        assert validate_penalty_grid([0.1, 0.1]) is False
