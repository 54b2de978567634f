"""Unit tests for the cv_teleportation_lab.golden module."""

from unittest.mock import patch

import pytest

from cv_teleportation_lab.golden import build_golden_table, quoted_tolerance
from cv_teleportation_lab.models import GoldenRow, LabConfig


@pytest.fixture
def mock_golden_rows(mock_lab_config: LabConfig) -> list[GoldenRow]:
    """Provide the golden table computed with the mock configuration."""
    return build_golden_table(mock_lab_config)


class TestQuotedTolerance:
    """Unit tests for the quoted_tolerance function."""

    @pytest.mark.parametrize(
        ("quoted", "expected"),
        [("1.32", 5e-2), ("1.4", 5e-1), ("0.548", 5e-3), ("2", 5.0)],
    )
    def test_quoted_tolerance(self, quoted: str, expected: float) -> None:
        """Test five units in the last quoted digit."""
        assert quoted_tolerance(quoted) == pytest.approx(expected)


class TestBuildGoldenTable:
    """Unit tests for the build_golden_table function."""

    def test_every_row_passes(self, mock_golden_rows: list[GoldenRow]) -> None:
        """Test that every published value is reproduced."""
        failed = [(row.quantity, row.computed, row.expected) for row in mock_golden_rows if not row.passed]
        assert failed == []

    def test_rows(self, mock_golden_rows: list[GoldenRow]) -> None:
        """Test that every published value has exactly one row."""
        quantities = [row.quantity for row in mock_golden_rows]
        assert len(quantities) == len(set(quantities))
        assert "V_min(g=2.5)" in quantities
        assert "F(g=1, g'=4/3)" in quantities
        assert "N_min(g=1)" in quantities

    def test_quoted_rows_use_quoted_tolerance(self, mock_golden_rows: list[GoldenRow]) -> None:
        """Test that approximate values are compared at their quoted precision."""
        rows = {row.quantity: row for row in mock_golden_rows}
        assert rows["T_V_min(g=2.5, g'=1)"].quoted_value == "~ 1.32"
        assert rows["T_V_min(g=2.5, g'=1)"].tolerance == pytest.approx(5e-2)
        assert rows["V_min(g=2.5)"].tolerance == pytest.approx(1e-9)

    @pytest.mark.parametrize(
        "quantity", ["T_V_min(g=2.5, g'=1)", "T_V_min,opt(g=2.5)", "T_max(g=2.5, g'=1)", "T_max,opt(g=2.5)"]
    )
    def test_quoted_rows_have_closed_forms(self, mock_golden_rows: list[GoldenRow], quantity: str) -> None:
        """Test that every coarse quote of T is paired with a closed-form row."""
        rows = {row.quantity: row for row in mock_golden_rows}
        assert rows[f"{quantity} closed form"].tolerance == pytest.approx(1e-9)
        assert rows[f"{quantity} closed form"].computed == pytest.approx(rows[quantity].computed)

    def test_closed_form_catches_value_inside_quote(self, mock_lab_config: LabConfig) -> None:
        """Test that a transfer inside the coarse quoted interval still fails its closed form."""
        with patch("cv_teleportation_lab.golden._transfer", return_value=1.0):
            rows = {row.quantity: row for row in build_golden_table(mock_lab_config)}

        assert rows["T_V_min,opt(g=2.5)"].passed
        assert not rows["T_V_min,opt(g=2.5) closed form"].passed

    def test_defaults(self) -> None:
        """Test that the table builds with the default configuration."""
        assert all(row.passed for row in build_golden_table())
