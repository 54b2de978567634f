"""Unit tests for the cv_teleportation_lab.invariants module."""

from unittest.mock import patch

import numpy as np
import pytest

from cv_teleportation_lab import invariants
from cv_teleportation_lab.exceptions import InvalidStateError
from cv_teleportation_lab.invariants import REGISTRY, CheckContext, Invariant, invariant, run_invariants
from cv_teleportation_lab.models import LabConfig, SearchConfigModel, ToleranceConfigModel

MODULES = {"symplectic_core", "protocol_engine", "metrics", "optimize"}


def _raise_invalid_state(context: CheckContext) -> list[str]:
    msg = "det V < 0"
    raise InvalidStateError(msg)


class TestRegistry:
    """Unit tests for the invariant registry."""

    def test_identifiers(self) -> None:
        """Test that identifiers are unique and name their module."""
        identifiers = [entry.identifier for entry in REGISTRY]
        assert len(identifiers) == len(set(identifiers))
        assert {entry.module for entry in REGISTRY} == MODULES

    def test_module(self) -> None:
        """Test the module part of an identifier."""
        assert Invariant("metrics.classical_bound", _raise_invalid_state).module == "metrics"

    def test_duplicate_identifier(self) -> None:
        """Test that an identifier cannot be registered twice."""
        with pytest.raises(ValueError, match="already registered"):
            invariant(REGISTRY[0].identifier)(_raise_invalid_state)

    @pytest.mark.parametrize("entry", REGISTRY, ids=[entry.identifier for entry in REGISTRY])
    def test_invariant_holds(self, mock_check_context: CheckContext, entry: Invariant) -> None:
        """Test that every registered invariant holds."""
        assert entry.check(mock_check_context) == []


class TestRunInvariants:
    """Unit tests for the run_invariants function."""

    def test_results_follow_registry(
        self, mock_tolerance_config: ToleranceConfigModel, mock_search_config: SearchConfigModel
    ) -> None:
        """Test one passing result per registered invariant, in order."""
        subset = [entry for entry in REGISTRY if entry.module == "symplectic_core"]
        with patch.object(invariants, "REGISTRY", subset):
            results = run_invariants(mock_tolerance_config, mock_search_config)

        assert [result.identifier for result in results] == [entry.identifier for entry in subset]
        assert all(result.passed for result in results)
        assert all(result.module == "symplectic_core" for result in results)

    def test_failure_detail_is_truncated(self) -> None:
        """Test that only the first failures are listed in full."""
        failures = [f"failure {index}" for index in range(8)]
        with patch.object(invariants, "REGISTRY", [Invariant("metrics.fake", lambda context: failures)]):
            (result,) = run_invariants()

        assert not result.passed
        assert result.detail.startswith("failure 0; failure 1")
        assert result.detail.endswith("; 3 more")

    def test_lab_error_counts_as_failure(self) -> None:
        """Test that a check raising a lab error is reported as failed."""
        with patch.object(invariants, "REGISTRY", [Invariant("metrics.raises", _raise_invalid_state)]):
            (result,) = run_invariants()

        assert not result.passed
        assert result.detail == "InvalidStateError: det V < 0"

    def test_fault_injection(
        self, mock_tolerance_config: ToleranceConfigModel, mock_search_config: SearchConfigModel
    ) -> None:
        """Test that a broken constructor is caught by its invariant."""
        subset = [entry for entry in REGISTRY if entry.identifier == "symplectic_core.constructors_symplectic"]
        with (
            patch.object(invariants, "REGISTRY", subset),
            patch("cv_teleportation_lab.invariants.make_qnd", return_value=2 * np.eye(4)),
        ):
            (result,) = run_invariants(mock_tolerance_config, mock_search_config)

        assert not result.passed
        assert "QND(0.5)" in result.detail

    def test_local_invariance_catches_non_symplectic_locals(
        self, mock_tolerance_config: ToleranceConfigModel, mock_search_config: SearchConfigModel
    ) -> None:
        """Test that local transforms which are not symplectic fail the standard-form invariant."""
        subset = [entry for entry in REGISTRY if entry.identifier == "symplectic_core.standard_form_local_invariance"]
        with (
            patch.object(invariants, "REGISTRY", subset),
            patch("cv_teleportation_lab.invariants.random_symplectic_2x2", return_value=2 * np.eye(2)),
        ):
            (result,) = run_invariants(mock_tolerance_config, mock_search_config)

        assert not result.passed
        assert "UnsupportedStateError" in result.detail


class TestFullScale:
    """Runs of the whole suite with the shipped search settings."""

    def test_default_settings(self) -> None:
        """Test that every invariant holds with the default tolerances and full-size searches."""
        config = LabConfig()
        results = run_invariants(config.profile("default"), config.search)

        assert len(results) == len(REGISTRY)
        assert [result.identifier for result in results if not result.passed] == []

    def test_strict_profile(self) -> None:
        """Test that every invariant holds under the strict profile with full-size searches."""
        config = LabConfig()
        results = run_invariants(config.profile("strict"), config.search)

        assert [(result.identifier, result.detail) for result in results if not result.passed] == []
