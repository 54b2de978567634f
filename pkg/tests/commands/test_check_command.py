"""Unit tests for the cv_teleportation_lab.commands.check_command module."""

import os
from collections.abc import Generator
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from cv_teleportation_lab.constants import STRICT_PROFILE_FACTOR, TOLERANCE_ENV_VAR_NAME
from cv_teleportation_lab.invariants import REGISTRY
from cv_teleportation_lab.lab import TeleportationLab
from cv_teleportation_lab.models import ExitCode, InvariantResult, LabConfig


@pytest.fixture
def mock_run_invariants() -> Generator[MagicMock]:
    """Replace the invariant runner with a single passing result."""
    result = InvariantResult(identifier="metrics.classical_bound", module="metrics", passed=True)
    with patch("cv_teleportation_lab.commands.check_command.run_invariants", return_value=[result]) as mock_run:
        yield mock_run


@pytest.fixture
def mock_clean_env() -> Generator[None]:
    """Remove the tolerance profile variable from the environment."""
    with patch.dict(os.environ, clear=False):
        os.environ.pop(TOLERANCE_ENV_VAR_NAME, None)
        yield


class TestCheckCommand:
    """Unit tests for the CheckCommand class."""

    def test_passing(
        self,
        mock_lab: TeleportationLab,
        mock_lab_config: LabConfig,
        mock_run_invariants: MagicMock,
        mock_clean_env: None,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        """Test that passing invariants give OK and a summary line."""
        exit_code = mock_lab.run(["check"])

        tolerances, search = mock_run_invariants.call_args.args
        assert exit_code == ExitCode.OK
        assert "1 passed, 0 failed" in capsys.readouterr().out
        assert tolerances == mock_lab_config.tolerances
        assert search == mock_lab_config.search

    def test_strict_profile(
        self, mock_lab: TeleportationLab, mock_lab_config: LabConfig, mock_run_invariants: MagicMock
    ) -> None:
        """Test that the strict profile scales every tolerance down."""
        mock_lab.run(["check", "--profile", "strict"])

        tolerances, _ = mock_run_invariants.call_args.args
        assert tolerances.symplectic == pytest.approx(mock_lab_config.tolerances.symplectic * STRICT_PROFILE_FACTOR)

    def test_profile_from_environment(
        self, mock_lab: TeleportationLab, mock_lab_config: LabConfig, mock_run_invariants: MagicMock
    ) -> None:
        """Test that the environment selects the profile when no flag is given."""
        with patch.dict(os.environ, {TOLERANCE_ENV_VAR_NAME: "strict"}):
            mock_lab.run(["check"])

        tolerances, _ = mock_run_invariants.call_args.args
        assert tolerances.pure_state == pytest.approx(mock_lab_config.tolerances.pure_state * STRICT_PROFILE_FACTOR)

    def test_flag_overrides_environment(
        self, mock_lab: TeleportationLab, mock_lab_config: LabConfig, mock_run_invariants: MagicMock
    ) -> None:
        """Test that the flag wins over the environment."""
        with patch.dict(os.environ, {TOLERANCE_ENV_VAR_NAME: "strict"}):
            mock_lab.run(["check", "--profile", "default"])

        tolerances, _ = mock_run_invariants.call_args.args
        assert tolerances == mock_lab_config.tolerances

    def test_unknown_profile_in_environment(self, mock_lab: TeleportationLab, mock_run_invariants: MagicMock) -> None:
        """Test that an unknown profile name is a usage error."""
        with patch.dict(os.environ, {TOLERANCE_ENV_VAR_NAME: "loose"}):
            assert mock_lab.run(["check"]) == ExitCode.USAGE_ERROR
        mock_run_invariants.assert_not_called()

    def test_seed_override(self, mock_lab: TeleportationLab, mock_run_invariants: MagicMock) -> None:
        """Test that the seed flag reaches the random generators."""
        mock_lab.run(["check", "--profile", "default", "--seed", "11"])

        _, search = mock_run_invariants.call_args.args
        assert search.seed == 11  # noqa: PLR2004

    def test_fault_injection(self, mock_lab: TeleportationLab, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a broken constructor makes the check fail."""
        subset = [entry for entry in REGISTRY if entry.identifier == "symplectic_core.constructors_symplectic"]
        with (
            patch("cv_teleportation_lab.invariants.REGISTRY", subset),
            patch("cv_teleportation_lab.invariants.make_qnd", return_value=2 * np.eye(4)),
        ):
            exit_code = mock_lab.run(["check", "--profile", "default"])

        assert exit_code == ExitCode.NUMERIC_FAILURE
        assert "0 passed, 1 failed" in capsys.readouterr().out
