"""Unit tests for the cv_teleportation_lab.main module."""

from collections.abc import Generator
from unittest.mock import MagicMock, patch

import pytest

from cv_teleportation_lab.main import run
from cv_teleportation_lab.models import ExitCode


@pytest.fixture
def mock_lab_class() -> Generator[MagicMock]:
    """Mock TeleportationLab class."""
    with patch("cv_teleportation_lab.main.TeleportationLab") as mock_lab:
        yield mock_lab


class TestRun:
    """Unit tests for the run function."""

    @pytest.mark.parametrize("exit_code", [ExitCode.OK, ExitCode.NUMERIC_FAILURE, ExitCode.USAGE_ERROR])
    def test_run(self, mock_lab_class: MagicMock, exit_code: ExitCode) -> None:
        """Test that the process exits with the code of the command."""
        mock_lab_class.return_value.run.return_value = exit_code

        with pytest.raises(SystemExit) as exc_info:
            run()

        mock_lab_class.return_value.run.assert_called_once_with()
        assert exc_info.value.code == exit_code
