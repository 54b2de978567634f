"""Pytest fixtures for the lab's unit tests."""

from collections.abc import Generator
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from cv_teleportation_lab.invariants import CheckContext
from cv_teleportation_lab.lab import TeleportationLab
from cv_teleportation_lab.models import (
    LabConfig,
    OutputConfigModel,
    ProtocolConfig,
    QNDBell,
    SearchConfigModel,
    SweepSpec,
    ToleranceConfigModel,
)


# General fixtures
@pytest.fixture
def mock_exists() -> Generator[MagicMock]:
    """Mock the Path.exists() method."""
    with patch("pathlib.Path.exists") as mock_exists:
        yield mock_exists


@pytest.fixture
def mock_read_text() -> Generator[MagicMock]:
    """Mock the Path.read_text() method."""
    with patch("pathlib.Path.read_text") as mock_read:
        yield mock_read


@pytest.fixture
def mock_tmp_config_path(tmp_path: Path) -> Path:
    """Provide a temporary config file path."""
    return tmp_path / "config.json"


# Lab Configuration Models
@pytest.fixture
def mock_tolerance_config_dict() -> dict:
    """Provide a mock tolerance configuration dictionary."""
    return {
        "symplectic": 1e-12,
        "reconstruction": 1e-10,
        "uncertainty": 1e-10,
        "pure_state": 1e-8,
        "y_regularity": 1e-10,
        "closed_form": 1e-9,
        "pipeline": 1e-10,
        "equivalence": 1e-12,
        "oracle_parameter": 1e-4,
        "oracle_objective": 1e-6,
        "oracle_local_ops": 1e-5,
        "stationarity": 1e-6,
        "hessian": 1e-4,
        "tms_minimality": 1e-9,
    }


@pytest.fixture
def mock_search_config_dict() -> dict:
    """Provide a mock search configuration dictionary with small grids and few trials."""
    return {
        "gain_bounds": (0.01, 10.0),
        "grid_points": 60,
        "g_prime_bounds": (0.01, 10.0),
        "golden_tol": 1e-8,
        "local_ops_starts": 8,
        "squeeze_bound": 2.0,
        "seed": 20050101,
        "random_trials": 40,
        "finite_difference_step": 1e-5,
    }


@pytest.fixture
def mock_output_config_dict() -> dict:
    """Provide a mock output configuration dictionary."""
    return {
        "json_indent": 2,
        "table_digits": 9,
    }


@pytest.fixture
def mock_tolerance_config(mock_tolerance_config_dict: dict) -> ToleranceConfigModel:
    """Provide a mock ToleranceConfigModel instance."""
    return ToleranceConfigModel.model_validate(mock_tolerance_config_dict)


@pytest.fixture
def mock_search_config(mock_search_config_dict: dict) -> SearchConfigModel:
    """Provide a mock SearchConfigModel instance."""
    return SearchConfigModel.model_validate(mock_search_config_dict)


@pytest.fixture
def mock_output_config(mock_output_config_dict: dict) -> OutputConfigModel:
    """Provide a mock OutputConfigModel instance."""
    return OutputConfigModel.model_validate(mock_output_config_dict)


@pytest.fixture
def mock_lab_config(
    mock_tolerance_config: ToleranceConfigModel,
    mock_search_config: SearchConfigModel,
    mock_output_config: OutputConfigModel,
) -> LabConfig:
    """Provide a mock LabConfig instance."""
    return LabConfig(tolerances=mock_tolerance_config, search=mock_search_config, output=mock_output_config)


@pytest.fixture
def mock_check_context(
    mock_tolerance_config: ToleranceConfigModel, mock_search_config: SearchConfigModel
) -> CheckContext:
    """Provide a mock CheckContext for invariant checks."""
    return CheckContext(tolerances=mock_tolerance_config, search=mock_search_config)


# Protocol Models
@pytest.fixture
def mock_protocol_config() -> ProtocolConfig:
    """Provide a unity-gain QND configuration at g = 1, g' = 4/3."""
    return ProtocolConfig(g=1.0, bell=QNDBell(g_prime=4 / 3))


@pytest.fixture
def mock_sweep_spec() -> SweepSpec:
    """Provide a mock SweepSpec over g = 1 and g' in {1, 4/3}."""
    return SweepSpec(g_values=[1.0], g_prime_values=[1.0, 4 / 3])


# Lab fixtures
@pytest.fixture
def mock_lab(mock_lab_config: LabConfig, mock_tmp_config_path: Path) -> TeleportationLab:
    """Provide a TeleportationLab running with the mock configuration."""
    return TeleportationLab(config_filepath=mock_tmp_config_path, config=mock_lab_config)
