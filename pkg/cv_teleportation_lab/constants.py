"""Constants used across the lab."""

from pathlib import Path

from pyhere import here

# Logging constants
MB_TO_BYTES = 1024 * 1024
LOGGING_MAX_BYTES_MB = 10
LOGGING_BACKUP_COUNT = 5

# File system constants
ROOT_DIR = Path(here())
CONFIG_DIR = ROOT_DIR / "configuration"
LOGGING_DIR = ROOT_DIR / "logs"

CONFIG_FILE_PATH = CONFIG_DIR / "config.json"
LOGGING_FILE_PATH = LOGGING_DIR / "cv_teleportation_lab.log"
ENV_FILE_PATH = ROOT_DIR / ".env"

# Environment constants
TOLERANCE_ENV_VAR_NAME = "CVTL_TOL"
DEFAULT_PROFILE_NAME = "default"
STRICT_PROFILE_NAME = "strict"
STRICT_PROFILE_FACTOR = 1e-2

# Physical conventions: [x, p] = i, vacuum variance 1/2
VACUUM_VARIANCE = 0.5
PURE_STATE_DETERMINANT = 1 / 16

# Default tolerances
SYMPLECTIC_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
UNCERTAINTY_TOL = 1e-10
PURE_STATE_TOL = 1e-8
Y_REGULARITY_TOL = 1e-10
PURITY_CLAMP_TOL = 1e-12
UNIT_NORM_TOL = 1e-10
SYMMETRY_TOL = 1e-12

# Search defaults
GAIN_BOUNDS = (0.01, 10.0)
GRID_POINTS = 200
GOLDEN_TOL = 1e-8
LOCAL_OPS_STARTS = 50
SQUEEZE_BOUND = 2.0
DEFAULT_SEED = 20050101
