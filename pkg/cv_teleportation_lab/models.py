"""Pydantic models for the lab."""

import json
import math
from enum import IntEnum, StrEnum
from pathlib import Path
from typing import Annotated, Any, ClassVar, Literal, Self

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    computed_field,
    field_validator,
    model_validator,
)

from cv_teleportation_lab.constants import (
    DEFAULT_PROFILE_NAME,
    DEFAULT_SEED,
    GAIN_BOUNDS,
    GOLDEN_TOL,
    GRID_POINTS,
    LOCAL_OPS_STARTS,
    PURE_STATE_TOL,
    RECONSTRUCTION_TOL,
    SQUEEZE_BOUND,
    STRICT_PROFILE_FACTOR,
    STRICT_PROFILE_NAME,
    SYMPLECTIC_TOL,
    UNCERTAINTY_TOL,
    UNIT_NORM_TOL,
    Y_REGULARITY_TOL,
)


def _as_float_matrix(value: Any) -> npt.NDArray[np.float64]:  # noqa: ANN401
    """Coerce nested sequences into a read-only 2-D float array.

    :param Any value: Nested sequence or array
    :return NDArray: Read-only float64 matrix
    :raise ValueError: If the value is not a finite 2-D matrix
    """
    array = np.array(value, dtype=np.float64)
    if array.ndim != 2:  # noqa: PLR2004
        msg = f"Expected a 2-D matrix, got shape {array.shape}."
        raise ValueError(msg)
    if not np.all(np.isfinite(array)):
        msg = "Matrix entries must be finite."
        raise ValueError(msg)
    array.setflags(write=False)
    return array


FloatMatrix = Annotated[
    npt.NDArray[np.float64],
    PlainValidator(_as_float_matrix),
    PlainSerializer(lambda array: array.tolist(), return_type=list),
]


def _identity_2() -> npt.NDArray[np.float64]:
    return _as_float_matrix(np.eye(2))


def _require_shape(matrix: npt.NDArray[np.float64], shape: tuple[int, int], name: str) -> None:
    if matrix.shape != shape:
        msg = f"{name} must have shape {shape}, got {matrix.shape}."
        raise ValueError(msg)


class ExitCode(IntEnum):
    """Process exit codes for the command line."""

    OK = 0
    NUMERIC_FAILURE = 1
    USAGE_ERROR = 2


# Lab Configuration Models
class ToleranceConfigModel(BaseModel):
    """Numerical tolerances used by checks and validators."""

    symplectic: float = Field(default=SYMPLECTIC_TOL, gt=0, description="Entrywise symplectic-condition tolerance")
    reconstruction: float = Field(
        default=RECONSTRUCTION_TOL, gt=0, description="Bloch-Messiah reconstruction tolerance"
    )
    uncertainty: float = Field(
        default=UNCERTAINTY_TOL, gt=0, description="Allowed negative eigenvalue of V + (i/2)Omega"
    )
    pure_state: float = Field(default=PURE_STATE_TOL, gt=0, description="Tolerance on det V = 1/16 for pure states")
    y_regularity: float = Field(default=Y_REGULARITY_TOL, gt=0, description="Relative determinant floor for Y")
    closed_form: float = Field(default=1e-9, gt=0, description="Tolerance for exact closed-form golden values")
    pipeline: float = Field(default=1e-10, gt=0, description="Scalar vs matrix pipeline agreement")
    equivalence: float = Field(default=1e-12, gt=0, description="Beam splitter vs QND noise-matrix agreement")
    oracle_parameter: float = Field(default=1e-4, gt=0, description="Closed-form vs oracle parameter residual")
    oracle_objective: float = Field(default=1e-6, gt=0, description="Closed-form vs oracle objective residual")
    oracle_local_ops: float = Field(default=1e-5, gt=0, description="Local-operations oracle vs e^(-2 kappa)")
    stationarity: float = Field(default=1e-6, gt=0, description="Finite-difference gradient bound at optima")
    hessian: float = Field(default=1e-4, gt=0, description="Finite-difference vs analytic Hessian agreement")
    tms_minimality: float = Field(default=1e-9, gt=0, description="Slack on the TMS minimality bound")

    # Finite-difference bounds, limited by the truncation error of the step
    UNSCALED_FIELDS: ClassVar[frozenset[str]] = frozenset({"stationarity", "hessian"})

    def scaled(self, factor: float) -> Self:
        """Return a copy with every tolerance multiplied by a factor.

        The finite-difference bounds in UNSCALED_FIELDS keep their values.

        :param float factor: Positive scale factor
        :return ToleranceConfigModel: The scaled tolerances
        """
        updates = {
            name: value * factor for name, value in self.model_dump().items() if name not in self.UNSCALED_FIELDS
        }
        return self.model_copy(update=updates)


class SearchConfigModel(BaseModel):
    """Settings of the numeric oracles."""

    gain_bounds: tuple[float, float] = Field(default=GAIN_BOUNDS, description="Log-spaced gain search interval")
    grid_points: int = Field(default=GRID_POINTS, ge=3, description="Grid points per gain axis")
    g_prime_bounds: tuple[float, float] = Field(default=GAIN_BOUNDS, description="Bell asymmetry search interval")
    golden_tol: float = Field(default=GOLDEN_TOL, gt=0, description="Golden-section relative tolerance")
    local_ops_starts: int = Field(default=LOCAL_OPS_STARTS, ge=1, description="Random starts of the 6-D search")
    squeeze_bound: float = Field(default=SQUEEZE_BOUND, gt=0, description="Squeezing range of random starts")
    seed: int = Field(default=DEFAULT_SEED, ge=0, description="Seed of every random generator")
    random_trials: int = Field(default=1000, ge=1, description="Randomized round trips per property check")
    finite_difference_step: float = Field(default=1e-5, gt=0, description="Central-difference step")

    @field_validator("gain_bounds", "g_prime_bounds")
    @classmethod
    def _check_bounds(cls, bounds: tuple[float, float]) -> tuple[float, float]:
        lower, upper = bounds
        if not 0 < lower < upper:
            msg = f"Search bounds must satisfy 0 < lower < upper, got {bounds}."
            raise ValueError(msg)
        return bounds


class OutputConfigModel(BaseModel):
    """Rendering options for command output."""

    json_indent: int | None = Field(default=2, description="JSON indentation (None for compact)")
    table_digits: int = Field(default=9, ge=1, description="Significant digits in human-readable tables")


class LabConfig(BaseModel):
    """Lab configuration."""

    tolerances: ToleranceConfigModel = Field(default_factory=ToleranceConfigModel)
    search: SearchConfigModel = Field(default_factory=SearchConfigModel)
    output: OutputConfigModel = Field(default_factory=OutputConfigModel)

    def profile(self, name: str) -> ToleranceConfigModel:
        """Resolve a named tolerance profile.

        :param str name: Either "default" or "strict"
        :return ToleranceConfigModel: The tolerances of the profile
        :raise ValueError: If the profile name is unknown
        """
        if name == DEFAULT_PROFILE_NAME:
            return self.tolerances
        if name == STRICT_PROFILE_NAME:
            return self.tolerances.scaled(STRICT_PROFILE_FACTOR)
        msg = f"Unknown tolerance profile: {name}"
        raise ValueError(msg)

    def save_to_file(self, filepath: Path) -> None:
        """Save the configuration to a JSON file.

        :param Path filepath: Path to the configuration file
        """
        filepath.parent.mkdir(parents=True, exist_ok=True)
        filepath.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")


# Symplectic Models
class BlochMessiahFactors(BaseModel):
    """Factors of S = P(alpha) S(r) P(beta) with r >= 0."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., description="Output phase shift in radians")
    r: float = Field(..., ge=0, description="Squeezing parameter")
    beta: float = Field(..., description="Input phase shift in radians")


class StandardFormResult(BaseModel):
    """Local reduction of a pure two-mode covariance matrix to the two-mode squeezed vacuum pattern."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m_a: FloatMatrix = Field(..., description="Local symplectic on mode A")
    m_b: FloatMatrix = Field(..., description="Local symplectic on mode B")
    v_tms: FloatMatrix = Field(..., description="Covariance matrix in standard form")
    a: float = Field(..., ge=0.5 - PURE_STATE_TOL, description="sqrt(det A)")
    c: float = Field(..., ge=0, description="sqrt(|det C|)")
    kappa: float = Field(..., ge=0, description="Two-mode squeezing parameter")


# Protocol Models
class QNDBell(BaseModel):
    """Bell measurement through a QND interaction with constant g'."""

    kind: Literal["qnd"] = "qnd"
    g_prime: float = Field(..., gt=0, description="Interaction constant of the Bell-stage QND coupling")


class BeamSplitterBell(BaseModel):
    """Bell measurement through an unbalanced beam splitter."""

    kind: Literal["bs"] = "bs"
    transmissivity: float = Field(..., gt=0, lt=1, description="Amplitude transmissivity T")
    reflectivity: float = Field(..., gt=0, lt=1, description="Amplitude reflectivity R")

    @model_validator(mode="after")
    def _check_unit_norm(self) -> Self:
        if abs(self.transmissivity**2 + self.reflectivity**2 - 1) > UNIT_NORM_TOL:
            msg = "Beam splitter amplitudes must satisfy T^2 + R^2 = 1."
            raise ValueError(msg)
        return self

    @property
    def ratio(self) -> float:
        """Asymmetry ratio R/T, the equivalent QND constant g'."""
        return self.reflectivity / self.transmissivity


class MatrixBell(BaseModel):
    """Bell measurement through an arbitrary two-mode symplectic interaction."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["matrix"] = "matrix"
    matrix: FloatMatrix = Field(..., description="4x4 interaction matrix in (x_A, p_A, x_in, p_in) ordering")

    @field_validator("matrix")
    @classmethod
    def _check_shape(cls, matrix: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        _require_shape(matrix, (4, 4), "Bell interaction matrix")
        return matrix


BellInteraction = Annotated[QNDBell | BeamSplitterBell | MatrixBell, Field(discriminator="kind")]


class UnityGain(BaseModel):
    """Unity gain: the gain matrix is the inverse of Y."""

    kind: Literal["unity"] = "unity"


class ScalarGain(BaseModel):
    """Normalized scalar gains G_x and G_p."""

    kind: Literal["scalar"] = "scalar"
    g_x: float = Field(..., description="Normalized position gain")
    g_p: float = Field(..., description="Normalized momentum gain")


class MatrixGain(BaseModel):
    """Raw 2x2 gain matrix applied to the measured quadratures."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["matrix"] = "matrix"
    matrix: FloatMatrix = Field(..., description="Unnormalized gain matrix")

    @field_validator("matrix")
    @classmethod
    def _check_shape(cls, matrix: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        _require_shape(matrix, (2, 2), "Gain matrix")
        return matrix


GainPolicy = Annotated[UnityGain | ScalarGain | MatrixGain, Field(discriminator="kind")]


class ProtocolConfig(BaseModel):
    """One teleportation run: shared QND state, Bell interaction, local operations and gains."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    g: float = Field(..., ge=0, description="Entangling interaction constant kappa*t")
    bell: BellInteraction = Field(..., description="Bell-measurement interaction")
    s_a: FloatMatrix = Field(default_factory=_identity_2, description="Alice's local symplectic")
    s_b: FloatMatrix = Field(default_factory=_identity_2, description="Bob's local symplectic")
    gains: GainPolicy = Field(default_factory=UnityGain, description="Feed-forward gain policy")

    @field_validator("s_a", "s_b")
    @classmethod
    def _check_local_shape(cls, matrix: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        _require_shape(matrix, (2, 2), "Local operation")
        return matrix

    @classmethod
    def load(cls, filepath: Path) -> Self:
        """Load a protocol configuration from a JSON document.

        :param Path filepath: Path to the JSON document
        :return ProtocolConfig: The validated configuration
        """
        return cls.model_validate(json.loads(filepath.read_text(encoding="utf-8")))

    @property
    def g_prime(self) -> float | None:
        """Equivalent QND constant of the Bell interaction, if it has one."""
        match self.bell:
            case QNDBell(g_prime=g_prime):
                return g_prime
            case BeamSplitterBell():
                return self.bell.ratio
            case _:
                return None


# Report Models
class MetricsReport(BaseModel):
    """Figures of merit of one configuration."""

    conditional_variance: float = Field(..., ge=0, description="Conditional variance product V")
    signal_transfer: float = Field(..., ge=0, le=2, description="Signal transfer coefficient T")
    fidelity: float = Field(..., gt=0, le=1, description="Gaussian fidelity F")
    photon_noise: float = Field(..., ge=0, description="Added photon noise Tr N")

    @computed_field
    @property
    def quantum_v(self) -> bool:
        """V below the classical bound 1/4."""
        return self.conditional_variance < 0.25  # noqa: PLR2004

    @computed_field
    @property
    def quantum_t(self) -> bool:
        """T above the classical bound 1."""
        return self.signal_transfer > 1

    @computed_field
    @property
    def quantum_f(self) -> bool:
        """F above the classical bound 1/2."""
        return self.fidelity > 0.5  # noqa: PLR2004

    @computed_field
    @property
    def quantum_regime(self) -> bool:
        """V < 1/4 and T > 1 simultaneously."""
        return self.quantum_v and self.quantum_t


class SweepRow(BaseModel):
    """A metrics report tagged with its grid point."""

    g: float
    g_prime: float | None
    g_x: float
    g_p: float
    metrics: MetricsReport

    def flat(self) -> dict[str, Any]:
        """Flatten into the CSV column layout.

        :return dict: Column name to value
        """
        flags = [
            name
            for name, raised in (
                ("V", self.metrics.quantum_v),
                ("T", self.metrics.quantum_t),
                ("F", self.metrics.quantum_f),
                ("VT", self.metrics.quantum_regime),
            )
            if raised
        ]
        return {
            "g": self.g,
            "g_prime": self.g_prime,
            "Gx": self.g_x,
            "Gp": self.g_p,
            "V": self.metrics.conditional_variance,
            "T": self.metrics.signal_transfer,
            "F": self.metrics.fidelity,
            "N": self.metrics.photon_noise,
            "flags": "|".join(flags),
        }


class GainObjective(StrEnum):
    """Objective of a gain search."""

    MIN_V = "min_v"
    MAX_T = "max_t"


class OptimizationMethod(StrEnum):
    """How an optimum was obtained."""

    CLOSED_FORM = "closed_form"
    NUMERIC_ORACLE = "numeric_oracle"


class OptimumResult(BaseModel):
    """Location and value of an optimum, with the residual against its closed form."""

    parameters: dict[str, float] = Field(..., description="Named optimizer coordinates")
    value: float = Field(..., description="Objective value at the optimum")
    method: OptimizationMethod = Field(..., description="Closed form or numeric oracle")
    residual: float | None = Field(default=None, description="|closed form - oracle| of the objective")
    parameter_residual: float | None = Field(default=None, description="Largest |closed form - oracle| coordinate")
    seed: int | None = Field(default=None, description="Seed of the random starts")


class GoldenRow(BaseModel):
    """One reproduced published value."""

    quantity: str
    quoted_value: str = Field(..., description="Value as published, or its closed form")
    expected: float
    computed: float
    tolerance: float

    @computed_field
    @property
    def delta(self) -> float:
        """Absolute deviation from the published value."""
        return abs(self.computed - self.expected)

    @computed_field
    @property
    def passed(self) -> bool:
        """Whether the deviation is within tolerance."""
        return math.isfinite(self.computed) and self.delta <= self.tolerance


class InvariantResult(BaseModel):
    """Outcome of one invariant check."""

    identifier: str
    module: str
    passed: bool
    detail: str = ""


class SweepSpec(BaseModel):
    """Parameter grid of a sweep and where to write it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    g_values: list[float] = Field(..., min_length=1, description="Entangling constants")
    g_prime_values: list[float] = Field(default_factory=lambda: [1.0], min_length=1, description="Bell constants")
    bell: Literal["qnd", "bs", "matrix"] = Field(default="qnd", description="Bell interaction family")
    matrix: FloatMatrix | None = Field(default=None, description="4x4 interaction when bell is 'matrix'")
    gains: Literal["unity", "minv", "maxt", "scalar"] = Field(default="unity", description="Gain policy")
    g_x: float = Field(default=1.0, description="Position gain when gains is 'scalar'")
    g_p: float = Field(default=1.0, description="Momentum gain when gains is 'scalar'")
    local_ops: Literal["none", "improved", "optimal"] = Field(default="none", description="Local-operation policy")
    output_format: Literal["csv", "json"] = Field(default="csv", description="Output format")
    out: Path | None = Field(default=None, description="Output path (stdout when omitted)")

    @field_validator("g_values", "g_prime_values")
    @classmethod
    def _check_positive(cls, values: list[float]) -> list[float]:
        if any(not (math.isfinite(value) and value > 0) for value in values):
            msg = f"Grid values must be finite and positive, got {values}."
            raise ValueError(msg)
        return values

    @model_validator(mode="after")
    def _check_matrix(self) -> Self:
        if self.bell == "matrix":
            if self.matrix is None:
                msg = "A 4x4 matrix is required when bell is 'matrix'."
                raise ValueError(msg)
            _require_shape(self.matrix, (4, 4), "Bell interaction matrix")
            if self.gains in ("minv", "maxt") or self.local_ops == "improved":
                msg = "Optimal gains and improved squeezers need a Bell interaction with a QND constant g'."
                raise ValueError(msg)
        return self

    @classmethod
    def load(cls, filepath: Path) -> Self:
        """Load a sweep specification from a JSON document.

        :param Path filepath: Path to the JSON document
        :return SweepSpec: The validated specification
        """
        return cls.model_validate(json.loads(filepath.read_text(encoding="utf-8")))
