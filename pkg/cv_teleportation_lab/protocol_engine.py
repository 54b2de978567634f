"""Heisenberg-picture evaluation of one teleportation run.

Alice holds mode A and Bob mode B of the shared state. Alice applies S_A, couples mode A to the input
through the Bell interaction R and measures x'_in and p'_A. Bob applies S_B and displaces his mode by
the gain matrix times the measured quadratures. The detected quadratures split as Y xi_in + Z xi'_A, so
the output reads xi_out = G Y xi_in + G Z S_A xi_A + S_B xi_B.
"""

import logging
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from cv_teleportation_lab.constants import SYMPLECTIC_TOL, VACUUM_VARIANCE, Y_REGULARITY_TOL
from cv_teleportation_lab.exceptions import InvalidArgumentError, YSingularError
from cv_teleportation_lab.models import (
    BeamSplitterBell,
    BellInteraction,
    GainPolicy,
    MatrixBell,
    MatrixGain,
    ProtocolConfig,
    QNDBell,
    ScalarGain,
    ToleranceConfigModel,
    UnityGain,
)
from cv_teleportation_lab.symplectic_core import (
    SIGMA_3,
    direct_sum,
    make_beamsplitter,
    make_bell_qnd,
    make_qnd,
    norm_scaled_tolerance,
    propagate,
    require_symplectic,
    validate_covariance,
)

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.float64]

# Rows of (x_A + x_B, p_B - p_A) in the two-mode ordering
EPR_COMBINATION = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, -1.0, 0.0, 1.0]])
EPR_COMBINATION.setflags(write=False)


class ProtocolOutcome(NamedTuple):
    """Second moments of Bob's output mode."""

    noise: Matrix
    v_out: Matrix
    first_moment_map: Matrix


def vacuum_covariance(modes: int = 1) -> Matrix:
    """Covariance matrix of the vacuum on one or two modes.

    :param int modes: Number of modes
    :return Matrix: VACUUM_VARIANCE times the identity
    """
    return VACUUM_VARIANCE * np.eye(2 * modes)


def shared_state_qnd(g: float) -> Matrix:
    """Covariance matrix of two vacua entangled by the QND coupling with constant g.

    :param float g: Interaction constant, g >= 0
    :return Matrix: The 4x4 covariance matrix
    :raise InvalidArgumentError: If g is negative
    """
    if g < 0:
        msg = f"Interaction constant must be non-negative, got {g}."
        raise InvalidArgumentError(msg)
    return propagate(vacuum_covariance(2), make_qnd(g))


def epr_noise_matrix(shared_state: npt.ArrayLike) -> Matrix:
    """Covariance of the EPR combinations (x_A + x_B, p_B - p_A).

    :param ArrayLike shared_state: A 4x4 covariance matrix
    :return Matrix: The 2x2 covariance matrix
    """
    return EPR_COMBINATION @ np.asarray(shared_state, dtype=np.float64) @ EPR_COMBINATION.T


def epr_variance(shared_state: npt.ArrayLike) -> float:
    """Total EPR-sum variance [<(x_A + x_B)^2> + <(p_A - p_B)^2>]/2.

    :param ArrayLike shared_state: A 4x4 covariance matrix
    :return float: The variance
    """
    return float(np.trace(epr_noise_matrix(shared_state))) / 2


def _local_operation(matrix: npt.ArrayLike, name: str, tol: float) -> Matrix:
    # Rounding in the symplectic condition grows with the squared norm.
    return require_symplectic(matrix, name, norm_scaled_tolerance(matrix, tol))


def bell_matrix(bell: BellInteraction, tol: float = SYMPLECTIC_TOL) -> Matrix:
    """Build the 4x4 Bell interaction R acting on (x_A, p_A, x_in, p_in).

    :param BellInteraction bell: Bell interaction description
    :param float tol: Symplectic tolerance for a user supplied matrix
    :return Matrix: The interaction matrix
    :raise InvalidArgumentError: If a user supplied matrix is not symplectic
    """
    match bell:
        case QNDBell(g_prime=g_prime):
            return make_bell_qnd(g_prime)
        case BeamSplitterBell(transmissivity=t, reflectivity=r):
            return make_beamsplitter(t, r)
        case MatrixBell(matrix=matrix):
            return _local_operation(matrix, "Bell interaction matrix", tol)
    msg = f"Unknown Bell interaction: {bell!r}"
    raise InvalidArgumentError(msg)


def extract_yz(r_matrix: npt.ArrayLike, tol: float = Y_REGULARITY_TOL) -> tuple[Matrix, Matrix]:
    """Split the detected quadratures (x'_in, p'_A) into Y xi_in + Z xi'_A.

    :param ArrayLike r_matrix: The 4x4 Bell interaction
    :param float tol: Relative floor on |det Y| / ||Y||^2
    :return tuple[Matrix, Matrix]: Y and Z
    :raise InvalidArgumentError: If the matrix is not 4x4
    :raise YSingularError: If Y is singular
    """
    r = np.asarray(r_matrix, dtype=np.float64)
    if r.shape != (4, 4):
        msg = f"Bell interaction must be 4x4, got shape {r.shape}."
        raise InvalidArgumentError(msg)
    y = np.array([[r[2, 2], r[2, 3]], [r[1, 2], r[1, 3]]])
    z = np.array([[r[2, 0], r[2, 1]], [r[1, 0], r[1, 1]]])
    _require_regular(y, tol)
    return y, z


def _require_regular(y: Matrix, tol: float) -> float:
    determinant = float(np.linalg.det(y))
    scale = float(np.sum(y**2))
    if abs(determinant) <= tol * scale or scale == 0:
        msg = f"Detection matrix Y is singular (det Y = {determinant:.3e})."
        raise YSingularError(msg)
    return determinant


def _inverse_2x2(y: Matrix, tol: float) -> Matrix:
    determinant = _require_regular(y, tol)
    return np.array([[y[1, 1], -y[0, 1]], [-y[1, 0], y[0, 0]]]) / determinant


def gain_matrix(y: npt.ArrayLike, policy: GainPolicy, tol: float = Y_REGULARITY_TOL) -> Matrix:
    """Unnormalized gain matrix applied to the measured quadratures.

    Unity gain is Y^-1, scalar gains are diag(G_x, G_p) Y^-1 and a matrix gain is used as given.

    :param ArrayLike y: The 2x2 detection matrix
    :param GainPolicy policy: Gain policy
    :param float tol: Relative floor on |det Y| / ||Y||^2
    :return Matrix: The 2x2 gain matrix
    :raise YSingularError: If Y is singular for a policy that inverts it
    """
    y_array = np.asarray(y, dtype=np.float64)
    match policy:
        case UnityGain():
            return _inverse_2x2(y_array, tol)
        case ScalarGain(g_x=g_x, g_p=g_p):
            return np.diag([g_x, g_p]) @ _inverse_2x2(y_array, tol)
        case MatrixGain(matrix=matrix):
            return np.array(matrix, dtype=np.float64)
    msg = f"Unknown gain policy: {policy!r}"
    raise InvalidArgumentError(msg)


def sigma_matrix(y: npt.ArrayLike, z: npt.ArrayLike, tol: float = Y_REGULARITY_TOL) -> Matrix:
    """Sigma = sigma_3 Y^-1 Z, symplectic whenever the parent interaction is.

    :param ArrayLike y: The 2x2 detection matrix
    :param ArrayLike z: The 2x2 matrix acting on Alice's mode
    :param float tol: Relative floor on |det Y| / ||Y||^2
    :return Matrix: Sigma
    :raise YSingularError: If Y is singular
    """
    return SIGMA_3 @ _inverse_2x2(np.asarray(y, dtype=np.float64), tol) @ np.asarray(z, dtype=np.float64)


def added_noise_qnd_scalar(g: float, g_prime: float, g_x: float, g_p: float) -> tuple[float, float]:
    """Added-noise variances for a QND Bell measurement with normalized gains.

    <X^2> = [(G_x g' - g)^2 + 1]/2 and <P^2> = [(G_p/g')^2 + (1 - G_p g/g')^2]/2.

    :param float g: Entangling constant, g >= 0
    :param float g_prime: Bell constant, g' > 0
    :param float g_x: Normalized position gain
    :param float g_p: Normalized momentum gain
    :return tuple[float, float]: <X^2> and <P^2>
    :raise InvalidArgumentError: If g < 0 or g' <= 0
    """
    if g < 0:
        msg = f"Interaction constant must be non-negative, got {g}."
        raise InvalidArgumentError(msg)
    if g_prime <= 0:
        msg = f"Bell constant must be positive, got {g_prime}."
        raise InvalidArgumentError(msg)
    var_x = ((g_x * g_prime - g) ** 2 + 1) / 2
    var_p = ((g_p / g_prime) ** 2 + (1 - g_p * g / g_prime) ** 2) / 2
    return var_x, var_p


def added_noise_matrix(
    shared_state: npt.ArrayLike,
    r_matrix: npt.ArrayLike,
    s_a: npt.ArrayLike,
    s_b: npt.ArrayLike,
    policy: GainPolicy | None = None,
    tol: float = Y_REGULARITY_TOL,
) -> tuple[Matrix, Matrix]:
    """Added-noise matrix 2N and first-moment map for an arbitrary shared state.

    :param ArrayLike shared_state: The 4x4 covariance matrix of modes A and B
    :param ArrayLike r_matrix: The 4x4 Bell interaction
    :param ArrayLike s_a: Alice's local symplectic
    :param ArrayLike s_b: Bob's local symplectic
    :param GainPolicy | None policy: Gain policy, unity when omitted
    :param float tol: Relative floor on |det Y| / ||Y||^2
    :return tuple[Matrix, Matrix]: 2N and the first-moment map G Y
    :raise YSingularError: If Y is singular
    """
    policy = policy or UnityGain()
    y, z = extract_yz(r_matrix, tol)
    gains = gain_matrix(y, policy, tol)
    s_a_array = np.asarray(s_a, dtype=np.float64)
    s_b_array = np.asarray(s_b, dtype=np.float64)

    # Noise vector n = K xi_A + S_B xi_B
    transfer = np.hstack([gains @ z @ s_a_array, s_b_array])
    noise = transfer @ np.asarray(shared_state, dtype=np.float64) @ transfer.T
    noise = (noise + noise.T) / 2

    first_moment_map = np.eye(2) if isinstance(policy, UnityGain) else gains @ y
    return noise, first_moment_map


def validate_protocol(config: ProtocolConfig, tolerances: ToleranceConfigModel | None = None) -> Matrix:
    """Check every component of a configuration and return its Bell interaction.

    :param ProtocolConfig config: The configuration
    :param ToleranceConfigModel | None tolerances: Tolerances, defaults when omitted
    :return Matrix: The 4x4 Bell interaction
    :raise InvalidArgumentError: If a local operation or the interaction is not symplectic
    :raise YSingularError: If the interaction yields a singular Y
    """
    tolerances = tolerances or ToleranceConfigModel()
    _local_operation(config.s_a, "S_A", tolerances.symplectic)
    _local_operation(config.s_b, "S_B", tolerances.symplectic)
    r_matrix = bell_matrix(config.bell, tolerances.symplectic)
    extract_yz(r_matrix, tolerances.y_regularity)
    return r_matrix


def run_protocol(
    config: ProtocolConfig,
    v_in: npt.ArrayLike | None = None,
    tolerances: ToleranceConfigModel | None = None,
    shared_state: npt.ArrayLike | None = None,
) -> ProtocolOutcome:
    """Evaluate a teleportation run at the level of second moments.

    The output covariance is V_out = M V_in M^T + 2N with M the first-moment map, which is exactly the
    identity under unity gain.

    :param ProtocolConfig config: The configuration
    :param ArrayLike | None v_in: Input covariance matrix, the vacuum (coherent input) when omitted
    :param ToleranceConfigModel | None tolerances: Tolerances, defaults when omitted
    :param ArrayLike | None shared_state: Shared state replacing the QND state of config.g
    :return ProtocolOutcome: 2N, V_out and the first-moment map
    :raise InvalidArgumentError: If a component of the configuration is invalid
    :raise InvalidStateError: If an input or shared covariance matrix is unphysical
    :raise YSingularError: If the Bell interaction yields a singular Y
    """
    tolerances = tolerances or ToleranceConfigModel()
    r_matrix = validate_protocol(config, tolerances)
    v_in_array = validate_covariance(vacuum_covariance() if v_in is None else v_in, tolerances.uncertainty)
    if v_in_array.shape != (2, 2):
        msg = f"Input covariance must be 2x2, got shape {v_in_array.shape}."
        raise InvalidArgumentError(msg)
    state = (
        shared_state_qnd(config.g)
        if shared_state is None
        else validate_covariance(shared_state, tolerances.uncertainty)
    )

    noise, first_moment_map = added_noise_matrix(
        state, r_matrix, config.s_a, config.s_b, config.gains, tolerances.y_regularity
    )
    v_out = first_moment_map @ v_in_array @ first_moment_map.T + noise
    logger.debug("Added noise for g=%.6g: %s", config.g, noise.tolist())
    return ProtocolOutcome(noise=noise, v_out=v_out, first_moment_map=first_moment_map)


def local_transform(shared_state: npt.ArrayLike, s_b: npt.ArrayLike) -> Matrix:
    """Apply Bob's local operation to the shared state.

    :param ArrayLike shared_state: A 4x4 covariance matrix
    :param ArrayLike s_b: Bob's local symplectic
    :return Matrix: (I + S_B) V (I + S_B)^T
    """
    return propagate(shared_state, direct_sum(np.eye(2), s_b))
