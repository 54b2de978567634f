"""Construction, validation and decomposition of single- and two-mode symplectic matrices.

Quadratures are ordered (x_1, p_1, x_2, p_2) and the vacuum variance is 1/2, so a covariance matrix
V is physical when V + (i/2) Omega is positive semidefinite.
"""

import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.linalg import block_diag, polar, sqrtm

from cv_teleportation_lab.constants import (
    PURE_STATE_DETERMINANT,
    PURE_STATE_TOL,
    PURITY_CLAMP_TOL,
    RECONSTRUCTION_TOL,
    SYMMETRY_TOL,
    SYMPLECTIC_TOL,
    UNCERTAINTY_TOL,
    UNIT_NORM_TOL,
)
from cv_teleportation_lab.exceptions import InvalidArgumentError, InvalidStateError, UnsupportedStateError
from cv_teleportation_lab.models import BlochMessiahFactors, StandardFormResult

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.float64]

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = block_diag(J, J)
SIGMA_3 = np.diag([1.0, -1.0])
for _constant in (J, OMEGA, SIGMA_3):
    _constant.setflags(write=False)


def _require_finite(value: float, name: str) -> None:
    if not math.isfinite(value):
        msg = f"{name} must be finite, got {value}."
        raise InvalidArgumentError(msg)


def _as_square(matrix: npt.ArrayLike, sizes: tuple[int, ...], name: str) -> Matrix:
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] not in sizes:  # noqa: PLR2004
        msg = f"{name} must be square with size in {sizes}, got shape {array.shape}."
        raise InvalidArgumentError(msg)
    return array


def symplectic_form(size: int) -> Matrix:
    """Return the symplectic form J (size 2) or Omega = J + J (size 4).

    :param int size: Matrix dimension, 2 or 4
    :return Matrix: The symplectic form
    :raise InvalidArgumentError: If the size is not 2 or 4
    """
    match size:
        case 2:
            return J
        case 4:
            return OMEGA
        case _:
            msg = f"Symplectic form is defined for sizes 2 and 4, got {size}."
            raise InvalidArgumentError(msg)


def make_squeezer(r: float) -> Matrix:
    """Single-mode squeezer S(r) = diag(e^r, e^-r).

    :param float r: Squeezing parameter
    :return Matrix: The 2x2 squeezer
    :raise InvalidArgumentError: If r is not finite
    """
    _require_finite(r, "Squeezing parameter")
    return np.diag([math.exp(r), math.exp(-r)])


def make_phase(u: float) -> Matrix:
    """Phase shift P(u), a rotation of the quadrature plane by u.

    :param float u: Angle in radians
    :return Matrix: The 2x2 rotation
    :raise InvalidArgumentError: If u is not finite
    """
    _require_finite(u, "Phase angle")
    cos_u, sin_u = math.cos(u), math.sin(u)
    return np.array([[cos_u, -sin_u], [sin_u, cos_u]])


def make_qnd(g: float) -> Matrix:
    """Heisenberg map of the entangling QND coupling -kappa x_A p_B with g = kappa t.

    x_A -> x_A, p_A -> p_A + g p_B, x_B -> x_B - g x_A, p_B -> p_B.

    :param float g: Interaction constant
    :return Matrix: The 4x4 symplectic matrix
    :raise InvalidArgumentError: If g is not finite
    """
    _require_finite(g, "Interaction constant")
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, g],
            [-g, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def make_bell_qnd(g_prime: float) -> Matrix:
    """Bell-stage QND coupling kappa' x_A p_in acting on (x_A, p_A, x_in, p_in).

    The detected quadratures are x_in + g' x_A and p_A - g' p_in.

    :param float g_prime: Interaction constant of the Bell stage
    :return Matrix: The 4x4 symplectic matrix
    :raise InvalidArgumentError: If g' is not finite
    """
    _require_finite(g_prime, "Bell interaction constant")
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, -g_prime],
            [g_prime, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def make_beamsplitter(t: float, r: float, tol: float = UNIT_NORM_TOL) -> Matrix:
    """Unbalanced beam splitter mixing (x_A, p_A) with (x_in, p_in).

    Detected rows: x'_in = R x_A + T x_in and p'_A = T p_A - R p_in. The undetected rows
    complete an orthogonal mixer.

    :param float t: Amplitude transmissivity T, with 0 < T <= 1
    :param float r: Amplitude reflectivity R
    :param float tol: Tolerance on T^2 + R^2 = 1
    :return Matrix: The 4x4 symplectic matrix
    :raise InvalidArgumentError: If the amplitudes are not finite, T is outside (0, 1] or T^2 + R^2 != 1
    """
    _require_finite(t, "Transmissivity")
    _require_finite(r, "Reflectivity")
    if not 0 < t <= 1:
        msg = f"Transmissivity must lie in (0, 1], got {t}."
        raise InvalidArgumentError(msg)
    if abs(t**2 + r**2 - 1) > tol:
        msg = f"Beam splitter amplitudes must satisfy T^2 + R^2 = 1, got {t**2 + r**2}."
        raise InvalidArgumentError(msg)
    return np.array(
        [
            [t, 0.0, -r, 0.0],
            [0.0, t, 0.0, -r],
            [r, 0.0, t, 0.0],
            [0.0, r, 0.0, t],
        ]
    )


def beamsplitter_from_ratio(ratio: float) -> tuple[float, float]:
    """Amplitudes (T, R) of the beam splitter with asymmetry R/T = ratio.

    :param float ratio: Asymmetry ratio, the equivalent QND constant g'
    :return tuple[float, float]: Transmissivity and reflectivity
    :raise InvalidArgumentError: If the ratio is negative or not finite
    """
    _require_finite(ratio, "Asymmetry ratio")
    if ratio < 0:
        msg = f"Asymmetry ratio must be non-negative, got {ratio}."
        raise InvalidArgumentError(msg)
    t = 1 / math.hypot(1.0, ratio)
    return t, ratio * t


def direct_sum(m_a: npt.ArrayLike, m_b: npt.ArrayLike) -> Matrix:
    """Block-diagonal local operation m_A + m_B on two modes.

    :param ArrayLike m_a: Operation on mode A
    :param ArrayLike m_b: Operation on mode B
    :return Matrix: The 4x4 block-diagonal matrix
    """
    return block_diag(_as_square(m_a, (2,), "m_A"), _as_square(m_b, (2,), "m_B"))


def symplectic_deviation(matrix: npt.ArrayLike) -> float:
    """Largest entrywise deviation of M Omega M^T from Omega.

    :param ArrayLike matrix: A 2x2 or 4x4 matrix
    :return float: The deviation
    :raise InvalidArgumentError: If the matrix is not 2x2 or 4x4
    """
    array = _as_square(matrix, (2, 4), "Matrix")
    form = symplectic_form(array.shape[0])
    return float(np.max(np.abs(array @ form @ array.T - form)))


def is_symplectic(matrix: npt.ArrayLike, tol: float = SYMPLECTIC_TOL) -> bool:
    """Check the symplectic condition entrywise.

    :param ArrayLike matrix: A 2x2 or 4x4 matrix
    :param float tol: Largest admissible entrywise deviation
    :return bool: Whether M Omega M^T = Omega within tolerance
    :raise InvalidArgumentError: If the matrix is not 2x2 or 4x4
    """
    return symplectic_deviation(matrix) <= tol


def norm_scaled_tolerance(matrix: npt.ArrayLike, tol: float) -> float:
    """Scale an entrywise tolerance by the squared spectral norm of a matrix.

    :param ArrayLike matrix: The matrix under test
    :param float tol: Tolerance for matrices of unit norm
    :return float: The scaled tolerance
    """
    return tol * max(1.0, float(np.linalg.norm(np.asarray(matrix, dtype=np.float64), 2)) ** 2)


def require_symplectic(matrix: npt.ArrayLike, name: str, tol: float = SYMPLECTIC_TOL) -> Matrix:
    """Return the matrix as an array, raising if it is not symplectic.

    :param ArrayLike matrix: A 2x2 or 4x4 matrix
    :param str name: Name used in the error message
    :param float tol: Largest admissible entrywise deviation
    :return Matrix: The validated matrix
    :raise InvalidArgumentError: If the matrix is not symplectic
    """
    array = _as_square(matrix, (2, 4), name)
    deviation = symplectic_deviation(array)
    if deviation > tol:
        msg = f"{name} is not symplectic (deviation {deviation:.3e} > {tol:.1e})."
        raise InvalidArgumentError(msg)
    return array


def validate_covariance(covariance: npt.ArrayLike, tol: float = UNCERTAINTY_TOL) -> Matrix:
    """Validate a one- or two-mode covariance matrix.

    :param ArrayLike covariance: A 2x2 or 4x4 covariance matrix
    :param float tol: Largest admissible negative eigenvalue of V + (i/2) Omega
    :return Matrix: The validated covariance matrix
    :raise InvalidArgumentError: If the shape is wrong
    :raise InvalidStateError: If the matrix is asymmetric or violates the uncertainty relation
    """
    array = _as_square(covariance, (2, 4), "Covariance matrix")
    if not np.all(np.isfinite(array)):
        msg = "Covariance matrix entries must be finite."
        raise InvalidArgumentError(msg)
    if np.max(np.abs(array - array.T)) > SYMMETRY_TOL:
        msg = "Covariance matrix is not symmetric."
        raise InvalidStateError(msg)
    smallest = float(np.min(np.linalg.eigvalsh(array + 0.5j * symplectic_form(array.shape[0]))))
    if smallest < -tol:
        msg = f"Covariance matrix violates the uncertainty relation (eigenvalue {smallest:.3e})."
        raise InvalidStateError(msg)
    return array


def propagate(covariance: npt.ArrayLike, transform: npt.ArrayLike) -> Matrix:
    """Transform a covariance matrix, V -> M V M^T.

    :param ArrayLike covariance: A 2x2 or 4x4 covariance matrix
    :param ArrayLike transform: A matrix of the same size
    :return Matrix: The transformed covariance matrix
    :raise InvalidArgumentError: If the sizes do not match
    """
    v = _as_square(covariance, (2, 4), "Covariance matrix")
    m = _as_square(transform, (2, 4), "Transform")
    if v.shape != m.shape:
        msg = f"Transform of shape {m.shape} does not match covariance of shape {v.shape}."
        raise InvalidArgumentError(msg)
    return m @ v @ m.T


def blocks(covariance: npt.ArrayLike) -> tuple[Matrix, Matrix, Matrix]:
    """Split a two-mode covariance matrix into its blocks A, B and C.

    :param ArrayLike covariance: A 4x4 covariance matrix
    :return tuple[Matrix, Matrix, Matrix]: Blocks A, B and C
    """
    v = _as_square(covariance, (4,), "Two-mode covariance matrix")
    return v[:2, :2], v[2:, 2:], v[:2, 2:]


def purity(reduced: npt.ArrayLike, tol: float = PURITY_CLAMP_TOL) -> float:
    """Purity 1/(2 sqrt(det V)) of a single-mode Gaussian state.

    :param ArrayLike reduced: A 2x2 covariance block
    :param float tol: Rounding slack below det V = 1/4
    :return float: Purity in (0, 1]
    :raise InvalidStateError: If the block is asymmetric or det V < 1/4 beyond tolerance
    """
    block = _as_square(reduced, (2,), "Reduced covariance block")
    if np.max(np.abs(block - block.T)) > SYMMETRY_TOL:
        msg = "Reduced covariance block is not symmetric."
        raise InvalidStateError(msg)
    determinant = float(np.linalg.det(block))
    if determinant < 0.25 - tol:  # noqa: PLR2004
        msg = f"Reduced covariance determinant {determinant} is below the vacuum bound 1/4."
        raise InvalidStateError(msg)
    if determinant < 0.25:  # noqa: PLR2004
        logger.warning("Clamping reduced covariance determinant %.17g to 1/4.", determinant)
        determinant = 0.25
    return 1 / (2 * math.sqrt(determinant))


def _wrap_angle(angle: float) -> float:
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def compose_bloch_messiah(factors: BlochMessiahFactors) -> Matrix:
    """Rebuild P(alpha) S(r) P(beta) from its factors.

    :param BlochMessiahFactors factors: Decomposition factors
    :return Matrix: The 2x2 symplectic matrix
    """
    return make_phase(factors.alpha) @ make_squeezer(factors.r) @ make_phase(factors.beta)


def bloch_messiah_2x2(matrix: npt.ArrayLike, tol: float = SYMPLECTIC_TOL) -> BlochMessiahFactors:
    """Decompose a single-mode symplectic matrix as P(alpha) S(r) P(beta).

    The canonical branch has r >= 0 with the larger stretch along x, alpha folded into (-pi/2, pi/2]
    and beta wrapped into (-pi, pi]. A pure rotation returns r = 0 and beta = 0.

    :param ArrayLike matrix: A 2x2 symplectic matrix
    :param float tol: Tolerance of the symplectic check
    :return BlochMessiahFactors: The decomposition
    :raise InvalidArgumentError: If the matrix is not symplectic
    """
    s = require_symplectic(matrix, "Bloch-Messiah input", tol)
    u, singular_values, vt = np.linalg.svd(s)
    if np.linalg.det(u) < 0:
        u = u @ SIGMA_3
        vt = SIGMA_3 @ vt

    r = math.log(singular_values[0])
    if r <= RECONSTRUCTION_TOL:
        return BlochMessiahFactors(alpha=math.atan2(s[1, 0], s[0, 0]), r=0.0, beta=0.0)

    alpha = math.atan2(u[1, 0], u[0, 0])
    beta = math.atan2(vt[1, 0], vt[0, 0])
    # P(alpha + pi) S(r) P(beta + pi) = P(alpha) S(r) P(beta)
    if alpha > math.pi / 2:
        alpha, beta = alpha - math.pi, beta - math.pi
    elif alpha <= -math.pi / 2:
        alpha, beta = alpha + math.pi, beta + math.pi
    return BlochMessiahFactors(alpha=alpha, r=r, beta=_wrap_angle(beta))


def random_symplectic_2x2(rng: np.random.Generator, squeeze_bound: float) -> Matrix:
    """Draw P(alpha) S(r) P(beta) with uniform angles in [-pi, pi) and r in [-bound, bound].

    :param Generator rng: Random number generator
    :param float squeeze_bound: Largest |r|
    :return Matrix: A random 2x2 symplectic matrix
    """
    alpha, beta = rng.uniform(-math.pi, math.pi, size=2)
    r = rng.uniform(-squeeze_bound, squeeze_bound)
    return make_phase(float(alpha)) @ make_squeezer(float(r)) @ make_phase(float(beta))


def squeezing_parameter(a: float) -> float:
    """Two-mode squeezing parameter kappa with a = cosh(2 kappa)/2.

    :param float a: Local symplectic invariant sqrt(det A)
    :return float: kappa >= 0
    """
    return 0.5 * math.acosh(max(2 * a, 1.0))


def two_mode_standard_form(covariance: npt.ArrayLike, tol: float = PURE_STATE_TOL) -> StandardFormResult:
    """Reduce a pure two-mode covariance matrix to the two-mode squeezed vacuum pattern by local symplectics.

    The result satisfies (m_A + m_B) V (m_A + m_B)^T = [[a I, diag(-c, c)], [diag(-c, c), a I]].

    :param ArrayLike covariance: A 4x4 covariance matrix with det V = 1/16
    :param float tol: Tolerance on the pure-state determinant
    :return StandardFormResult: Local operations, reduced matrix and invariants
    :raise InvalidStateError: If the matrix is not a valid covariance matrix
    :raise UnsupportedStateError: If the state is mixed
    """
    v = validate_covariance(_as_square(covariance, (4,), "Two-mode covariance matrix"))
    determinant = float(np.linalg.det(v))
    if determinant > PURE_STATE_DETERMINANT + tol:
        msg = f"Standard form is only supported for pure states (det V = {determinant:.12g} > 1/16)."
        raise UnsupportedStateError(msg)
    if determinant < PURE_STATE_DETERMINANT - tol:
        msg = f"Covariance determinant {determinant:.12g} is below the pure-state value 1/16."
        raise InvalidStateError(msg)

    block_a, block_b, block_c = blocks(v)
    a = math.sqrt(np.linalg.det(block_a))
    b = math.sqrt(np.linalg.det(block_b))
    m_a = math.sqrt(a) * np.linalg.inv(np.real(sqrtm(block_a)))
    m_b = math.sqrt(b) * np.linalg.inv(np.real(sqrtm(block_b)))

    reduced_c = m_a @ block_c @ m_b.T
    if np.linalg.det(reduced_c) > tol:
        msg = "Correlation block with positive determinant cannot belong to a pure two-mode state."
        raise UnsupportedStateError(msg)
    c = math.sqrt(abs(np.linalg.det(block_c)))
    if c > tol:
        # reduced_c = c O with det O = -1; the rotation -sigma_3 O maps it to diag(-c, c).
        orthogonal, _ = polar(reduced_c)
        m_b = -SIGMA_3 @ orthogonal @ m_b

    v_tms = propagate(v, direct_sum(m_a, m_b))
    kappa = squeezing_parameter(a)
    logger.debug("Standard form: a=%.12g, c=%.12g, kappa=%.12g", a, c, kappa)
    return StandardFormResult(m_a=m_a, m_b=m_b, v_tms=v_tms, a=a, c=c, kappa=kappa)
