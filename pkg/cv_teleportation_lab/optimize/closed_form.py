"""Closed-form optima of the QND teleportation scheme."""

import logging
import math
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from cv_teleportation_lab.constants import PURE_STATE_TOL, Y_REGULARITY_TOL
from cv_teleportation_lab.exceptions import InvalidArgumentError
from cv_teleportation_lab.protocol_engine import extract_yz, sigma_matrix
from cv_teleportation_lab.symplectic_core import SIGMA_3, make_squeezer, two_mode_standard_form

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.float64]


class LocalOperations(NamedTuple):
    """Local symplectics of Alice and Bob with the photon noise they achieve."""

    s_a: Matrix
    s_b: Matrix
    photon_noise: float


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            msg = f"{name} must be finite and positive, got {value}."
            raise InvalidArgumentError(msg)


def gains_min_v(g: float, g_prime: float) -> tuple[float, float]:
    """Normalized gains minimizing V: G_x = g/g', G_p = g g'/(1 + g^2).

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return tuple[float, float]: G_x and G_p
    :raise InvalidArgumentError: If an argument is not positive
    """
    _require_positive(g=g, g_prime=g_prime)
    return g / g_prime, g * g_prime / (1 + g**2)


def gains_max_t(g: float, g_prime: float) -> tuple[float, float]:
    """Normalized gains maximizing T: G_x = (1 + g^2)/(g g'), G_p = g'/g.

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return tuple[float, float]: G_x and G_p
    :raise InvalidArgumentError: If an argument is not positive
    """
    _require_positive(g=g, g_prime=g_prime)
    return (1 + g**2) / (g * g_prime), g_prime / g


def optimal_gprime(g: float) -> float:
    """Bell constant (1 + g^2)^(1/4) maximizing T at either gain optimum.

    :param float g: Entangling constant
    :return float: g'_opt
    """
    return (1 + g**2) ** 0.25


def v_min(g: float) -> float:
    """Smallest conditional variance product 1/(4(1 + g^2)), independent of g'."""
    return 1 / (4 * (1 + g**2))


def t_v_min(g: float, g_prime: float) -> float:
    """Signal transfer at the V-minimizing gains.

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return float: T_V_min
    """
    _require_positive(g=g, g_prime=g_prime)
    return g**2 / (g**2 + g_prime**2) + (g * g_prime) ** 2 / ((g * g_prime) ** 2 + 1 + g**2)


def t_v_min_opt(g: float) -> float:
    """T_V_min at g'_opt, 2 g^2/(g^2 + sqrt(1 + g^2))."""
    return 2 * g**2 / (g**2 + math.hypot(1.0, g))


def t_max(g: float, g_prime: float) -> float:
    """Largest signal transfer 1 + g^2 g'^2/((1 + g'^2)(1 + g^2 + g'^2)).

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return float: T_max
    """
    _require_positive(g=g, g_prime=g_prime)
    return 1 + (g * g_prime) ** 2 / ((1 + g_prime**2) * (1 + g**2 + g_prime**2))


def v_t_max(g: float) -> float:
    """Conditional variance product (1/g^2 + 1/g^4)/4 at the T-maximizing gains.

    :param float g: Entangling constant
    :return float: V_T_max
    """
    _require_positive(g=g)
    return (1 / g**2 + 1 / g**4) / 4


def t_max_opt(g: float) -> float:
    """T_max at g'_opt, 2 sqrt(1 + g^2)/(1 + sqrt(1 + g^2))."""
    root = math.hypot(1.0, g)
    return 2 * root / (1 + root)


def quantum_threshold() -> float:
    """Entangling constant sqrt((sqrt(5) + 1)/2) above which V_T_max < 1/4."""
    return math.sqrt((math.sqrt(5) + 1) / 2)


def hk_threshold() -> float:
    """Entangling constant sqrt(3/10) above which the g' = g scheme beats F = 1/2."""
    return math.sqrt(3 / 10)


def improved_squeezers(g: float, g_prime: float) -> tuple[Matrix, Matrix]:
    """Local squeezers S_A = diag(a/g', g'/a), S_B = diag(1/a, a) with a = (1 + g^2)^(1/4).

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return tuple[Matrix, Matrix]: S_A and S_B
    :raise InvalidArgumentError: If an argument is not positive
    """
    _require_positive(g=g, g_prime=g_prime)
    a = optimal_gprime(g)
    return make_squeezer(math.log(a / g_prime)), make_squeezer(-math.log(a))


def squeezer_for_gprime(g: float, g_prime: float) -> Matrix:
    """Alice's squeezer with e^(r_A) = (1 + g^2)^(1/4)/g' turning a fixed g' into g'_opt.

    :param float g: Entangling constant
    :param float g_prime: Bell constant of the available interaction
    :return Matrix: S(r_A)
    :raise InvalidArgumentError: If an argument is not positive
    """
    _require_positive(g=g, g_prime=g_prime)
    return make_squeezer(math.log(optimal_gprime(g) / g_prime))


def effective_gprime(g_prime: float, r_a: float) -> float:
    """Bell constant e^(r_A) g' seen after Alice's squeezer S(r_A)."""
    return math.exp(r_a) * g_prime


def optimal_local_ops(
    shared_state: npt.ArrayLike,
    r_matrix: npt.ArrayLike,
    y_tol: float = Y_REGULARITY_TOL,
    pure_tol: float = PURE_STATE_TOL,
) -> LocalOperations:
    """Local operations S_A = Sigma^-1 m_A and S_B = m_B minimizing the photon noise.

    The added noise becomes isotropic, 2N = 2(a - c) I, with 2(a - c) = e^(-2 kappa).

    :param ArrayLike shared_state: A pure 4x4 covariance matrix
    :param ArrayLike r_matrix: The 4x4 Bell interaction
    :param float y_tol: Relative floor on |det Y| / ||Y||^2
    :param float pure_tol: Tolerance on the pure-state determinant
    :return LocalOperations: S_A, S_B and the minimum photon noise
    :raise YSingularError: If the interaction yields a singular Y
    :raise UnsupportedStateError: If the shared state is mixed
    """
    y, z = extract_yz(r_matrix, y_tol)
    sigma = sigma_matrix(y, z, y_tol)
    standard_form = two_mode_standard_form(shared_state, pure_tol)
    n_min = 2 * (standard_form.a - standard_form.c)
    logger.debug("Optimal local operations: a=%.12g, c=%.12g, N_min=%.12g", standard_form.a, standard_form.c, n_min)
    return LocalOperations(
        s_a=np.linalg.inv(sigma) @ standard_form.m_a,
        s_b=np.array(standard_form.m_b),
        photon_noise=n_min,
    )


def _require_standard_pair(a: float, c: float, tol: float) -> None:
    if a < 0.5 - tol or c < 0 or abs(a**2 - c**2 - 0.25) > tol:  # noqa: PLR2004
        msg = f"(a, c) = ({a}, {c}) is not a pure standard-form pair with a^2 - c^2 = 1/4."
        raise InvalidArgumentError(msg)


def noise_standard_form(
    a: float, c: float, s_a: npt.ArrayLike, s_b: npt.ArrayLike, tol: float = PURE_STATE_TOL
) -> float:
    """Photon noise (a/2) Tr(s~ s~^T + s_B s_B^T) - c Tr(s~ s_B^T) of a standard-form state.

    s~ = sigma_3 s_A sigma_3, where s_A and s_B act after the state has been brought to standard form.

    :param float a: Local invariant sqrt(det A)
    :param float c: Local invariant sqrt(|det C|)
    :param ArrayLike s_a: Alice's residual local symplectic
    :param ArrayLike s_b: Bob's residual local symplectic
    :param float tol: Tolerance on a^2 - c^2 = 1/4
    :return float: The photon noise
    :raise InvalidArgumentError: If (a, c) is not a pure standard-form pair
    """
    _require_standard_pair(a, c, tol)
    s_tilde = SIGMA_3 @ np.asarray(s_a, dtype=np.float64) @ SIGMA_3
    s_b_array = np.asarray(s_b, dtype=np.float64)
    return float(
        a / 2 * np.trace(s_tilde @ s_tilde.T + s_b_array @ s_b_array.T) - c * np.trace(s_tilde @ s_b_array.T)
    )


def noise_bloch_messiah(
    a: float, c: float, r_plus: float, r_minus: float, theta_plus: float, theta_minus: float
) -> float:
    """Photon noise in the sum and difference variables of the Bloch-Messiah parameters.

    With r_+- = r_A +- r_B and theta_+- = alpha +- beta - gamma -+ delta the noise reads
    2a cosh r_+ cosh r_- - c[(cosh r_+ + cosh r_-) cos theta_+ + (cosh r_+ - cosh r_-) cos theta_-].

    :param float a: Local invariant sqrt(det A)
    :param float c: Local invariant sqrt(|det C|)
    :param float r_plus: r_A + r_B
    :param float r_minus: r_A - r_B
    :param float theta_plus: alpha + beta - gamma - delta
    :param float theta_minus: alpha - beta - gamma + delta
    :return float: The photon noise
    """
    cosh_plus, cosh_minus = math.cosh(r_plus), math.cosh(r_minus)
    return 2 * a * cosh_plus * cosh_minus - c * (
        (cosh_plus + cosh_minus) * math.cos(theta_plus) + (cosh_plus - cosh_minus) * math.cos(theta_minus)
    )


def hessian_at_minimum(a: float, c: float) -> Matrix:
    """Hessian of 2 cosh r_+ (a cosh r_+ - c cos theta_+) in (r_+, theta_+) at the origin.

    :param float a: Local invariant sqrt(det A)
    :param float c: Local invariant sqrt(|det C|)
    :return Matrix: [[2(2a - c), 0], [0, 2c]]
    """
    return np.array([[2 * (2 * a - c), 0.0], [0.0, 2 * c]])
