"""Figures of merit of a teleportation run: V, T, fidelities and photon noise."""

import logging
import math

import numpy as np
import numpy.typing as npt

from cv_teleportation_lab.exceptions import InvalidArgumentError, InvalidStateError
from cv_teleportation_lab.models import MetricsReport, ProtocolConfig, ToleranceConfigModel
from cv_teleportation_lab.protocol_engine import run_protocol, vacuum_covariance

logger = logging.getLogger(__name__)

# Largest off-diagonal first-moment gain, relative to the diagonal, treated as a diagonal response
DIAGONAL_RESPONSE_TOL = 1e-9


def _require_non_negative(**variances: float) -> None:
    for name, value in variances.items():
        if value < 0:
            msg = f"Variance {name} must be non-negative, got {value}."
            raise InvalidArgumentError(msg)


def cond_var_product(var_x: float, var_p: float) -> float:
    """Conditional variance product V = <X^2><P^2>.

    The added noises are uncorrelated with the input, so the conditional variances equal them.

    :param float var_x: Position added-noise variance
    :param float var_p: Momentum added-noise variance
    :return float: V, classically at least 1/4
    :raise InvalidArgumentError: If a variance is negative
    """
    _require_non_negative(var_x=var_x, var_p=var_p)
    return var_x * var_p


def signal_transfer(g_x: float, g_p: float, var_x: float, var_p: float) -> float:
    """Signal transfer coefficient T = G_x^2/(G_x^2 + 2<X^2>) + G_p^2/(G_p^2 + 2<P^2>).

    :param float g_x: Normalized position gain
    :param float g_p: Normalized momentum gain
    :param float var_x: Position added-noise variance
    :param float var_p: Momentum added-noise variance
    :return float: T in (0, 2], classically at most 1
    :raise InvalidArgumentError: If a gain is zero or a variance is negative
    """
    if g_x == 0 or g_p == 0:
        msg = f"Signal transfer is undefined for vanishing gains (G_x={g_x}, G_p={g_p})."
        raise InvalidArgumentError(msg)
    _require_non_negative(var_x=var_x, var_p=var_p)
    return g_x**2 / (g_x**2 + 2 * var_x) + g_p**2 / (g_p**2 + 2 * var_p)


def fidelity_uncorrelated(var_x: float, var_p: float) -> float:
    """Unity-gain coherent-state fidelity 1/sqrt((1 + <X^2>)(1 + <P^2>)).

    :param float var_x: Position added-noise variance
    :param float var_p: Momentum added-noise variance
    :return float: F in (0, 1]
    """
    _require_non_negative(var_x=var_x, var_p=var_p)
    return 1 / math.sqrt((1 + var_x) * (1 + var_p))


def fidelity_gaussian(v_in: npt.ArrayLike, v_out: npt.ArrayLike) -> float:
    """Overlap fidelity 1/sqrt(det(V_out + V_in)) of a pure Gaussian input with equal first moments.

    :param ArrayLike v_in: Input covariance matrix
    :param ArrayLike v_out: Output covariance matrix
    :return float: F in (0, 1]
    :raise InvalidStateError: If det(V_out + V_in) is not positive
    """
    determinant = float(np.linalg.det(np.asarray(v_out, dtype=np.float64) + np.asarray(v_in, dtype=np.float64)))
    if determinant <= 0:
        msg = f"det(V_out + V_in) = {determinant} is not positive."
        raise InvalidStateError(msg)
    return 1 / math.sqrt(determinant)


def fidelity_coherent(noise: npt.ArrayLike) -> float:
    """Coherent-input fidelity 1/sqrt(1 + 2 Tr N + 4 det N) from the stored matrix 2N.

    :param ArrayLike noise: Added-noise matrix 2N
    :return float: F in (0, 1]
    """
    half_noise = np.asarray(noise, dtype=np.float64) / 2
    return 1 / math.sqrt(1 + 2 * np.trace(half_noise) + 4 * np.linalg.det(half_noise))


def photon_noise(noise: npt.ArrayLike) -> float:
    """Added photon number Tr N, half the trace of the stored matrix 2N.

    :param ArrayLike noise: Added-noise matrix 2N
    :return float: Tr N
    """
    return float(np.trace(np.asarray(noise, dtype=np.float64))) / 2


def hk_fidelity(g: float) -> float:
    """Fidelity 2/sqrt(3(2 + 1/g^2)) of the scheme with g' = g.

    :param float g: Entangling constant
    :return float: F_HK
    :raise InvalidArgumentError: If g <= 0
    """
    if g <= 0:
        msg = f"Entangling constant must be positive, got {g}."
        raise InvalidArgumentError(msg)
    return 2 / math.sqrt(3 * (2 + 1 / g**2))


def fidelity_qnd(g: float, g_prime: float) -> float:
    """Unity-gain fidelity of the QND scheme, 2/sqrt([2 + 1/g'^2 + (g/g' - 1)^2][3 + (g - g')^2]).

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :return float: F(g, g')
    :raise InvalidArgumentError: If g' <= 0
    """
    if g_prime <= 0:
        msg = f"Bell constant must be positive, got {g_prime}."
        raise InvalidArgumentError(msg)
    return 2 / math.sqrt((2 + 1 / g_prime**2 + (g / g_prime - 1) ** 2) * (3 + (g - g_prime) ** 2))


def improved_fidelity(g: float) -> float:
    """Fidelity 1/(1 + sqrt(1 + g^2) - g) of the scheme with local squeezers.

    :param float g: Entangling constant
    :return float: F_S
    """
    return 1 / (1 + math.hypot(1.0, g) - g)


def bk_fidelity(kappa: float) -> float:
    """Fidelity 1/(1 + e^(-2 kappa)) of teleportation through a two-mode squeezed vacuum.

    :param float kappa: Two-mode squeezing parameter
    :return float: F_BK
    """
    return 1 / (1 + math.exp(-2 * kappa))


def evaluate_metrics(config: ProtocolConfig, tolerances: ToleranceConfigModel | None = None) -> MetricsReport:
    """Run the protocol and collect V, T, F and the photon noise.

    T and V assume a diagonal gain response: they use the normalized gains on the diagonal of the first-moment
    map and the diagonal added-noise variances, so x-p cross terms of a matrix gain are not counted. A map with
    a vanishing diagonal gain has no T. F is the overlap fidelity for a vacuum input, which equals the
    coherent-state fidelity under unity gain and does use the full map.

    :param ProtocolConfig config: The configuration
    :param ToleranceConfigModel | None tolerances: Tolerances, defaults when omitted
    :return MetricsReport: The figures of merit
    :raise InvalidArgumentError: If a diagonal gain of the first-moment map vanishes
    """
    outcome = run_protocol(config, tolerances=tolerances)
    var_x, var_p = float(outcome.noise[0, 0]), float(outcome.noise[1, 1])
    m = outcome.first_moment_map
    g_x, g_p = float(m[0, 0]), float(m[1, 1])
    if g_x == 0 or g_p == 0:
        msg = f"T needs a diagonal gain response, got first-moment map {m.tolist()}."
        raise InvalidArgumentError(msg)
    if (cross := float(max(abs(m[0, 1]), abs(m[1, 0])))) > DIAGONAL_RESPONSE_TOL * max(abs(g_x), abs(g_p)):
        logger.warning("First-moment map has off-diagonal gain %.3e, which T and V ignore.", cross)

    vacuum = vacuum_covariance()
    vacuum_out = m @ vacuum @ m.T + outcome.noise
    report = MetricsReport(
        conditional_variance=cond_var_product(var_x, var_p),
        signal_transfer=signal_transfer(g_x, g_p, var_x, var_p),
        fidelity=min(fidelity_gaussian(vacuum, vacuum_out), 1.0),
        photon_noise=photon_noise(outcome.noise),
    )
    logger.debug("Metrics for g=%.6g: %s", config.g, report.model_dump())
    return report
