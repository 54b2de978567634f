"""Derivative-free numeric oracles verifying the closed-form optima."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize, minimize_scalar

from cv_teleportation_lab.metrics import cond_var_product, fidelity_qnd, signal_transfer
from cv_teleportation_lab.models import GainObjective, OptimizationMethod, OptimumResult, SearchConfigModel
from cv_teleportation_lab.optimize.closed_form import (
    gains_max_t,
    gains_min_v,
    noise_standard_form,
    optimal_gprime,
)
from cv_teleportation_lab.protocol_engine import added_noise_qnd_scalar
from cv_teleportation_lab.symplectic_core import SIGMA_3, make_phase, make_squeezer

logger = logging.getLogger(__name__)

NELDER_MEAD_OPTIONS = {"xatol": 1e-10, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000}
# Minimizers of the photon noise form a manifold, so only the objective spread decides convergence
LOCAL_OPS_NELDER_MEAD_OPTIONS = {"xatol": math.inf, "fatol": 1e-14, "maxiter": 20000, "maxfev": 20000}
LOCAL_OPS_PARAMETERS = ("r_a", "r_b", "alpha", "beta", "gamma", "delta")


def central_gradient(
    func: Callable[[npt.NDArray[np.float64]], float], point: Sequence[float], step: float
) -> npt.NDArray[np.float64]:
    """Central finite-difference gradient.

    :param Callable func: Scalar function of a vector
    :param Sequence[float] point: Evaluation point
    :param float step: Difference step
    :return NDArray: The gradient estimate
    """
    x = np.asarray(point, dtype=np.float64)
    gradient = np.empty_like(x)
    for index in range(x.size):
        offset = np.zeros_like(x)
        offset[index] = step
        gradient[index] = (func(x + offset) - func(x - offset)) / (2 * step)
    return gradient


def gain_objective(g: float, g_prime: float, objective: GainObjective) -> Callable[[float, float], float]:
    """Scalar-gain objective to minimize: V, or -T for the transfer objective.

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :param GainObjective objective: Which figure to optimize
    :return Callable: Function of (G_x, G_p)
    """

    def evaluate(g_x: float, g_p: float) -> float:
        var_x, var_p = added_noise_qnd_scalar(g, g_prime, g_x, g_p)
        if objective is GainObjective.MIN_V:
            return cond_var_product(var_x, var_p)
        return -signal_transfer(g_x, g_p, var_x, var_p)

    return evaluate


def oracle_gain_search(
    g: float, g_prime: float, objective: GainObjective, search: SearchConfigModel | None = None
) -> OptimumResult:
    """Locate the optimal scalar gains by a log-spaced grid followed by Nelder-Mead refinement.

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :param GainObjective objective: Minimize V or maximize T
    :param SearchConfigModel | None search: Search settings, defaults when omitted
    :return OptimumResult: Oracle optimum with residuals against the closed form
    """
    search = search or SearchConfigModel()
    evaluate = gain_objective(g, g_prime, objective)
    grid = np.geomspace(*search.gain_bounds, search.grid_points)
    values = np.array([[evaluate(float(g_x), float(g_p)) for g_p in grid] for g_x in grid])
    row, column = np.unravel_index(np.argmin(values), values.shape)
    logger.debug("Gain grid optimum for %s at (%.6g, %.6g)", objective, grid[row], grid[column])

    result = minimize(
        lambda z: evaluate(math.exp(z[0]), math.exp(z[1])),
        x0=np.log([grid[row], grid[column]]),
        method="Nelder-Mead",
        options=NELDER_MEAD_OPTIONS,
    )
    oracle_gains = np.exp(result.x)
    closed_gains = np.array(gains_min_v(g, g_prime) if objective is GainObjective.MIN_V else gains_max_t(g, g_prime))
    sign = 1.0 if objective is GainObjective.MIN_V else -1.0
    return OptimumResult(
        parameters={"g_x": float(oracle_gains[0]), "g_p": float(oracle_gains[1])},
        value=sign * float(result.fun),
        method=OptimizationMethod.NUMERIC_ORACLE,
        residual=abs(float(result.fun) - evaluate(*closed_gains)),
        parameter_residual=float(np.max(np.abs(oracle_gains - closed_gains))),
    )


def _golden_minimum(func: Callable[[float], float], bounds: tuple[float, float], points: int, tol: float) -> float:
    """Bracket the minimum of func over log-spaced points and refine it by golden-section search."""
    grid = np.linspace(math.log(bounds[0]), math.log(bounds[1]), points)
    values = [func(math.exp(t)) for t in grid]
    index = int(np.argmin(values))
    if index in (0, points - 1):
        logger.warning("Minimum at the edge of the search interval: %.6g", math.exp(grid[index]))
        return math.exp(float(grid[index]))
    bracket = (grid[index - 1], grid[index], grid[index + 1])
    logger.debug("Golden-section bracket: %s", np.exp(bracket).tolist())
    result = minimize_scalar(lambda t: func(math.exp(t)), bracket=bracket, method="golden", tol=tol)
    return math.exp(float(result.x))


def optimal_gprime_fidelity(g: float, search: SearchConfigModel | None = None) -> OptimumResult:
    """Bell constant maximizing the unity-gain fidelity F(g, g').

    :param float g: Entangling constant
    :param SearchConfigModel | None search: Search settings, defaults when omitted
    :return OptimumResult: Maximizing g' and the fidelity there
    """
    search = search or SearchConfigModel()
    g_prime = _golden_minimum(
        lambda x: -fidelity_qnd(g, x), search.g_prime_bounds, search.grid_points, search.golden_tol
    )
    return OptimumResult(
        parameters={"g_prime": g_prime},
        value=fidelity_qnd(g, g_prime),
        method=OptimizationMethod.NUMERIC_ORACLE,
    )


def _transfer_at_optimal_gains(g: float, g_prime: float, objective: GainObjective) -> float:
    gains = gains_min_v(g, g_prime) if objective is GainObjective.MIN_V else gains_max_t(g, g_prime)
    var_x, var_p = added_noise_qnd_scalar(g, g_prime, *gains)
    return signal_transfer(*gains, var_x, var_p)


def optimal_gprime_transfer(
    g: float, objective: GainObjective, search: SearchConfigModel | None = None
) -> OptimumResult:
    """Bell constant maximizing T at the V-minimizing or the T-maximizing gains.

    Below the quantum threshold g = sqrt((sqrt(5) + 1)/2) the stationary point of T_V_min in g' is a
    minimum and the V-minimizing search runs to the edge of the interval.

    :param float g: Entangling constant
    :param GainObjective objective: Which gain optimum the transfer is evaluated at
    :param SearchConfigModel | None search: Search settings, defaults when omitted
    :return OptimumResult: Maximizing g' with the residual against (1 + g^2)^(1/4)
    """
    search = search or SearchConfigModel()
    g_prime = _golden_minimum(
        lambda x: -_transfer_at_optimal_gains(g, x, objective),
        search.g_prime_bounds,
        search.grid_points,
        search.golden_tol,
    )
    value = _transfer_at_optimal_gains(g, g_prime, objective)
    closed = optimal_gprime(g)
    return OptimumResult(
        parameters={"g_prime": g_prime},
        value=value,
        method=OptimizationMethod.NUMERIC_ORACLE,
        residual=abs(value - _transfer_at_optimal_gains(g, closed, objective)),
        parameter_residual=abs(g_prime - closed),
    )


def local_ops_objective(a: float, c: float) -> Callable[[npt.NDArray[np.float64]], float]:
    """Photon noise of a standard-form state as a function of six Bloch-Messiah parameters.

    :param float a: Local invariant sqrt(det A)
    :param float c: Local invariant sqrt(|det C|)
    :return Callable: Function of (r_A, r_B, alpha, beta, gamma, delta)
    """

    def evaluate(params: npt.NDArray[np.float64]) -> float:
        r_a, r_b, alpha, beta, gamma, delta = (float(value) for value in params)
        s_tilde = make_phase(alpha) @ make_squeezer(r_a) @ make_phase(beta)
        s_b = make_phase(gamma) @ make_squeezer(r_b) @ make_phase(delta)
        return noise_standard_form(a, c, SIGMA_3 @ s_tilde @ SIGMA_3, s_b)

    return evaluate


def oracle_local_ops_search(a: float, c: float, search: SearchConfigModel | None = None) -> OptimumResult:
    """Multi-start Nelder-Mead minimization of the photon noise over local symplectics.

    :param float a: Local invariant sqrt(det A)
    :param float c: Local invariant sqrt(|det C|)
    :param SearchConfigModel | None search: Search settings, defaults when omitted
    :return OptimumResult: Best minimizer, with theta_plus, and the residual against 2(a - c)
    """
    search = search or SearchConfigModel()
    evaluate = local_ops_objective(a, c)
    rng = np.random.default_rng(search.seed)

    best = None
    for start in range(search.local_ops_starts):
        x0 = np.concatenate(
            [
                rng.uniform(-search.squeeze_bound, search.squeeze_bound, size=2),
                rng.uniform(-math.pi, math.pi, size=4),
            ]
        )
        result = minimize(evaluate, x0=x0, method="Nelder-Mead", options=LOCAL_OPS_NELDER_MEAD_OPTIONS)
        logger.debug("Local-operations start %d: %.15g", start, result.fun)
        if best is None or result.fun < best.fun:
            best = result

    parameters = dict(zip(LOCAL_OPS_PARAMETERS, (float(value) for value in best.x), strict=True))
    theta_plus = parameters["alpha"] + parameters["beta"] - parameters["gamma"] - parameters["delta"]
    parameters["theta_plus"] = math.remainder(theta_plus, 2 * math.pi)
    closed = 2 * (a - c)
    logger.info("Local-operations oracle: minimum %.12g vs closed form %.12g", best.fun, closed)
    return OptimumResult(
        parameters=parameters,
        value=float(best.fun),
        method=OptimizationMethod.NUMERIC_ORACLE,
        residual=abs(float(best.fun) - closed),
        seed=search.seed,
    )
