"""Registry of executable invariants, run by the check command.

Each check returns a list of failure descriptions; an empty list means the invariant holds.
"""

import logging
import math
from collections.abc import Callable
from typing import NamedTuple

import numpy as np
from pydantic import ValidationError

from cv_teleportation_lab.exceptions import LabError, YSingularError
from cv_teleportation_lab.metrics import (
    bk_fidelity,
    evaluate_metrics,
    fidelity_coherent,
    fidelity_gaussian,
    fidelity_qnd,
    fidelity_uncorrelated,
    hk_fidelity,
    improved_fidelity,
)
from cv_teleportation_lab.models import (
    BeamSplitterBell,
    GainObjective,
    InvariantResult,
    MatrixBell,
    ProtocolConfig,
    QNDBell,
    ScalarGain,
    SearchConfigModel,
    ToleranceConfigModel,
    UnityGain,
)
from cv_teleportation_lab.optimize import (
    central_gradient,
    effective_gprime,
    gain_objective,
    gains_max_t,
    gains_min_v,
    hessian_at_minimum,
    improved_squeezers,
    noise_bloch_messiah,
    noise_standard_form,
    optimal_gprime,
    optimal_gprime_fidelity,
    optimal_gprime_transfer,
    optimal_local_ops,
    oracle_gain_search,
    oracle_local_ops_search,
    quantum_threshold,
    squeezer_for_gprime,
    t_max,
    t_v_min,
    v_min,
    v_t_max,
)
from cv_teleportation_lab.protocol_engine import (
    added_noise_qnd_scalar,
    bell_matrix,
    epr_noise_matrix,
    epr_variance,
    extract_yz,
    gain_matrix,
    local_transform,
    run_protocol,
    shared_state_qnd,
    sigma_matrix,
)
from cv_teleportation_lab.symplectic_core import (
    SIGMA_3,
    beamsplitter_from_ratio,
    bloch_messiah_2x2,
    compose_bloch_messiah,
    direct_sum,
    make_beamsplitter,
    make_bell_qnd,
    make_phase,
    make_qnd,
    make_squeezer,
    norm_scaled_tolerance,
    propagate,
    random_symplectic_2x2,
    symplectic_deviation,
    two_mode_standard_form,
    validate_covariance,
)

logger = logging.getLogger(__name__)

# Parameter grids shared by the checks
G_VALUES = (0.5, 1.0, 2.5)
G_PRIME_VALUES = (0.7, 1.0, 1.64)
RATIOS = (0.5, 1.0, 4 / 3, 2.0)
KAPPAS = (0.0, 0.25, 0.5, 1.0)
# Failures reported in full before the rest are counted
MAX_REPORTED_FAILURES = 5
# Smallest |det Y| / ||Y||^2 of the random interactions used for the Sigma check
SIGMA_CONDITIONING = 1e-3
# Largest squeezing of random covariance-matrix transforms
COVARIANCE_SQUEEZE_BOUND = 1.0
LOCAL_OPS_MINIMUM_TOL = 1e-3
MINIMALITY_TRIALS = 50


class CheckContext(NamedTuple):
    """Tolerances and search settings handed to every check."""

    tolerances: ToleranceConfigModel
    search: SearchConfigModel


CheckFunction = Callable[[CheckContext], list[str]]


class Invariant(NamedTuple):
    """A registered invariant."""

    identifier: str
    check: CheckFunction

    @property
    def module(self) -> str:
        """Module the invariant belongs to."""
        return self.identifier.partition(".")[0]


REGISTRY: list[Invariant] = []


def invariant(identifier: str) -> Callable[[CheckFunction], CheckFunction]:
    """Register a check under a "module.name" identifier.

    :param str identifier: Unique identifier of the invariant
    :return Callable: Decorator registering the check
    :raise ValueError: If the identifier is already registered
    """

    def register(check: CheckFunction) -> CheckFunction:
        if any(entry.identifier == identifier for entry in REGISTRY):
            msg = f"Invariant {identifier} is already registered."
            raise ValueError(msg)
        REGISTRY.append(Invariant(identifier, check))
        return check

    return register


def _deviation(actual: np.ndarray | float, expected: np.ndarray | float) -> float:
    return float(np.max(np.abs(np.asarray(actual) - np.asarray(expected))))


def _qnd_config(g: float, g_prime: float, **kwargs: object) -> ProtocolConfig:
    return ProtocolConfig(g=g, bell=QNDBell(g_prime=g_prime), **kwargs)


def _scalar_gains(g_x: float, g_p: float) -> ScalarGain:
    return ScalarGain(g_x=g_x, g_p=g_p)


def _pure_pair(kappa: float) -> tuple[float, float]:
    return math.cosh(2 * kappa) / 2, math.sinh(2 * kappa) / 2


def _tms_pattern(a: float, c: float) -> np.ndarray:
    return np.block([[a * np.eye(2), np.diag([-c, c])], [np.diag([-c, c]), a * np.eye(2)]])


# symplectic_core
@invariant("symplectic_core.constructors_symplectic")
def check_constructors_symplectic(context: CheckContext) -> list[str]:
    """Every constructor returns a symplectic matrix."""
    matrices = {
        "S(0.7)": make_squeezer(0.7),
        "S(ln 2)": make_squeezer(math.log(2)),
        "P(1.1)": make_phase(1.1),
        "QND(0.5)": make_qnd(0.5),
        "QND(2.5)": make_qnd(2.5),
        "Bell QND(4/3)": make_bell_qnd(4 / 3),
        "BS(3/5, 4/5)": make_beamsplitter(0.6, 0.8),
        "BS(ratio 1)": make_beamsplitter(*beamsplitter_from_ratio(1.0)),
    }
    failures = []
    for name, matrix in matrices.items():
        deviation = symplectic_deviation(matrix)
        if deviation > context.tolerances.symplectic:
            failures.append(f"{name}: symplectic deviation {deviation:.3e}")
    return failures


@invariant("symplectic_core.bloch_messiah_round_trip")
def check_bloch_messiah_round_trip(context: CheckContext) -> list[str]:
    """Random single-mode symplectics are rebuilt from their decomposition."""
    rng = np.random.default_rng(context.search.seed)
    failures = []
    for trial in range(context.search.random_trials):
        matrix = random_symplectic_2x2(rng, context.search.squeeze_bound)
        factors = bloch_messiah_2x2(matrix, norm_scaled_tolerance(matrix, context.tolerances.symplectic))
        error = _deviation(compose_bloch_messiah(factors), matrix)
        if error > context.tolerances.reconstruction:
            failures.append(f"trial {trial}: reconstruction error {error:.3e}")
        if not -math.pi / 2 < factors.alpha <= math.pi / 2:
            failures.append(f"trial {trial}: alpha {factors.alpha} outside (-pi/2, pi/2]")
    return failures


@invariant("symplectic_core.standard_form_qnd_family")
def check_standard_form_qnd_family(context: CheckContext) -> list[str]:
    """QND-entangled vacua reduce to the two-mode squeezed pattern with e^(-2 kappa) = sqrt(1 + g^2) - g."""
    failures = []
    for g in (0.1, *G_VALUES, 5.0):
        result = two_mode_standard_form(shared_state_qnd(g), context.tolerances.pure_state)
        a, c = result.a, result.c
        if (error := _deviation(result.v_tms, _tms_pattern(a, c))) > context.tolerances.pure_state:
            failures.append(f"g={g}: standard-form pattern error {error:.3e}")
        if (error := abs(a**2 - c**2 - 0.25)) > context.tolerances.reconstruction:
            failures.append(f"g={g}: a^2 - c^2 - 1/4 = {error:.3e}")
        expected = math.sqrt(1 + g**2) - g
        if (error := abs(math.exp(-2 * result.kappa) - expected)) > context.tolerances.pipeline:
            failures.append(f"g={g}: e^(-2 kappa) off by {error:.3e}")
    return failures


@invariant("symplectic_core.standard_form_local_invariance")
def check_standard_form_local_invariance(context: CheckContext) -> list[str]:
    """Random local symplectics on QND and TMS states leave the standard form and (a, c) unchanged."""
    rng = np.random.default_rng(context.search.seed)
    states = [shared_state_qnd(g) for g in G_VALUES] + [_tms_pattern(*_pure_pair(kappa)) for kappa in KAPPAS[1:]]
    references = [two_mode_standard_form(state) for state in states]
    failures = []
    for trial in range(context.search.random_trials):
        reference = references[trial % len(states)]
        local = direct_sum(
            random_symplectic_2x2(rng, COVARIANCE_SQUEEZE_BOUND), random_symplectic_2x2(rng, COVARIANCE_SQUEEZE_BOUND)
        )
        covariance = propagate(states[trial % len(states)], local)
        tol = norm_scaled_tolerance(covariance, context.tolerances.pure_state)
        result = two_mode_standard_form(covariance)
        expected = _tms_pattern(reference.a, reference.c)
        if (error := _deviation(result.v_tms, _tms_pattern(result.a, result.c))) > tol:
            failures.append(f"trial {trial}: standard-form pattern error {error:.3e}")
        if (error := _deviation(propagate(covariance, direct_sum(result.m_a, result.m_b)), expected)) > tol:
            failures.append(f"trial {trial}: M V M^T misses the reference form by {error:.3e}")
        if (error := _deviation([result.a, result.c], [reference.a, reference.c])) > tol:
            failures.append(f"trial {trial}: (a, c) moved by {error:.3e}")
    return failures


@invariant("symplectic_core.uncertainty_preserved")
def check_uncertainty_preserved(context: CheckContext) -> list[str]:
    """Symplectic transforms of the vacuum satisfy the uncertainty principle."""
    rng = np.random.default_rng(context.search.seed)
    vacuum = 0.5 * np.eye(4)
    failures = []
    for trial in range(context.search.random_trials):
        local = direct_sum(
            random_symplectic_2x2(rng, COVARIANCE_SQUEEZE_BOUND), random_symplectic_2x2(rng, COVARIANCE_SQUEEZE_BOUND)
        )
        transform = local @ make_qnd(float(rng.uniform(0, 1))) @ make_bell_qnd(float(rng.uniform(0.1, 1)))
        try:
            validate_covariance(propagate(vacuum, transform), context.tolerances.uncertainty)
        except LabError as error:
            failures.append(f"trial {trial}: {error}")
    return failures


@invariant("symplectic_core.beamsplitter_qnd_equivalence")
def check_beamsplitter_qnd_equivalence(context: CheckContext) -> list[str]:
    """A beam splitter with R/T = g' has the Y^-1 Z of the QND Bell coupling g'."""
    failures = []
    for ratio in RATIOS:
        y_bs, z_bs = extract_yz(make_beamsplitter(*beamsplitter_from_ratio(ratio)))
        y_qnd, z_qnd = extract_yz(make_bell_qnd(ratio))
        error = _deviation(np.linalg.solve(y_bs, z_bs), np.linalg.solve(y_qnd, z_qnd))
        if error > context.tolerances.equivalence:
            failures.append(f"R/T={ratio}: Y^-1 Z differs by {error:.3e}")
    return failures


# protocol_engine
@invariant("protocol_engine.scalar_matrix_agreement")
def check_scalar_matrix_agreement(context: CheckContext) -> list[str]:
    """The matrix pipeline reproduces the scalar QND noise formulas."""
    failures = []
    for g in (0.1, 1.0, 2.5):
        for g_prime in (0.5, 1.0, 4 / 3, 2.0):
            for gains in ((1.0, 1.0), gains_min_v(g, g_prime), gains_max_t(g, g_prime)):
                config = _qnd_config(g, g_prime, gains=_scalar_gains(*gains))
                noise = run_protocol(config, tolerances=context.tolerances).noise
                expected = added_noise_qnd_scalar(g, g_prime, *gains)
                error = _deviation(np.diag(noise), expected)
                if error > context.tolerances.equivalence * max(1.0, max(expected)):
                    failures.append(f"g={g}, g'={g_prime}, gains={gains}: diagonal differs by {error:.3e}")
                if (error := abs(float(noise[0, 1]))) > context.tolerances.equivalence:
                    failures.append(f"g={g}, g'={g_prime}, gains={gains}: correlation {error:.3e}")
    return failures


@invariant("protocol_engine.bs_qnd_noise_equivalence")
def check_bs_qnd_noise_equivalence(context: CheckContext) -> list[str]:
    """Beam splitter and QND Bell measurements with R/T = g' add the same noise."""
    failures = []
    for g in G_VALUES:
        for ratio in RATIOS:
            t, r = beamsplitter_from_ratio(ratio)
            bs = ProtocolConfig(g=g, bell=BeamSplitterBell(transmissivity=t, reflectivity=r))
            noise_bs = run_protocol(bs, tolerances=context.tolerances).noise
            noise_qnd = run_protocol(_qnd_config(g, ratio), tolerances=context.tolerances).noise
            if (error := _deviation(noise_bs, noise_qnd)) > context.tolerances.equivalence * max(
                1.0, float(np.max(noise_qnd))
            ):
                failures.append(f"g={g}, R/T={ratio}: noise matrices differ by {error:.3e}")
    return failures


@invariant("protocol_engine.bs_completion_independent")
def check_bs_completion_independent(context: CheckContext) -> list[str]:
    """The undetected rows of the Bell interaction do not affect the noise."""
    t, r = beamsplitter_from_ratio(4 / 3)
    beamsplitter = make_beamsplitter(t, r)
    failures = []
    for shear_a, shear_in in ((0.3, -0.7), (1.5, 2.0)):
        shear = direct_sum(np.array([[1.0, shear_a], [0.0, 1.0]]), np.array([[1.0, 0.0], [shear_in, 1.0]]))
        completed = ProtocolConfig(g=1.0, bell=MatrixBell(matrix=shear @ beamsplitter))
        reference = ProtocolConfig(g=1.0, bell=BeamSplitterBell(transmissivity=t, reflectivity=r))
        error = _deviation(
            run_protocol(completed, tolerances=context.tolerances).noise,
            run_protocol(reference, tolerances=context.tolerances).noise,
        )
        if error > context.tolerances.equivalence:
            failures.append(f"shears ({shear_a}, {shear_in}): noise differs by {error:.3e}")
    return failures


@invariant("protocol_engine.unity_first_moments")
def check_unity_first_moments(context: CheckContext) -> list[str]:
    """Unity gain reproduces the input first moments."""
    t, r = beamsplitter_from_ratio(0.8)
    s_a, s_b = improved_squeezers(1.0, 1.0)
    configs = {
        "QND": _qnd_config(1.0, 4 / 3),
        "BS": ProtocolConfig(g=2.5, bell=BeamSplitterBell(transmissivity=t, reflectivity=r)),
        "squeezers": _qnd_config(1.0, 1.0, s_a=s_a, s_b=s_b),
    }
    failures = []
    for name, config in configs.items():
        outcome = run_protocol(config, tolerances=context.tolerances)
        if not np.array_equal(outcome.first_moment_map, np.eye(2)):
            failures.append(f"{name}: first-moment map is not the identity")
        y, _ = extract_yz(bell_matrix(config.bell))
        if (error := _deviation(gain_matrix(y, UnityGain()) @ y, np.eye(2))) > context.tolerances.pipeline:
            failures.append(f"{name}: G Y differs from I by {error:.3e}")
    return failures


@invariant("protocol_engine.noise_psd")
def check_noise_psd(context: CheckContext) -> list[str]:
    """The added-noise matrix is symmetric positive semidefinite."""
    failures = []
    for g in (0.0, *G_VALUES):
        for g_prime in (0.5, 1.0, 2.0):
            policies = [UnityGain()]
            if g > 0:
                policies += [_scalar_gains(*gains_min_v(g, g_prime)), _scalar_gains(*gains_max_t(g, g_prime))]
            for policy in policies:
                noise = run_protocol(_qnd_config(g, g_prime, gains=policy), tolerances=context.tolerances).noise
                if not np.array_equal(noise, noise.T):
                    failures.append(f"g={g}, g'={g_prime}, {policy.kind}: 2N is not symmetric")
                if (lowest := float(np.linalg.eigvalsh(noise)[0])) < -context.tolerances.uncertainty:
                    failures.append(f"g={g}, g'={g_prime}, {policy.kind}: eigenvalue {lowest:.3e}")
    return failures


@invariant("protocol_engine.sigma_compensation")
def check_sigma_compensation(context: CheckContext) -> list[str]:
    """With S_A = Sigma^-1 the added noise is the EPR noise of Bob's transformed state."""
    s_b = make_squeezer(0.3) @ make_phase(0.4)
    t, r = beamsplitter_from_ratio(1.3)
    bells = {"QND(0.7)": QNDBell(g_prime=0.7), "QND(1.64)": QNDBell(g_prime=1.64)}
    bells["BS(1.3)"] = BeamSplitterBell(transmissivity=t, reflectivity=r)
    failures = []
    for g in G_VALUES:
        for name, bell in bells.items():
            sigma = sigma_matrix(*extract_yz(bell_matrix(bell)))
            config = ProtocolConfig(g=g, bell=bell, s_a=np.linalg.inv(sigma), s_b=s_b)
            noise = run_protocol(config, tolerances=context.tolerances).noise
            expected = epr_noise_matrix(local_transform(shared_state_qnd(g), s_b))
            if (error := _deviation(noise, expected)) > context.tolerances.pipeline:
                failures.append(f"g={g}, {name}: noise differs from the EPR noise by {error:.3e}")
    return failures


@invariant("protocol_engine.sigma_symplectic")
def check_sigma_symplectic(context: CheckContext) -> list[str]:
    """Sigma = sigma_3 Y^-1 Z is symplectic for every symplectic Bell interaction with regular Y."""
    rng = np.random.default_rng(context.search.seed)
    failures = []
    checked = 0
    for trial in range(context.search.random_trials):
        t = float(rng.uniform(0.2, 0.98))
        r_matrix = (
            direct_sum(random_symplectic_2x2(rng, 1.0), random_symplectic_2x2(rng, 1.0))
            @ make_beamsplitter(t, math.sqrt(1 - t**2))
            @ make_bell_qnd(float(rng.uniform(-1.0, 1.0)))
            @ direct_sum(random_symplectic_2x2(rng, 1.0), random_symplectic_2x2(rng, 1.0))
        )
        try:
            y, z = extract_yz(r_matrix, SIGMA_CONDITIONING)
        except YSingularError:
            continue
        checked += 1
        sigma = sigma_matrix(y, z)
        deviation = symplectic_deviation(sigma)
        if deviation > norm_scaled_tolerance(sigma, context.tolerances.reconstruction):
            failures.append(f"trial {trial}: Sigma symplectic deviation {deviation:.3e}")
    logger.debug("Sigma symplecticity checked on %d of %d interactions", checked, context.search.random_trials)
    if checked == 0:
        failures.append("no well-conditioned interaction was drawn")
    return failures


# metrics
@invariant("metrics.fidelity_consistency")
def check_fidelity_consistency(context: CheckContext) -> list[str]:
    """The uncorrelated-noise fidelity agrees with the general Gaussian overlap."""
    failures = []
    for g in G_VALUES:
        for g_prime in G_PRIME_VALUES:
            noise = run_protocol(_qnd_config(g, g_prime), tolerances=context.tolerances).noise
            vacuum = 0.5 * np.eye(2)
            general = fidelity_gaussian(vacuum, vacuum + noise)
            uncorrelated = fidelity_uncorrelated(float(noise[0, 0]), float(noise[1, 1]))
            if (error := abs(general - uncorrelated)) > context.tolerances.equivalence:
                failures.append(f"g={g}, g'={g_prime}: fidelities differ by {error:.3e}")
    return failures


@invariant("metrics.coherent_formula")
def check_coherent_formula(context: CheckContext) -> list[str]:
    """The coherent-state fidelity formula matches the Gaussian overlap for random noise matrices."""
    rng = np.random.default_rng(context.search.seed)
    vacuum = 0.5 * np.eye(2)
    failures = []
    for trial in range(context.search.random_trials):
        factor = rng.normal(size=(2, 2))
        noise = factor @ factor.T
        error = abs(fidelity_coherent(noise) - fidelity_gaussian(vacuum, vacuum + noise))
        if error > context.tolerances.equivalence:
            failures.append(f"trial {trial}: fidelities differ by {error:.3e}")
    return failures


@invariant("metrics.g_plus_one_witness")
def check_g_plus_one_witness(context: CheckContext) -> list[str]:
    """For every g > 0 the Bell constant g' = g + 1 beats the classical fidelity 1/2."""
    failures = []
    for g in (0.01, 0.1, 0.5, 1.0, 2.0):
        fidelity = evaluate_metrics(_qnd_config(g, g + 1), context.tolerances).fidelity
        if fidelity <= 0.5:  # noqa: PLR2004
            failures.append(f"g={g}: F(g, g + 1) = {fidelity:.9g} <= 1/2")
        if (error := abs(fidelity - fidelity_qnd(g, g + 1))) > context.tolerances.pipeline:
            failures.append(f"g={g}: pipeline and closed-form fidelity differ by {error:.3e}")
    return failures


@invariant("metrics.classical_bound")
def check_classical_bound(context: CheckContext) -> list[str]:
    """Without entanglement no gains reach V < 1/4."""
    grid = np.geomspace(*context.search.gain_bounds, context.search.grid_points)
    failures = []
    for g_prime in (0.5, 1.0, 2.0):
        lowest = min(
            math.prod(added_noise_qnd_scalar(0.0, g_prime, float(g_x), float(g_p)))
            for g_x in grid
            for g_p in grid
        )
        if lowest < 0.25:  # noqa: PLR2004
            failures.append(f"g=0, g'={g_prime}: V = {lowest:.9g} below 1/4")
    return failures


@invariant("metrics.quantum_threshold_witness")
def check_quantum_threshold_witness(context: CheckContext) -> list[str]:
    """At the T-maximizing gains V < 1/4 exactly above the quantum threshold."""
    threshold = quantum_threshold()
    failures = []
    if (error := abs(v_t_max(threshold) - 0.25)) > context.tolerances.closed_form:
        failures.append(f"V_T_max at the threshold differs from 1/4 by {error:.3e}")
    for g in (0.5, 1.0, 1.27, 1.28, 1.5, 2.5):
        config = _qnd_config(g, 1.0, gains=_scalar_gains(*gains_max_t(g, 1.0)))
        quantum = evaluate_metrics(config, context.tolerances).conditional_variance < 0.25  # noqa: PLR2004
        if quantum != (g > threshold):
            failures.append(f"g={g}: V < 1/4 is {quantum} on the wrong side of g* = {threshold:.9g}")
    return failures


@invariant("metrics.range_checks")
def check_range_checks(context: CheckContext) -> list[str]:
    """V, T and F stay within their physical ranges."""
    failures = []
    for g in (0.0, *G_VALUES):
        for g_prime in G_PRIME_VALUES:
            policies = [UnityGain()]
            if g > 0:
                policies += [_scalar_gains(*gains_min_v(g, g_prime)), _scalar_gains(*gains_max_t(g, g_prime))]
            for policy in policies:
                try:
                    report = evaluate_metrics(_qnd_config(g, g_prime, gains=policy), context.tolerances)
                except ValidationError as error:
                    failures.append(f"g={g}, g'={g_prime}, {policy.kind}: {error.errors()[0]['msg']}")
                    continue
                if report.signal_transfer <= 0:
                    failures.append(f"g={g}, g'={g_prime}, {policy.kind}: T = {report.signal_transfer}")
    return failures


@invariant("metrics.fidelity_argmax_shift")
def check_fidelity_argmax_shift(context: CheckContext) -> list[str]:
    """At g = 1 the fidelity peaks at g' = 4/3, not at the symmetric g' = g."""
    failures = []
    shifted = evaluate_metrics(_qnd_config(1.0, 4 / 3), context.tolerances).fidelity
    symmetric = evaluate_metrics(_qnd_config(1.0, 1.0), context.tolerances).fidelity
    if shifted <= symmetric:
        failures.append(f"F(1, 4/3) = {shifted:.9g} does not exceed F(1, 1) = {symmetric:.9g}")
    argmax = optimal_gprime_fidelity(1.0, context.search).parameters["g_prime"]
    if (error := abs(argmax - 4 / 3)) > context.tolerances.oracle_parameter:
        failures.append(f"argmax g' = {argmax:.9g} off 4/3 by {error:.3e}")
    return failures


@invariant("metrics.closed_form_fidelities")
def check_closed_form_fidelities(context: CheckContext) -> list[str]:
    """The symmetric and squeezed-scheme fidelities match their closed forms."""
    failures = []
    for g in G_VALUES:
        symmetric = evaluate_metrics(_qnd_config(g, g), context.tolerances).fidelity
        if (error := abs(symmetric - hk_fidelity(g))) > context.tolerances.pipeline:
            failures.append(f"g={g}: F(g, g) differs from the closed form by {error:.3e}")
        s_a, s_b = improved_squeezers(g, 1.0)
        squeezed = evaluate_metrics(_qnd_config(g, 1.0, s_a=s_a, s_b=s_b), context.tolerances).fidelity
        kappa = -0.5 * math.log(math.sqrt(1 + g**2) - g)
        for name, expected in (("improved", improved_fidelity(g)), ("two-mode squeezed", bk_fidelity(kappa))):
            if (error := abs(squeezed - expected)) > context.tolerances.pipeline:
                failures.append(f"g={g}: squeezed-scheme F differs from the {name} form by {error:.3e}")
    return failures


# optimize
@invariant("optimize.gain_closed_forms")
def check_gain_closed_forms(context: CheckContext) -> list[str]:
    """Closed-form V and T at the optimal gains agree with the protocol pipeline."""
    failures = []
    for g in G_VALUES:
        for g_prime in G_PRIME_VALUES:
            at_min_v = evaluate_metrics(
                _qnd_config(g, g_prime, gains=_scalar_gains(*gains_min_v(g, g_prime))), context.tolerances
            )
            at_max_t = evaluate_metrics(
                _qnd_config(g, g_prime, gains=_scalar_gains(*gains_max_t(g, g_prime))), context.tolerances
            )
            comparisons = (
                ("V_min", at_min_v.conditional_variance, v_min(g)),
                ("T_V_min", at_min_v.signal_transfer, t_v_min(g, g_prime)),
                ("T_max", at_max_t.signal_transfer, t_max(g, g_prime)),
                ("V_T_max", at_max_t.conditional_variance, v_t_max(g)),
            )
            for name, pipeline, closed in comparisons:
                if (error := abs(pipeline - closed)) > context.tolerances.pipeline:
                    failures.append(f"g={g}, g'={g_prime}: {name} differs by {error:.3e}")
    return failures


@invariant("optimize.gain_oracles")
def check_gain_oracles(context: CheckContext) -> list[str]:
    """Grid and Nelder-Mead searches find the closed-form optimal gains."""
    failures = []
    for g in G_VALUES:
        for g_prime in G_PRIME_VALUES:
            for objective in GainObjective:
                result = oracle_gain_search(g, g_prime, objective, context.search)
                if result.parameter_residual > context.tolerances.oracle_parameter:
                    failures.append(f"g={g}, g'={g_prime}, {objective}: gains off by {result.parameter_residual:.3e}")
                if result.residual > context.tolerances.oracle_objective:
                    failures.append(f"g={g}, g'={g_prime}, {objective}: objective off by {result.residual:.3e}")
    return failures


@invariant("optimize.stationarity_gains")
def check_stationarity_gains(context: CheckContext) -> list[str]:
    """V and T are stationary in (G_x, G_p) at their closed-form optima."""
    failures = []
    step = context.search.finite_difference_step
    for g in G_VALUES:
        for g_prime in G_PRIME_VALUES:
            for objective, gains in (
                (GainObjective.MIN_V, gains_min_v(g, g_prime)),
                (GainObjective.MAX_T, gains_max_t(g, g_prime)),
            ):
                objective_function = gain_objective(g, g_prime, objective)

                def evaluate(point: np.ndarray, function: Callable = objective_function) -> float:
                    return function(float(point[0]), float(point[1]))

                gradient = float(np.max(np.abs(central_gradient(evaluate, gains, step))))
                if gradient > context.tolerances.stationarity:
                    failures.append(f"g={g}, g'={g_prime}, {objective}: gradient {gradient:.3e}")
    return failures


@invariant("optimize.stationarity_gprime")
def check_stationarity_gprime(context: CheckContext) -> list[str]:
    """T_V_min and T_max are stationary in g' at g'_opt = (1 + g^2)^(1/4)."""
    failures = []
    step = context.search.finite_difference_step
    for g in G_VALUES:
        g_opt = optimal_gprime(g)
        for name, transfer in (("T_V_min", t_v_min), ("T_max", t_max)):
            gradient = abs((transfer(g, g_opt + step) - transfer(g, g_opt - step)) / (2 * step))
            if gradient > context.tolerances.stationarity:
                failures.append(f"g={g}: d{name}/dg' = {gradient:.3e}")
    return failures


@invariant("optimize.optimal_gprime_agreement")
def check_optimal_gprime_agreement(context: CheckContext) -> list[str]:
    """Golden-section searches over g' locate g'_opt where it is a maximum."""
    cases = [(g, GainObjective.MAX_T) for g in G_VALUES]
    # T_V_min only peaks at g'_opt above the quantum threshold
    cases.append((2.5, GainObjective.MIN_V))
    failures = []
    for g, objective in cases:
        result = optimal_gprime_transfer(g, objective, context.search)
        if result.parameter_residual > context.tolerances.oracle_parameter:
            failures.append(f"g={g}, {objective}: g' off by {result.parameter_residual:.3e}")
    return failures


@invariant("optimize.squeezer_compensation")
def check_squeezer_compensation(context: CheckContext) -> list[str]:
    """Alice's squeezer turns any Bell constant into g'_opt."""
    failures = []
    for g in G_VALUES:
        g_opt = optimal_gprime(g)
        reference = run_protocol(_qnd_config(g, g_opt), tolerances=context.tolerances).noise
        for g_prime in G_PRIME_VALUES:
            s_a = squeezer_for_gprime(g, g_prime)
            noise = run_protocol(_qnd_config(g, g_prime, s_a=s_a), tolerances=context.tolerances).noise
            if (error := _deviation(noise, reference)) > context.tolerances.pipeline:
                failures.append(f"g={g}, g'={g_prime}: noise differs from g'_opt by {error:.3e}")
            r_a = math.log(float(s_a[0, 0]))
            if (error := abs(effective_gprime(g_prime, r_a) - g_opt)) > context.tolerances.pipeline:
                failures.append(f"g={g}, g'={g_prime}: effective g' off by {error:.3e}")
    return failures


@invariant("optimize.improved_squeezers")
def check_improved_squeezers(context: CheckContext) -> list[str]:
    """The improved squeezers give isotropic noise sqrt(1 + g^2) - g for any Bell constant."""
    failures = []
    for g in G_VALUES:
        expected = math.sqrt(1 + g**2) - g
        for g_prime in G_PRIME_VALUES:
            s_a, s_b = improved_squeezers(g, g_prime)
            noise = run_protocol(_qnd_config(g, g_prime, s_a=s_a, s_b=s_b), tolerances=context.tolerances).noise
            if (error := _deviation(noise, expected * np.eye(2))) > context.tolerances.pipeline:
                failures.append(f"g={g}, g'={g_prime}: noise differs from the isotropic form by {error:.3e}")
    return failures


@invariant("optimize.optimal_local_ops_pipeline")
def check_optimal_local_ops_pipeline(context: CheckContext) -> list[str]:
    """The optimal local operations reach the isotropic minimum 2(a - c) = e^(-2 kappa)."""
    t, r = beamsplitter_from_ratio(4 / 3)
    failures = []
    for g in G_VALUES:
        state = shared_state_qnd(g)
        bells = {f"QND({g_prime})": QNDBell(g_prime=g_prime) for g_prime in G_PRIME_VALUES}
        bells["BS(4/3)"] = BeamSplitterBell(transmissivity=t, reflectivity=r)
        for name, bell in bells.items():
            ops = optimal_local_ops(
                state, bell_matrix(bell), context.tolerances.y_regularity, context.tolerances.pure_state
            )
            config = ProtocolConfig(g=g, bell=bell, s_a=ops.s_a, s_b=ops.s_b)
            noise = run_protocol(config, tolerances=context.tolerances).noise
            if (error := _deviation(noise, ops.photon_noise * np.eye(2))) > context.tolerances.pipeline:
                failures.append(f"g={g}, {name}: noise is not isotropic at the minimum ({error:.3e})")
            if (error := abs(ops.photon_noise - (math.sqrt(1 + g**2) - g))) > context.tolerances.pipeline:
                failures.append(f"g={g}, {name}: minimum differs from e^(-2 kappa) by {error:.3e}")
    return failures


@invariant("optimize.local_ops_oracle")
def check_local_ops_oracle(context: CheckContext) -> list[str]:
    """A multi-start search over six Bloch-Messiah parameters finds no noise below 2(a - c)."""
    failures = []
    for kappa in KAPPAS:
        a, c = _pure_pair(kappa)
        result = oracle_local_ops_search(a, c, context.search)
        if result.residual > context.tolerances.oracle_local_ops:
            failures.append(f"kappa={kappa}: minimum off 2(a - c) by {result.residual:.3e}")
        for name in ("r_a", "r_b"):
            if abs(result.parameters[name]) > LOCAL_OPS_MINIMUM_TOL:
                failures.append(f"kappa={kappa}: {name} = {result.parameters[name]:.3e} at the minimum")
        if kappa > 0 and abs(result.parameters["theta_plus"]) > LOCAL_OPS_MINIMUM_TOL:
            failures.append(f"kappa={kappa}: theta_+ = {result.parameters['theta_plus']:.3e} at the minimum")
    return failures


@invariant("optimize.noise_forms")
def check_noise_forms(context: CheckContext) -> list[str]:
    """The trace and the sum-difference forms of the photon noise agree."""
    rng = np.random.default_rng(context.search.seed)
    failures = []
    for trial in range(context.search.random_trials):
        a, c = _pure_pair(float(rng.uniform(0, 1)))
        r_a, r_b = rng.uniform(-1, 1, size=2)
        alpha, beta, gamma, delta = rng.uniform(-math.pi, math.pi, size=4)
        s_tilde = make_phase(alpha) @ make_squeezer(r_a) @ make_phase(beta)
        s_b = make_phase(gamma) @ make_squeezer(r_b) @ make_phase(delta)
        s_a = SIGMA_3 @ s_tilde @ SIGMA_3
        trace_form = noise_standard_form(a, c, s_a, s_b, context.tolerances.pure_state)
        sum_form = noise_bloch_messiah(
            a, c, r_a + r_b, r_a - r_b, alpha + beta - gamma - delta, alpha - beta - gamma + delta
        )
        if (error := abs(trace_form - sum_form)) > context.tolerances.pipeline * max(1.0, abs(trace_form)):
            failures.append(f"trial {trial}: noise forms differ by {error:.3e}")
    return failures


@invariant("optimize.hessian_positive")
def check_hessian_positive(context: CheckContext) -> list[str]:
    """The noise is a strict minimum in (r_+, theta_+) with Hessian diag(2(2a - c), 2c)."""
    step = math.sqrt(context.search.finite_difference_step)
    failures = []
    for kappa in KAPPAS[1:]:
        a, c = _pure_pair(kappa)
        expected = hessian_at_minimum(a, c)
        if not (expected[0, 0] > 0 and expected[1, 1] > 0):
            failures.append(f"kappa={kappa}: Hessian {expected.tolist()} is not positive definite")

        def reduced(r: float, theta: float, a: float = a, c: float = c) -> float:
            return noise_bloch_messiah(a, c, r, r, theta, 0.0)

        centre = reduced(0.0, 0.0)
        numeric = np.array(
            [
                [(reduced(step, 0) - 2 * centre + reduced(-step, 0)) / step**2, 0.0],
                [0.0, (reduced(0, step) - 2 * centre + reduced(0, -step)) / step**2],
            ]
        )
        numeric[0, 1] = numeric[1, 0] = (
            reduced(step, step) - reduced(step, -step) - reduced(-step, step) + reduced(-step, -step)
        ) / (4 * step**2)
        if (error := _deviation(numeric, expected)) > context.tolerances.hessian:
            failures.append(f"kappa={kappa}: finite-difference Hessian differs by {error:.3e}")
    return failures


@invariant("optimize.tms_minimality")
def check_tms_minimality(context: CheckContext) -> list[str]:
    """No local operation lowers the EPR variance of the standard form below e^(-2 kappa)."""
    rng = np.random.default_rng(context.search.seed)
    failures = []
    for g in G_VALUES:
        result = two_mode_standard_form(shared_state_qnd(g), context.tolerances.pure_state)
        floor = math.exp(-2 * result.kappa)
        if (error := abs(epr_variance(result.v_tms) - floor)) > context.tolerances.pipeline:
            failures.append(f"g={g}: standard-form EPR variance off e^(-2 kappa) by {error:.3e}")
        for trial in range(MINIMALITY_TRIALS):
            local = direct_sum(
                random_symplectic_2x2(rng, context.search.squeeze_bound),
                random_symplectic_2x2(rng, context.search.squeeze_bound),
            )
            variance = epr_variance(propagate(result.v_tms, local))
            if variance < floor - context.tolerances.tms_minimality:
                failures.append(f"g={g}, trial {trial}: EPR variance {variance:.12g} below {floor:.12g}")
    return failures


def run_invariants(
    tolerances: ToleranceConfigModel | None = None, search: SearchConfigModel | None = None
) -> list[InvariantResult]:
    """Run every registered invariant.

    A check that raises a lab error or a validation error counts as failed.

    :param ToleranceConfigModel | None tolerances: Tolerances, defaults when omitted
    :param SearchConfigModel | None search: Search settings, defaults when omitted
    :return list[InvariantResult]: One result per invariant, in registration order
    """
    context = CheckContext(tolerances or ToleranceConfigModel(), search or SearchConfigModel())
    results = []
    for entry in REGISTRY:
        try:
            failures = entry.check(context)
        except (LabError, ValidationError) as error:
            failures = [f"{type(error).__name__}: {error}"]

        detail = "; ".join(failures[:MAX_REPORTED_FAILURES])
        if len(failures) > MAX_REPORTED_FAILURES:
            detail += f"; {len(failures) - MAX_REPORTED_FAILURES} more"
        if failures:
            logger.error("Invariant %s failed: %s", entry.identifier, detail)
        else:
            logger.info("Invariant %s passed", entry.identifier)
        results.append(
            InvariantResult(identifier=entry.identifier, module=entry.module, passed=not failures, detail=detail)
        )
    return results
