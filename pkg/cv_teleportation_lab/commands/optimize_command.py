"""Closed-form optima side by side with their numeric oracles."""

import json
import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path

from cv_teleportation_lab.commands.base_command import BaseCommand
from cv_teleportation_lab.models import (
    ExitCode,
    GainObjective,
    OptimizationMethod,
    OptimumResult,
    ProtocolConfig,
    SearchConfigModel,
    ToleranceConfigModel,
)
from cv_teleportation_lab.optimize import (
    gains_max_t,
    gains_min_v,
    optimal_gprime,
    optimal_gprime_fidelity,
    optimal_gprime_transfer,
    optimal_local_ops,
    oracle_gain_search,
    oracle_local_ops_search,
    t_max,
    t_max_opt,
    v_min,
)
from cv_teleportation_lab.protocol_engine import shared_state_qnd
from cv_teleportation_lab.reporting import open_output, optimum_table, write_optima_csv
from cv_teleportation_lab.symplectic_core import make_bell_qnd, two_mode_standard_form

logger = logging.getLogger(__name__)


def _closed(parameters: dict[str, float], value: float) -> OptimumResult:
    return OptimumResult(parameters=parameters, value=value, method=OptimizationMethod.CLOSED_FORM)


def collect_optima(
    g: float, g_prime: float, tolerances: ToleranceConfigModel, search: SearchConfigModel
) -> dict[str, OptimumResult]:
    """Closed-form optima at (g, g') and the oracle results verifying them.

    :param float g: Entangling constant
    :param float g_prime: Bell constant
    :param ToleranceConfigModel tolerances: Tolerances of the local-operations optimum
    :param SearchConfigModel search: Oracle settings
    :return dict[str, OptimumResult]: Results keyed by label
    """
    g_x, g_p = gains_min_v(g, g_prime)
    optima = {"gains min V (closed form)": _closed({"g_x": g_x, "g_p": g_p}, v_min(g))}
    optima["gains min V (oracle)"] = oracle_gain_search(g, g_prime, GainObjective.MIN_V, search)

    g_x, g_p = gains_max_t(g, g_prime)
    optima["gains max T (closed form)"] = _closed({"g_x": g_x, "g_p": g_p}, t_max(g, g_prime))
    optima["gains max T (oracle)"] = oracle_gain_search(g, g_prime, GainObjective.MAX_T, search)

    optima["g' max T (closed form)"] = _closed({"g_prime": optimal_gprime(g)}, t_max_opt(g))
    optima["g' max T (oracle)"] = optimal_gprime_transfer(g, GainObjective.MAX_T, search)
    optima["g' max F (oracle)"] = optimal_gprime_fidelity(g, search)

    state = shared_state_qnd(g)
    ops = optimal_local_ops(state, make_bell_qnd(g_prime), tolerances.y_regularity, tolerances.pure_state)
    standard_form = two_mode_standard_form(state, tolerances.pure_state)
    a, c = standard_form.a, standard_form.c
    optima["local ops min N (closed form)"] = _closed({"a": a, "c": c, "kappa": standard_form.kappa}, ops.photon_noise)
    optima["local ops min N (oracle)"] = oracle_local_ops_search(a, c, search)
    return optima


def oracle_failures(optima: dict[str, OptimumResult], tolerances: ToleranceConfigModel) -> list[str]:
    """Labels of oracle results whose residuals exceed the configured tolerances.

    :param dict[str, OptimumResult] optima: Results keyed by label
    :param ToleranceConfigModel tolerances: Tolerances
    :return list[str]: Failing labels
    """
    failures = []
    for label, result in optima.items():
        objective_tol = tolerances.oracle_local_ops if label.startswith("local ops") else tolerances.oracle_objective
        if (result.residual is not None and result.residual > objective_tol) or (
            result.parameter_residual is not None and result.parameter_residual > tolerances.oracle_parameter
        ):
            failures.append(label)
    return failures


class OptimizeCommand(BaseCommand):
    """Report the optimal gains, Bell constant and local operations with their oracle checks."""

    def __init__(self) -> None:
        """Initialize the optimize command."""
        super().__init__(name="optimize", help_text="Compare closed-form optima with numeric oracles")

    def add_arguments(self, parser: ArgumentParser) -> None:
        """Declare the operating point, seed and output arguments."""
        parser.add_argument("--config", type=Path, default=None, help="JSON protocol configuration")
        parser.add_argument("--g", type=float, default=1.0, help="Entangling constant")
        parser.add_argument("--g-prime", type=float, default=1.0, help="Bell constant")
        parser.add_argument("--seed", type=int, default=None, help="Seed of the local-operations search")
        parser.add_argument("--format", choices=("table", "json", "csv"), default="table", help="Output format")
        parser.add_argument("--out", type=Path, default=None, help="Output file (stdout when omitted)")

    def operating_point(self, args: Namespace) -> tuple[float, float]:
        """Entangling and Bell constants from a protocol configuration or from the flags.

        :param Namespace args: Parsed arguments
        :return tuple[float, float]: g and g'
        :raise ValueError: If the configured Bell interaction has no QND constant
        """
        if args.config is None:
            return args.g, args.g_prime
        config = ProtocolConfig.load(args.config)
        if config.g_prime is None:
            msg = "The optimize command needs a Bell interaction with a QND constant g'."
            raise ValueError(msg)
        return config.g, config.g_prime

    def execute(self, args: Namespace) -> ExitCode:
        """Compute the optima and report whether every oracle agrees with its closed form.

        :param Namespace args: Parsed arguments
        :return ExitCode: OK if every oracle agrees, NUMERIC_FAILURE otherwise
        """
        g, g_prime = self.operating_point(args)
        logger.info("Optimizing at g=%.6g, g'=%.6g", g, g_prime)
        tolerances = self.config.tolerances
        optima = collect_optima(g, g_prime, tolerances, self.search_settings(args.seed))

        with open_output(args.out) as stream:
            if args.format == "json":
                document = {label: result.model_dump(mode="json") for label, result in optima.items()}
                json.dump(document, stream, indent=self.config.output.json_indent)
                stream.write("\n")
            elif args.format == "csv":
                write_optima_csv(optima, stream)
            else:
                digits = self.config.output.table_digits
                tables = [optimum_table(label, result, digits) for label, result in optima.items()]
                stream.write("\n\n".join(tables) + "\n")

        if failures := oracle_failures(optima, tolerances):
            logger.error("Oracles disagree with the closed forms: %s", ", ".join(failures))
            return ExitCode.NUMERIC_FAILURE
        return ExitCode.OK
