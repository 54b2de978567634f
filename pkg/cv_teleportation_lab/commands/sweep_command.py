"""Parameter sweeps over the entangling and Bell constants."""

import itertools
import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path

import numpy as np

from cv_teleportation_lab.commands.base_command import BaseCommand
from cv_teleportation_lab.metrics import evaluate_metrics
from cv_teleportation_lab.models import (
    BeamSplitterBell,
    BellInteraction,
    ExitCode,
    GainPolicy,
    MatrixBell,
    ProtocolConfig,
    QNDBell,
    ScalarGain,
    SweepRow,
    SweepSpec,
    ToleranceConfigModel,
    UnityGain,
)
from cv_teleportation_lab.optimize import gains_max_t, gains_min_v, improved_squeezers, optimal_local_ops
from cv_teleportation_lab.protocol_engine import bell_matrix, shared_state_qnd
from cv_teleportation_lab.reporting import open_output, write_csv, write_json
from cv_teleportation_lab.symplectic_core import beamsplitter_from_ratio

logger = logging.getLogger(__name__)


def _bell(spec: SweepSpec, g_prime: float | None) -> BellInteraction:
    match spec.bell:
        case "qnd":
            return QNDBell(g_prime=g_prime)
        case "bs":
            t, r = beamsplitter_from_ratio(g_prime)
            return BeamSplitterBell(transmissivity=t, reflectivity=r)
        case _:
            return MatrixBell(matrix=spec.matrix)


def _gains(spec: SweepSpec, g: float, g_prime: float | None) -> GainPolicy:
    match spec.gains:
        case "unity":
            return UnityGain()
        case "minv":
            g_x, g_p = gains_min_v(g, g_prime)
        case "maxt":
            g_x, g_p = gains_max_t(g, g_prime)
        case _:
            g_x, g_p = spec.g_x, spec.g_p
    return ScalarGain(g_x=g_x, g_p=g_p)


def build_config(spec: SweepSpec, g: float, g_prime: float | None, tolerances: ToleranceConfigModel) -> ProtocolConfig:
    """Protocol configuration of one grid point.

    :param SweepSpec spec: The sweep specification
    :param float g: Entangling constant
    :param float | None g_prime: Bell constant, None for a matrix Bell interaction
    :param ToleranceConfigModel tolerances: Tolerances of the local-operations optimum
    :return ProtocolConfig: The configuration
    """
    bell = _bell(spec, g_prime)
    s_a = s_b = np.eye(2)
    match spec.local_ops:
        case "improved":
            s_a, s_b = improved_squeezers(g, g_prime)
        case "optimal":
            r_matrix = bell_matrix(bell, tolerances.symplectic)
            ops = optimal_local_ops(shared_state_qnd(g), r_matrix, tolerances.y_regularity, tolerances.pure_state)
            s_a, s_b = ops.s_a, ops.s_b
    return ProtocolConfig(g=g, bell=bell, s_a=s_a, s_b=s_b, gains=_gains(spec, g, g_prime))


def run_sweep(spec: SweepSpec, tolerances: ToleranceConfigModel | None = None) -> list[SweepRow]:
    """Evaluate the metrics at every grid point, g outermost.

    A matrix Bell interaction has no Bell constant, so its grid runs over g alone.

    :param SweepSpec spec: The sweep specification
    :param ToleranceConfigModel | None tolerances: Tolerances, defaults when omitted
    :return list[SweepRow]: One row per grid point in lexicographic grid order
    """
    tolerances = tolerances or ToleranceConfigModel()
    g_primes: list[float | None] = [None] if spec.bell == "matrix" else list(spec.g_prime_values)
    logger.info("Sweeping %d grid points", len(spec.g_values) * len(g_primes))

    rows = []
    for g, g_prime in itertools.product(spec.g_values, g_primes):
        config = build_config(spec, g, g_prime, tolerances)
        g_x, g_p = (config.gains.g_x, config.gains.g_p) if isinstance(config.gains, ScalarGain) else (1.0, 1.0)
        rows.append(SweepRow(g=g, g_prime=g_prime, g_x=g_x, g_p=g_p, metrics=evaluate_metrics(config, tolerances)))
    return rows


class SweepCommand(BaseCommand):
    """Evaluate the figures of merit over a parameter grid and write CSV or JSON."""

    def __init__(self) -> None:
        """Initialize the sweep command."""
        super().__init__(name="sweep", help_text="Evaluate V, T, F and N over a parameter grid")

    def add_arguments(self, parser: ArgumentParser) -> None:
        """Declare the grid, policy and output arguments."""
        parser.add_argument("--config", type=Path, default=None, help="JSON sweep specification")
        parser.add_argument("--g", type=float, nargs="+", default=None, help="Entangling constants")
        parser.add_argument("--g-prime", type=float, nargs="+", default=[1.0], help="Bell constants")
        parser.add_argument("--bell", choices=("qnd", "bs", "matrix-file"), default="qnd", help="Bell interaction")
        parser.add_argument("--matrix-file", type=Path, default=None, help="JSON 4x4 Bell interaction matrix")
        parser.add_argument("--gains", choices=("unity", "minv", "maxt", "scalar"), default="unity", help="Gain policy")
        parser.add_argument("--gx", type=float, default=1.0, help="Position gain of the scalar policy")
        parser.add_argument("--gp", type=float, default=1.0, help="Momentum gain of the scalar policy")
        parser.add_argument(
            "--local-ops", choices=("none", "improved", "optimal"), default="none", help="Local-operation policy"
        )
        parser.add_argument("--format", choices=("csv", "json"), default="csv", help="Output format")
        parser.add_argument("--out", type=Path, default=None, help="Output file (stdout when omitted)")

    def sweep_spec(self, args: Namespace) -> SweepSpec:
        """Build the sweep specification from a JSON file or from the flags.

        :param Namespace args: Parsed arguments
        :return SweepSpec: The validated specification
        """
        if args.config is not None:
            logger.info("Loading sweep specification from: %s", args.config)
            return SweepSpec.load(args.config)
        matrix = None
        if args.bell == "matrix-file":
            if args.matrix_file is None:
                msg = "--bell matrix-file requires --matrix-file."
                raise ValueError(msg)
            matrix = self.load_matrix(args.matrix_file)
        return SweepSpec(
            g_values=args.g or [],
            g_prime_values=args.g_prime,
            bell="matrix" if args.bell == "matrix-file" else args.bell,
            matrix=matrix,
            gains=args.gains,
            g_x=args.gx,
            g_p=args.gp,
            local_ops=args.local_ops,
            output_format=args.format,
            out=args.out,
        )

    def execute(self, args: Namespace) -> ExitCode:
        """Run the sweep and write its rows.

        :param Namespace args: Parsed arguments
        :return ExitCode: OK once the rows are written
        """
        spec = self.sweep_spec(args)
        rows = run_sweep(spec, self.config.tolerances)
        with open_output(spec.out) as stream:
            if spec.output_format == "json":
                write_json(rows, stream, self.config.output.json_indent)
            else:
                write_csv(rows, stream)
        return ExitCode.OK
