"""Run the invariant suite."""

import logging
import os
from argparse import ArgumentParser, Namespace

from cv_teleportation_lab.commands.base_command import BaseCommand
from cv_teleportation_lab.constants import DEFAULT_PROFILE_NAME, STRICT_PROFILE_NAME, TOLERANCE_ENV_VAR_NAME
from cv_teleportation_lab.invariants import run_invariants
from cv_teleportation_lab.models import ExitCode
from cv_teleportation_lab.reporting import invariant_table

logger = logging.getLogger(__name__)


class CheckCommand(BaseCommand):
    """Execute every registered invariant under a tolerance profile."""

    def __init__(self) -> None:
        """Initialize the check command."""
        super().__init__(name="check", help_text="Run the invariant suite")

    def add_arguments(self, parser: ArgumentParser) -> None:
        """Declare the profile and seed arguments."""
        parser.add_argument(
            "--profile",
            choices=(DEFAULT_PROFILE_NAME, STRICT_PROFILE_NAME),
            default=None,
            help=f"Tolerance profile (defaults to ${TOLERANCE_ENV_VAR_NAME}, then '{DEFAULT_PROFILE_NAME}')",
        )
        parser.add_argument("--seed", type=int, default=None, help="Seed of every random generator")

    def execute(self, args: Namespace) -> ExitCode:
        """Run the invariants and print one line per invariant with summary counts.

        :param Namespace args: Parsed arguments
        :return ExitCode: OK if every invariant holds, NUMERIC_FAILURE otherwise
        """
        profile = args.profile or os.getenv(TOLERANCE_ENV_VAR_NAME) or DEFAULT_PROFILE_NAME
        logger.info("Running invariants with the %s tolerance profile", profile)
        results = run_invariants(self.config.profile(profile), self.search_settings(args.seed))
        print(invariant_table(results))

        failed = [result.identifier for result in results if not result.passed]
        if failed:
            logger.error("%d invariants failed: %s", len(failed), ", ".join(failed))
            return ExitCode.NUMERIC_FAILURE
        return ExitCode.OK
