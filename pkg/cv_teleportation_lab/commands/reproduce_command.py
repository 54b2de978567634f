"""Reproduce the published values as a golden table."""

import json
import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path

from cv_teleportation_lab.commands.base_command import BaseCommand
from cv_teleportation_lab.golden import build_golden_table
from cv_teleportation_lab.models import ExitCode
from cv_teleportation_lab.reporting import golden_table, open_output, write_golden_csv

logger = logging.getLogger(__name__)


class ReproduceCommand(BaseCommand):
    """Recompute every published value and compare it with its quoted value."""

    def __init__(self) -> None:
        """Initialize the reproduce command."""
        super().__init__(name="reproduce", help_text="Recompute the published values as a golden table")

    def add_arguments(self, parser: ArgumentParser) -> None:
        """Declare the output arguments."""
        parser.add_argument("--format", choices=("table", "json", "csv"), default="table", help="Output format")
        parser.add_argument("--out", type=Path, default=None, help="Output file (stdout when omitted)")

    def execute(self, args: Namespace) -> ExitCode:
        """Build the golden table and report whether every row passes.

        :param Namespace args: Parsed arguments
        :return ExitCode: OK if every row passes, NUMERIC_FAILURE otherwise
        """
        rows = build_golden_table(self.config)
        with open_output(args.out) as stream:
            if args.format == "json":
                json.dump([row.model_dump(mode="json") for row in rows], stream, indent=self.config.output.json_indent)
                stream.write("\n")
            elif args.format == "csv":
                write_golden_csv(rows, stream)
            else:
                stream.write(golden_table(rows, self.config.output.table_digits) + "\n")

        failed = [row.quantity for row in rows if not row.passed]
        if failed:
            logger.error("Golden rows failed: %s", ", ".join(failed))
            return ExitCode.NUMERIC_FAILURE
        logger.info("All %d golden rows passed", len(rows))
        return ExitCode.OK
