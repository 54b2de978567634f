"""Command-line entry point of the teleportation lab."""

import sys

from cv_teleportation_lab.lab import TeleportationLab


def run() -> None:
    """Run the lab with the process arguments.

    :raise SystemExit: Always, with the exit code of the command
    """
    lab = TeleportationLab()
    sys.exit(lab.run())
