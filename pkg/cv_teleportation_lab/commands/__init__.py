"""Subcommands of the lab command-line interface."""

from .base_command import BaseCommand
from .check_command import CheckCommand
from .optimize_command import OptimizeCommand
from .reproduce_command import ReproduceCommand
from .sweep_command import SweepCommand

__all__ = ["BaseCommand", "CheckCommand", "OptimizeCommand", "ReproduceCommand", "SweepCommand"]
