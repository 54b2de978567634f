"""Base command for the lab command-line interface."""

import json
import logging
from abc import ABC, abstractmethod
from argparse import ArgumentParser, Namespace, _SubParsersAction
from pathlib import Path

import numpy as np
import numpy.typing as npt

from cv_teleportation_lab.models import ExitCode, LabConfig, SearchConfigModel

logger = logging.getLogger(__name__)


class BaseCommand(ABC):
    """Abstract base class for lab subcommands."""

    def __init__(self, name: str, help_text: str) -> None:
        """Initialize the base command.

        :param str name: Subcommand name
        :param str help_text: One-line description shown by --help
        """
        logger.info("Initializing command: %s", name)
        self.name = name
        self.help_text = help_text
        self._config: LabConfig | None = None

    @property
    def config(self) -> LabConfig:
        """Lab configuration the command runs with.

        :return LabConfig: The configuration
        :raise RuntimeError: If configure() has not been called
        """
        if self._config is None:
            error_msg = f"Command {self.name} not configured. Call configure() before executing it."
            logger.error(error_msg)
            raise RuntimeError(error_msg)
        return self._config

    def configure(self, config: LabConfig) -> None:
        """Configure the command with the shared lab configuration.

        :param LabConfig config: The lab configuration
        """
        self._config = config

    def register(self, subparsers: _SubParsersAction) -> ArgumentParser:
        """Add the subcommand and its arguments to the parser.

        :param _SubParsersAction subparsers: Subparsers of the top-level parser
        :return ArgumentParser: The subcommand parser
        """
        parser = subparsers.add_parser(self.name, help=self.help_text, description=self.help_text)
        self.add_arguments(parser)
        parser.set_defaults(command=self)
        return parser

    def search_settings(self, seed: int | None) -> SearchConfigModel:
        """Search settings with an optional seed override.

        :param int | None seed: Seed from the command line
        :return SearchConfigModel: The search settings
        """
        if seed is None:
            return self.config.search
        return self.config.search.model_copy(update={"seed": seed})

    @staticmethod
    def load_matrix(filepath: Path) -> npt.NDArray[np.float64]:
        """Read a matrix stored as a JSON array of rows.

        :param Path filepath: Path to the JSON document
        :return NDArray: The matrix
        """
        return np.asarray(json.loads(filepath.read_text(encoding="utf-8")), dtype=np.float64)

    @abstractmethod
    def add_arguments(self, parser: ArgumentParser) -> None:
        """Abstract method to declare the subcommand arguments."""
        pass

    @abstractmethod
    def execute(self, args: Namespace) -> ExitCode:
        """Abstract method to run the subcommand.

        :param Namespace args: Parsed arguments
        :return ExitCode: Process exit code
        """
        pass
