"""Teleportation lab: configuration, logging and subcommand dispatch."""

import json
import logging
import sys
from argparse import ArgumentParser
from collections.abc import Sequence
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import dotenv
from pydantic import ValidationError
from template_python.logging_setup import add_file_handler, setup_default_logging

from cv_teleportation_lab.commands import BaseCommand, CheckCommand, OptimizeCommand, ReproduceCommand, SweepCommand
from cv_teleportation_lab.constants import (
    CONFIG_FILE_PATH,
    ENV_FILE_PATH,
    LOGGING_BACKUP_COUNT,
    LOGGING_FILE_PATH,
    LOGGING_MAX_BYTES_MB,
    MB_TO_BYTES,
)
from cv_teleportation_lab.exceptions import LabError
from cv_teleportation_lab.models import ExitCode, LabConfig

dotenv.load_dotenv(ENV_FILE_PATH)
setup_default_logging()
add_file_handler(
    logging_filepath=LOGGING_FILE_PATH,
    max_bytes=LOGGING_MAX_BYTES_MB * MB_TO_BYTES,
    backup_count=LOGGING_BACKUP_COUNT,
)
logger = logging.getLogger(__name__)

PACKAGE_NAME = "cv-teleportation-lab"


class TeleportationLab:
    """Command-line lab for continuous-variable teleportation with QND entanglement.

    The lab loads and validates its JSON configuration, hands it to every subcommand and maps errors
    raised while a command runs onto exit codes.
    """

    def __init__(self, config_filepath: Path = CONFIG_FILE_PATH, config: LabConfig | None = None) -> None:
        """Initialize the lab.

        :param Path config_filepath: Path to the configuration file
        :param LabConfig | None config: Optional pre-loaded configuration
        """
        self.config_filepath = config_filepath
        self.config = config or self.load_config(self.config_filepath)

        logger.info("Setting up commands...")
        self.commands: list[BaseCommand] = [ReproduceCommand(), SweepCommand(), OptimizeCommand(), CheckCommand()]
        for command in self.commands:
            command.configure(self.config)
        self.parser = self._build_parser()
        logger.info("Teleportation lab initialization complete!")

    def validate_config(self, config_data: dict[str, Any]) -> LabConfig:
        """Validate configuration data against the LabConfig model.

        :param dict config_data: The configuration data to validate
        :return LabConfig: The validated configuration model
        :raise ValidationError: If the configuration data is invalid
        """
        return LabConfig.model_validate(config_data)

    def load_config(self, config_filepath: Path) -> LabConfig:
        """Load configuration from the specified json file.

        :param Path config_filepath: Path to the configuration file
        :return LabConfig: The validated configuration model
        :raise SystemExit: If configuration file is missing, invalid JSON, or fails validation
        """
        if not config_filepath.exists():
            logger.error("Configuration file not found: %s", config_filepath)
            sys.exit(ExitCode.USAGE_ERROR)

        try:
            logger.info("Loading configuration from: %s", config_filepath)
            config_data = json.loads(config_filepath.read_text(encoding="utf-8"))
            config = self.validate_config(config_data)
            config.save_to_file(config_filepath)
        except json.JSONDecodeError:
            logger.exception("JSON parsing error: %s", config_filepath)
            sys.exit(ExitCode.USAGE_ERROR)
        except OSError:
            logger.exception("JSON read error: %s", config_filepath)
            sys.exit(ExitCode.USAGE_ERROR)
        except ValidationError:
            logger.exception("Invalid configuration in: %s", config_filepath)
            sys.exit(ExitCode.USAGE_ERROR)
        else:
            return config

    def _build_parser(self) -> ArgumentParser:
        """Build the top-level parser with one subparser per command.

        :return ArgumentParser: The parser
        """
        try:
            package_version = version(PACKAGE_NAME)
        except PackageNotFoundError:
            package_version = "unknown"

        parser = ArgumentParser(prog=PACKAGE_NAME, description=self.__class__.__doc__.splitlines()[0])
        parser.add_argument("--version", action="version", version=f"%(prog)s {package_version}")
        subparsers = parser.add_subparsers(dest="command_name", required=True)
        for command in self.commands:
            command.register(subparsers)
        return parser

    def run(self, argv: Sequence[str] | None = None) -> ExitCode:
        """Parse the arguments and run the selected command.

        Usage errors exit with code 2 from the parser itself.

        :param Sequence[str] | None argv: Arguments, sys.argv when omitted
        :return ExitCode: The exit code of the command
        """
        args = self.parser.parse_args(argv)
        command: BaseCommand = args.command
        logger.info("Running command: %s", command.name)
        try:
            exit_code = command.execute(args)
        except (LabError, ValidationError, OSError, ValueError):
            logger.exception("Command %s failed!", command.name)
            exit_code = ExitCode.USAGE_ERROR
        logger.info("Command %s finished with exit code %d", command.name, exit_code)
        return exit_code
