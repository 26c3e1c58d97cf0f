"""
Logging Configuration Module for the Pipe Climber Simulator

This module provides centralized logging configuration for all simulator components.
It creates persistent log files and a console stream with consistent formatting.

Key Features:
- Creates persistent log files in the logs/ directory (or $PIPECLIMB_LOG_DIR)
- Verbosity selected through $PIPECLIMB_LOG (error, info, debug)
- Avoids duplicate handlers when a component asks for its logger twice
- Console output goes to stderr so stdout stays machine readable
- Consistent formatting across all simulator components

Author: Pipe Climber Simulation Team
Date: 2026
"""

import logging
import os
import sys

LOG_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

DEFAULT_LEVEL = "info"


def resolve_level():
    """
    Read the requested verbosity from the PIPECLIMB_LOG environment variable.

    Returns:
        tuple: (logging level, True if the variable held an unknown value)
    """
    requested = os.environ.get("PIPECLIMB_LOG", DEFAULT_LEVEL).strip().lower()
    if requested in LOG_LEVELS:
        return LOG_LEVELS[requested], False
    return LOG_LEVELS[DEFAULT_LEVEL], True


def get_logger(name):
    """
    Create and configure a logger for the specified component.

    Args:
        name (str): Name of the logger (typically the module or component name)

    Returns:
        logging.Logger: Configured logger instance

    The logger gets a file handler and a stderr console handler the first time it
    is requested, together with a warning if PIPECLIMB_LOG holds an unknown value.
    Later calls only refresh the level, so tests and the CLI can change
    PIPECLIMB_LOG between calls.
    """
    level, unknown = resolve_level()

    logger = logging.getLogger(f"pipeclimb.{name}")
    if logger.level != level:
        logger.setLevel(level)
    logger.propagate = False

    # Avoid duplicate handlers if the component is re-created
    if not logger.handlers:
        log_dir = os.environ.get("PIPECLIMB_LOG_DIR", os.path.join(os.getcwd(), "logs"))
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f"{name}.log")

        formatter = logging.Formatter('%(asctime)s [%(levelname)s] %(name)s: %(message)s')

        # Create file handler for persistent logging
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        # Reported once, when the handlers are attached
        if unknown:
            logger.warning("Unknown PIPECLIMB_LOG value %r, using %r", os.environ.get("PIPECLIMB_LOG"), DEFAULT_LEVEL)

    return logger
