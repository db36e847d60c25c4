"""
ChiPredict - Predictive densities for a chi-squared observable.
Package setup: version, logging and command registration.
"""

import logging

__version__ = "1.0.0"


def setup_logging(config, verbosity: int = 0):
    """Configure application logging; each -v lowers the level one step."""
    log_level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    if verbosity >= 2:
        log_level = min(log_level, logging.DEBUG)
    elif verbosity == 1:
        log_level = min(log_level, logging.INFO)

    # Configure root logger; stdout is reserved for results
    logging.basicConfig(
        level=log_level,
        format=config.LOG_FORMAT,
        force=True,
    )

    # Add file handler if configured
    if config.LOG_FILE:
        file_handler = logging.FileHandler(config.LOG_FILE)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(config.LOG_FORMAT))
        logging.getLogger().addHandler(file_handler)


def register_commands(subparsers, parent):
    """Register the CLI subcommands."""
    from chipredict.commands import register_check, register_density, register_figure1, register_risk

    register_density(subparsers, parent)
    register_check(subparsers, parent)
    register_risk(subparsers, parent)
    register_figure1(subparsers, parent)
