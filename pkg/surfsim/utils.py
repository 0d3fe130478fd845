#!/usr/bin/env python

"""
Logging setup and the exception hierarchy shared by every module.
"""

import sys
from loguru import logger


# logger will show time, function name, and message.
LOGFORMAT = (
    "{time:hh:mm} | {level: <7} | "
    "<b><red>{function: <15}</red></b> | "
    "<level>{message}</level>"
)


# colorize the logger if stdout is IPython/Jupyter or a terminal (TTY)
try:
    import IPython
    TTY1 = bool(IPython.get_ipython())
except ImportError:
    TTY1 = False
TTY2 = sys.stdout.isatty()


def set_loglevel(loglevel="INFO"):
    """
    Set the loglevel for loguru logger. Using 'enable' here as
    described in the loguru docs for logging inside of a library.
    This sets the level at which logger calls will be displayed
    throughout the rest of the code.
    """
    config = {}
    config["handlers"] = [{
        "sink": sys.stdout,
        "format": LOGFORMAT,
        "level": loglevel,
        "colorize": TTY1 or TTY2,
    }]
    logger.configure(**config)
    logger.enable("surfsim")


class SurfsimError(Exception):
    """Base class of all errors raised by surfsim."""


class ModelError(SurfsimError, ValueError):
    """A system definition violates one of its model's invariants."""


class ParseError(ModelError):
    """A model file line could not be understood."""
    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class StaleEventError(SurfsimError):
    """An event was applied to a configuration it was not enumerated from."""


class OccupiedError(SurfsimError):
    """An attachment was queried at an occupied position."""


class InvalidTurnError(SurfsimError):
    """An amoebot turn whose movement precondition does not hold."""


class CompileError(SurfsimError):
    """A compiler precondition does not hold for the source system."""


class SearchError(SurfsimError):
    """A stored reachability graph is inconsistent with a query on it."""
