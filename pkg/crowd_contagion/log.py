__all__ = ['configure_logger', 'get_log_entries', 'get_all_log_entries', 'attach_run_log', 'detach_run_log']

import io
import logging
import os
import re
from typing import (Any, Optional, Union, Dict, List)

LOGGER_NAME = 'crowd_contagion'
_FORMAT = '[%(asctime)s] %(levelname)s - %(message)s'


def configure_logger(level: int = logging.INFO) -> logging.Logger:
    """
    The function `configure_logger`, simply adds a stringIO handler to the package log and captures it,
    thus making it easier to use in a notebook.
    The function `get_log_entries`, spits out entries of a given level.
    Calling it twice does not add a second handler.

    :return: logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)  # default = logging.WARNING
    if _get_stringio_handler(logger) is not None:
        return logger
    stringio = io.StringIO()
    handler = logging.StreamHandler(stringio)
    handler.setLevel(level)
    handler.set_name('stringio')
    handler.setFormatter(logging.Formatter(_FORMAT))
    logger.addHandler(handler)
    return logger


def _get_stringio_handler(logger: logging.Logger) -> Optional[logging.Handler]:
    for handler in logger.handlers:
        if handler.get_name() == 'stringio':
            return handler
    return None


def attach_run_log(directory: str) -> logging.Handler:
    """
    Adds a file handler writing ``run.log`` in the run directory.
    Remove it with ``detach_run_log`` once the run is over.
    """
    logger = logging.getLogger(LOGGER_NAME)
    if logger.level == logging.NOTSET or logger.level > logging.INFO:
        logger.setLevel(logging.INFO)
    handler = logging.FileHandler(os.path.join(directory, 'run.log'), mode='w')
    handler.setLevel(logging.INFO)
    handler.set_name('run_log')
    handler.setFormatter(logging.Formatter(_FORMAT))
    logger.addHandler(handler)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    logger = logging.getLogger(LOGGER_NAME)
    logger.removeHandler(handler)
    handler.close()


def get_log_entries(levelname: Union[str, int] = logging.INFO, query: Optional[str] = None) -> List[Dict[str, Any]]:
    """
    Get a list of all entries in log at a given level.
    levelname can be either an int (``logging.INFO`` etc. are numbers multiples of 10 in increasing severity)
    or a string of the level.
    Note that it is very crude: if INFO is requested, ERROR is not shown!

    :param levelname: int for the level number or str of the name
    :param query: only entries containing this text
    :return: List of dict
    """
    if isinstance(levelname, str):
        levelname = logging.getLevelName(levelname.upper())
    entries = [e for e in get_all_log_entries() if e['level'] == levelname]
    if query is not None:
        entries = [e for e in entries if str(query) in e['text']]
    return entries


def get_all_log_entries() -> List[Dict[str, Any]]:
    handler = _get_stringio_handler(logging.getLogger(LOGGER_NAME))
    if handler is None:
        return []
    stringio = handler.stream
    cleaned = []
    previous = None
    for entry in stringio.getvalue().split('\n'):
        rex = re.match(r'\[(.*)\] (\w+) - (.*)', entry)
        if rex:
            if previous:
                cleaned.append(previous)
            previous = dict(datetime=rex.group(1),
                            level=logging.getLevelName(rex.group(2)),
                            text=rex.group(3))
        elif previous is not None and entry:
            previous['text'] += '\n' + entry
    if previous:
        cleaned.append(previous)
    return cleaned
