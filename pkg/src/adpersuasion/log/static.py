#     Adpersuasion detects persuasive text and analyses political advertising.
#
#     Copyright (C) 2024  Adpersuasion contributors
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

from typing import Optional
from adpersuasion.log.log_writers.console_writer import ConsoleWriter
from adpersuasion.log.logger import LogLevel, LogWriter, PipelineLogger

LOGGER_NAME = "adpersuasion"
"""Name of the logger shared by the pipeline modules."""

_loggers: dict[str, PipelineLogger] = {}
"""Dictionary containing loggers"""


def get_logger(name: str = LOGGER_NAME, logging_level: LogLevel = LogLevel.INFO,
               log_writers: Optional[list[LogWriter]] = None) -> PipelineLogger:
    """
    Creating new or retrieving existing logger by its name.
    If log_writers parameter is not provided than default console writer will be attached to new logger.
    :param name: logger name.
    :param logging_level: logging level for a new logger.
    :param log_writers: list of log writers to use with a new logger.
    :return: instance of PipelineLogger
    """

    if name in _loggers:
        return _loggers[name]

    if log_writers is None or len(log_writers) == 0:
        log_writers = [ConsoleWriter()]

    new_logger = PipelineLogger(name, logging_level=logging_level, log_writers=log_writers)
    _loggers[name] = new_logger
    return new_logger


def configure(name: str = LOGGER_NAME, logging_level: LogLevel = LogLevel.INFO,
              log_writers: Optional[list[LogWriter]] = None) -> PipelineLogger:
    """
    Reconfigures the registered logger (creating it when missing).
    Modules keep the reference they took at import time, so configuration happens in place.
    :param name: logger name.
    :param logging_level: new logging level.
    :param log_writers: new writers, default console writer when empty.
    :return: instance of PipelineLogger
    """
    if log_writers is None or len(log_writers) == 0:
        log_writers = [ConsoleWriter()]
    logger = get_logger(name, logging_level, log_writers)
    logger.replace_writers(logging_level, log_writers)
    return logger
