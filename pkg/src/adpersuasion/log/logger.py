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

from datetime import datetime
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Optional


class LogLevel(Enum):
    """
    Enumerates logging levels.
    A message passes a filter when its value is less than or equal to the filter value.
    """
    OTHER = 0
    INFO = 1
    WARNING = 2
    ERROR = 3
    DEBUG = 4


class LogMessage:
    """
    Represents message to be logged.
    Contains time, severity, text and structured context fields.
    """
    def __init__(self, time: datetime, severity: LogLevel, text: str, logger: str = "",
                 fields: Optional[dict[str, Any]] = None):
        """
        Initialize LogMessage instance.
        :param time: message time.
        :param severity: severity level of the message.
        :param text: message content.
        :param logger: name of the logger that produced the message.
        :param fields: structured key/value context, e.g. epoch and loss.
        """
        self.time = time
        self.severity = severity
        self.text = text
        self.logger = logger
        self.fields = dict(fields) if fields else {}


class LogWriter(ABC):
    """
    Abstract class representing log writer interface.
    Start method will be called by PipelineLogger on its start,
    stop method will be called on its stop.
    """
    @abstractmethod
    def start(self):
        """
        This method called on logger start.
        """
        pass

    @abstractmethod
    def write(self, msg: LogMessage):
        """
        This method called when message need to be logged.
        :param msg: message to be logged.
        """

    @abstractmethod
    def stop(self):
        """
        This method will be called on logger stop.
        """
        pass


class PipelineLogger:
    """
    Logger shared by the pipeline modules.
    Messages are only written while the logger is active, library calls stay silent
    until a front end (the CLI, a notebook) starts it.
    """

    def __init__(self, name: str, logging_level: LogLevel, log_writers: list[LogWriter]):
        """
        Initialize PipelineLogger instance.
        :param name: Logger name.
        :param logging_level: messages with severity value above this level are filtered out.
        :param log_writers: List of log writers.
        """
        self.name = name
        """Logger name."""
        self.logging_level = logging_level
        """Messages with severity value above this level are filtered out."""
        self._log_writers = log_writers.copy()
        """List of log writers."""
        self._active = False

    def is_active(self) -> bool:
        return self._active

    def start(self):
        """
        Starts the logger and its writers.
        """
        if self._active:
            return
        for log_writer in self._log_writers:
            log_writer.start()
        self._active = True

    def stop(self):
        """
        Stops the logger and its writers.
        """
        if not self._active:
            return
        for log_writer in self._log_writers:
            log_writer.stop()
        self._active = False

    def replace_writers(self, logging_level: LogLevel, log_writers: list[LogWriter]):
        """
        Swaps level and writers. A running logger is restarted with the new writers.
        :param logging_level: new logging level.
        :param log_writers: new list of log writers.
        """
        was_active = self._active
        self.stop()
        self.logging_level = logging_level
        self._log_writers = log_writers.copy()
        if was_active:
            self.start()

    def __enter__(self) -> "PipelineLogger":
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()

    def log(self, message: str, severity: LogLevel, **fields: Any):
        """
        Writes message to log writers. This method captures time of the message.
        :param message: text to be logged.
        :param severity: severity of the message.
        :param fields: structured context attached to the message.
        """
        if not self._active:
            return
        if severity.value <= self.logging_level.value:
            msg = LogMessage(datetime.now(), severity, message, self.name, fields)
            for log_writer in self._log_writers:
                log_writer.write(msg)

    def other(self, message: str, **fields: Any):
        self.log(message, LogLevel.OTHER, **fields)

    def info(self, message: str, **fields: Any):
        self.log(message, LogLevel.INFO, **fields)

    def warning(self, message: str, **fields: Any):
        self.log(message, LogLevel.WARNING, **fields)

    def error(self, message: str, **fields: Any):
        self.log(message, LogLevel.ERROR, **fields)

    def debug(self, message: str, **fields: Any):
        self.log(message, LogLevel.DEBUG, **fields)
