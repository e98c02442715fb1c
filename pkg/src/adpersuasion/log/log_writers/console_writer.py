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

from typing import Any, Optional, TextIO
import sys
from adpersuasion.log.logger import LogLevel, LogMessage, LogWriter


class Colors:
    """Console color codes."""
    RESET = '\033[0m'
    BOLD = '\033[01m'

    class FColor:
        """Foreground colors."""
        RED = '\033[31m'
        GREEN = '\033[32m'
        BLUE = '\033[34m'
        CYAN = '\033[36m'
        YELLOW = '\033[93m'


def format_fields(fields: dict[str, Any]) -> str:
    """
    Renders structured fields as space separated key=value pairs, floats with 6 significant digits.
    """
    parts = []
    for key, value in fields.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        parts.append(f"{key}={value}")
    return " ".join(parts)


class ConsoleWriter(LogWriter):
    """
    Writes colored formatted messages to the console.
    Defaults to stderr, command summaries own stdout.
    """
    def __init__(self, logging_level: LogLevel = LogLevel.DEBUG, color_map: Optional[dict[LogLevel, str]] = None,
                 stream: Optional[TextIO] = None, use_color: Optional[bool] = None):
        """
        Initialize ConsoleWriter instance.
        :param logging_level: messages with severity value above this level are filtered out.
        :param color_map: dictionary mapping console color codes to logging levels.
        :param stream: output stream, sys.stderr when omitted.
        :param use_color: force colors on or off, by default colors are used on a tty.
        """
        self._logging_level = logging_level
        self._stream = stream
        self._use_color = use_color

        if color_map is None:
            self._color_map = {
                LogLevel.OTHER: Colors.FColor.YELLOW,
                LogLevel.INFO: Colors.FColor.GREEN,
                LogLevel.WARNING: Colors.FColor.BLUE,
                LogLevel.ERROR: Colors.BOLD + Colors.FColor.RED,
                LogLevel.DEBUG: Colors.FColor.CYAN}
        else:
            self._color_map = color_map

    def start(self):
        """Doing nothing"""
        pass

    def write(self, msg: LogMessage):
        """
        Formats and writes msg to the stream.
        :param msg: message to be logged.
        """
        if msg.severity.value > self._logging_level.value:
            return
        stream = self._stream if self._stream is not None else sys.stderr
        use_color = self._use_color if self._use_color is not None else stream.isatty()
        text = f"{msg.time.isoformat()} {msg.severity.name} {msg.logger}: {msg.text}"
        if msg.fields:
            text = f"{text} {format_fields(msg.fields)}"
        if use_color:
            text = f"{self._color_map[msg.severity]}{text}{Colors.RESET}"
        stream.write(text + "\n")

    def stop(self):
        """Flushes the stream"""
        stream = self._stream if self._stream is not None else sys.stderr
        stream.flush()
