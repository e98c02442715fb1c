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

from pathlib import Path
from typing import Optional, TextIO
import json
from adpersuasion.log.logger import LogLevel, LogMessage, LogWriter


class JsonLinesWriter(LogWriter):
    """
    Appends one JSON object per message to a file.
    Keys: time, level, logger, message, followed by the structured fields.
    """
    def __init__(self, path: str | Path, logging_level: LogLevel = LogLevel.DEBUG):
        """
        Initialize JsonLinesWriter instance.
        :param path: log file, opened in append mode on start.
        :param logging_level: messages with severity value above this level are filtered out.
        """
        self._path = Path(path)
        self._logging_level = logging_level
        self._file: Optional[TextIO] = None

    def start(self):
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._file = self._path.open("a", encoding="utf-8")

    def write(self, msg: LogMessage):
        if self._file is None or msg.severity.value > self._logging_level.value:
            return
        record = {"time": msg.time.isoformat(), "level": msg.severity.name,
                  "logger": msg.logger, "message": msg.text}
        for key, value in msg.fields.items():
            record.setdefault(key, value)
        self._file.write(json.dumps(record, ensure_ascii=False, default=str) + "\n")

    def stop(self):
        if self._file is not None:
            self._file.close()
            self._file = None
