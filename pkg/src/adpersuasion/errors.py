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

"""
Exception hierarchy. Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class AdPersuasionError(Exception):
    """Base class of all package errors."""
    exit_code: int = 1


class ConfigError(AdPersuasionError, ValueError):
    """Invalid configuration or argument value."""
    exit_code = 2


class InputFormatError(AdPersuasionError, ValueError):
    """
    Input file or record does not match its schema.
    """
    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        """
        :param message: description of the problem.
        :param path: offending file, when known.
        :param line_number: 1-based line (JSONL) or data row (CSV), when known.
        """
        location = ""
        if path is not None:
            location = f"{path}:"
            if line_number is not None:
                location += f"{line_number}:"
            location += " "
        elif line_number is not None:
            location = f"line {line_number}: "
        super().__init__(location + message)
        self.path = path
        self.line_number = line_number


class UnknownLabelError(InputFormatError):
    """Label name absent from the label schema."""

    def __init__(self, label: str, path: Optional[str] = None, line_number: Optional[int] = None):
        super().__init__(f"unknown label {label!r}", path, line_number)
        self.label = label


class DuplicateRecordError(InputFormatError):
    """Two records share a key that must be unique."""

    def __init__(self, key: tuple, path: Optional[str] = None, line_number: Optional[int] = None):
        super().__init__(f"duplicate record {key!r}", path, line_number)
        self.key = key


class ShapeMismatchError(AdPersuasionError, ValueError):
    """Matrices or vectors of incompatible shapes."""
    exit_code = 3


class MissingArtifactError(AdPersuasionError, FileNotFoundError):
    """An upstream artifact required by a command does not exist."""
    exit_code = 4


class ArtifactIntegrityError(AdPersuasionError):
    """A stored artifact fails its integrity check."""
    exit_code = 4


class StratificationError(AdPersuasionError, ValueError):
    """A class is too small to be split."""
    exit_code = 5


class DivergenceError(AdPersuasionError, ArithmeticError):
    """
    Training diverged. Retry with a smaller learning rate.
    """
    exit_code = 6

    def __init__(self, message: str, epoch: Optional[int] = None, loss: float = float("nan")):
        detail = f" (epoch {epoch}, loss {loss!r})" if epoch is not None else ""
        super().__init__(message + detail)
        self.epoch = epoch
        self.loss = loss


class UndefinedStatisticError(AdPersuasionError, ArithmeticError):
    """Statistic is undefined for the given input (degenerate or empty data)."""
    exit_code = 7
