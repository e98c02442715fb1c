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
Persuasion technique detection with an asymmetrically weighted linear classifier,
and analytics of political ads scored by their share of persuasive sentences.
"""

__version__ = "0.1.0"
