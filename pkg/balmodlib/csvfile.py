#
# Copyright (C) 2026   Free Software Foundation, Inc.
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA  02110-1301  USA
#

import os
import logging


def field(value):
    """Text of one CSV field. Floats use repr so they read back exactly."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class csvfile(object):
    """Result tables as plain CSV with a '#' comment block on top."""
    def __init__(self, file=""):
        self.file = None
        if file != "":
            self.open(file)

    def open(self, file):
        if os.path.isfile(file):
            self.file = open(file, 'w', newline='')
        else:
            self.file = open(file, 'x', newline='')
        logging.info("Opened output file: " + file)

    def comment(self, lines):
        for line in lines:
            self.file.write("# " + line + "\n")

    def header(self, fields):
        self.file.write(",".join(fields) + "\n")

    def entry(self, data):
        self.file.write(",".join(field(column) for column in data) + "\n")

    def close(self):
        if self.file is not None:
            self.file.close()
            self.file = None


def read(file):
    """Split a CSV file into its comment lines, its header and its rows."""
    comments = list()
    header = None
    rows = list()
    with open(file, 'r', newline='') as data:
        for line in data:
            line = line.rstrip("\n")
            if line == '':
                continue
            if line.startswith('#'):
                comments.append(line[2:] if line.startswith('# ') else line[1:])
            elif header is None:
                header = line.split(',')
            else:
                rows.append(line.split(','))
    if header is None:
        logging.error("%s has no header row" % file)
        raise ValueError("%s has no header row" % file)
    return comments, header, rows
