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


def coerce(value, default):
    """Convert the text of a setting to the type of its default."""
    value = value.strip()
    if isinstance(default, bool):
        if value.lower() in ('1', 'true', 'yes', 'on'):
            return True
        if value.lower() in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError("not a boolean: %r" % value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    if isinstance(default, (list, tuple)):
        kind = type(default[0]) if default else float
        return [coerce(item, kind()) for item in value.split(',') if item.strip() != '']
    return value


class RcFile(object):
    """key=value settings, one per line. Blank lines and # comments are skipped."""
    def __init__(self, file=None):
        self.options = dict()
        if file is None:
            file = os.path.join(os.getenv('HOME', '.'), ".balmodrc")
            if not os.path.exists(file):
                logging.debug("No %s, using the defaults" % file)
                return
        self.read(file)

    def read(self, file):
        try:
            rcfile = open(file, 'r')
        except Exception as inst:
            logging.error("Couldn't open %s: %s" % (file, inst))
            raise
        with rcfile:
            lines = rcfile.readlines()
        for number, line in enumerate(lines):
            line = line.strip()
            # Ignore blank lines or comments
            if line == '' or line[0] == '#':
                continue
            index = line.find('=')
            if index < 0:
                logging.warning("%s:%d: no '=' in %r, ignored" % (file, number + 1, line))
                continue
            name = line[:index].strip()
            self.options[name] = line[index + 1:].strip()
        logging.info("Read %d settings from %s" % (len(self.options), file))

    def apply(self, options):
        """Merge into an options dict, converting to the types already there."""
        for name, value in self.options.items():
            if name in options:
                options[name] = coerce(value, options[name])
            else:
                logging.warning("Unknown setting %r, kept as text" % name)
                options[name] = value
        return options
