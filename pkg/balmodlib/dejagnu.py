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

# DejaGnu style result counting for the testsuite. Every check returns a
# boolean as well, so a test can assert on it and pytest reports the message.

import math


# Result kinds in the order totals() prints them
RESULTS = (
    ('passed', "PASS", "Total passed"),
    ('failed', "FAIL", "Total failed"),
)


class dejagnu(object):
    def __init__(self):
        for kind, tag, label in RESULTS:
            setattr(self, kind, 0)
        self.verbosity = 0

    def verbose_level(self, level=0):
        self.verbosity = level

    def verbose(self, msg="", level=0):
        if self.verbosity > level:
            print(msg)

    def _count(self, kind, tag, msg, level):
        setattr(self, kind, getattr(self, kind) + 1)
        self.verbose("%s: %s" % (tag, msg), level)

    def passes(self, msg=""):
        self._count('passed', "PASS", msg, 1)
        return True

    def fails(self, msg=""):
        self._count('failed', "FAIL", msg, 0)
        return False

    def _report(self, ok, msg, detail):
        if ok:
            return self.passes(msg)
        self.fails(msg)
        self.verbose("\t" + detail)
        return False

    def matches(self, instr, expected, msg=""):
        """Compare two values through their text."""
        return self._report(str(instr) == str(expected), msg,
                            "Got '%s', expected '%s'" % (instr, expected))

    def equals(self, got, expected, msg=""):
        return self._report(got == expected, msg, "Got %r, expected %r" % (got, expected))

    def istrue(self, cond, msg=""):
        return self._report(bool(cond), msg, "Condition is false")

    def close(self, got, expected, tol, msg=""):
        """|got - expected| <= tol."""
        ok = math.isclose(got, expected, rel_tol=0.0, abs_tol=tol)
        return self._report(ok, msg, "Got %r, expected %r within %r" % (got, expected, tol))

    def totals(self):
        print("\nTotals")
        print("-------")
        for kind, tag, label in RESULTS:
            count = getattr(self, kind)
            if count > 0:
                print("%s: %r " % (label, count))
