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
import sys
import getopt
import logging

from balmodlib.rcfile import RcFile, coerce


# Model and code settings, also the keys accepted in a config file
DEFAULTS = {
    'model': "mean_drift",
    'sigma': 0.2,
    'sigma_variance': 0.1,
    't_grid': [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
    'cells': 10000,
    'n': 280,
    'a': 4,
    'b': 7,
    'code_seed': 1,
    'ell': 2,
    'c': 4,
    'max_iter': 50,
    'eps': 1e-9,
    'a_const': 0.0,
    'p': 0.35,
    'p_grid': [0.04, 0.05, 0.06, 0.07, 0.08],
    'bsc_p': 0.02,
    'bec_p_grid': [0.2, 0.25, 0.3, 0.35],
    'lengths': [64, 128, 256],
    'bec_a': 4,
    'bec_b': 8,
    'budget': 64,
    'exhaustive': False,
    'layout_seed': 1,
    'k': 16,
    'q': 4,
    'm': 4,
}


class config(object):
    """Config data for this program."""
    def __init__(self, argv=list()):
        # Default values for user options
        self.options = dict(DEFAULTS)
        self.options['seed'] = 1
        self.options['trials'] = 100
        self.options['out'] = "balmod.csv"
        self.options['format'] = "csv"
        self.options['scheme'] = "knuth"
        self.options['config'] = ""
        self.options['verbose'] = False
        self.args = list()

        try:
            (opts, self.args) = getopt.gnu_getopt(argv[1:], "h,v,s:,t:,o:,f:,c:,D:",
                ["help", "verbose", "seed=", "trials=", "out=", "format=",
                 "config=", "scheme=", "define="])
        except getopt.GetoptError as e:
            logging.error('%r' % e)
            self.usage(argv, 2)

        # Files first, so the command line wins
        for (opt, val) in opts:
            if opt == "--verbose" or opt == '-v':
                self.verbose()
            elif opt == "--config" or opt == '-c':
                self.options['config'] = val
        RcFile().apply(self.options)
        if self.options['config'] != "":
            RcFile(self.options['config']).apply(self.options)

        for (opt, val) in opts:
            if opt == '--help' or opt == '-h':
                self.usage(argv)
            elif opt == "--seed" or opt == '-s':
                self.options['seed'] = int(val)
            elif opt == "--trials" or opt == '-t':
                self.options['trials'] = int(val)
            elif opt == "--out" or opt == '-o':
                self.options['out'] = val
            elif opt == "--format" or opt == '-f':
                if val == "csv" or val == "svg":
                    self.options['format'] = val
                else:
                    logging.error("Unknown format %r" % val)
                    self.usage(argv, 2)
            elif opt == "--scheme":
                self.options['scheme'] = val
            elif opt == "--define" or opt == '-D':
                index = val.find('=')
                if index < 0:
                    logging.error("-D needs key=value, got %r" % val)
                    self.usage(argv, 2)
                self.set(val[:index], val[index + 1:])

    def verbose(self):
        if self.options['verbose']:
            return
        self.options['verbose'] = True
        logging.basicConfig(filename='balmod.log', level=logging.DEBUG)
        root = logging.getLogger()
        ch = logging.StreamHandler(sys.stdout)
        ch.setLevel(logging.DEBUG)
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        ch.setFormatter(formatter)
        root.addHandler(ch)

    def get(self, opt):
        try:
            return self.options[opt]
        except Exception as inst:
            return False

    def set(self, opt, val):
        """Set an option; text is converted to the type of the current value."""
        if isinstance(val, str) and opt in self.options:
            val = coerce(val, self.options[opt])
        elif opt not in self.options:
            logging.warning("Unknown setting %r" % opt)
        self.options[opt] = val

    def params(self):
        """The model and code settings, for an experiment spec."""
        return dict((key, self.options[key]) for key in DEFAULTS)

    # Basic help message
    def usage(self, argv, status=0):
        print(os.path.basename(argv[0] if argv else "balmod.py") + ": options: command ...")
        print("""\t--help(-h)         Help
\t--verbose(-v)      Enable verbosity, also logs to balmod.log
\t--seed(-s)         Seed of the run (default 1)
\t--trials(-t)       Trials per point (default 100)
\t--out(-o)          Output file name (default balmod.csv)
\t--format(-f)       Output format, csv or svg
\t--config(-c)       key=value settings file, read after ~/.balmodrc
\t--scheme           Codec for encode/decode: knuth, ldpc or pb
\t--define(-D) k=v   Override one setting

Commands:
\tencode <bits>                 Encode a binary message
\tdecode <bits>|<levelfile>     Decode a stored word, ldpc also reads cell levels
\tthreshold <levelfile>         Thresholds of every strategy for a block
\tsim ber|wer-bec|wer-bsc|wer-soft|inversion-set|threshold-compare
\tmlc rank <word> | unrank <rank> | balance <word>
        """)
        sys.exit(status)
