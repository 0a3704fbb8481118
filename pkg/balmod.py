#!/usr/bin/python3

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

# This program encodes and decodes balanced words, picks read thresholds
# for a block of cell levels, and runs the drift channel and code
# experiments, writing their results as CSV or SVG.

import os
import re
import sys
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from balmodlib import core, em_soft, harness, ldpc, mlc, partial_balanced, thresholding
from balmodlib.channel import ERASED, bsc_llr, make_rng
from balmodlib.config import config


def _code(dd):
    return ldpc.build_gallager(dd.get('n'), dd.get('a'), dd.get('b'), dd.get('code_seed'))


def _pb_code(dd, k):
    return partial_balanced.LdpcSystematic(_code(dd), k + partial_balanced.index_bits(k))


def encode(dd, bits):
    scheme = dd.get('scheme')
    if scheme == "knuth":
        return str(core.knuth_encode(bits).bits())
    if scheme == "ldpc":
        x, i = ldpc.balanced_encode(_code(dd), bits)
        logging.info("Balanced at shift %d" % i)
        return str(x)
    if scheme == "pb":
        word = core.BitWord(bits)
        cw = partial_balanced.pb_encode(word, _pb_code(dd, len(word)), dd.get('layout_seed'))
        return str(cw.physical())
    raise ValueError("unknown scheme %r" % scheme)


def _knuth_payload_length(total):
    for k in range(2, total, 2):
        if k + core.knuth_prefix_length(k) == total:
            return k
    raise ValueError("no Knuth codeword has length %d" % total)


def decode(dd, text):
    scheme = dd.get('scheme')
    if scheme == "knuth":
        k = _knuth_payload_length(len(text))
        return str(core.knuth_decode(core.knuth_split(text, k)))
    if scheme == "ldpc":
        code = _code(dd)
        if os.path.isfile(text):
            llr = em_soft.soft_llr(read_levels(text))
            result = ldpc.balanced_decode_symmetric(code, llr, dd.get('ell'), dd.get('c'), dd.get('max_iter'))
            if not result.ok:
                raise ValueError("no candidate shift decoded")
            return str(result.u)
        if '?' in text:
            y = [ERASED if ch == '?' else int(ch) for ch in text]
            result = ldpc.bec_decode(code, y, dd.get('budget'))
            if result.status != 'unique':
                raise ValueError("erasure decoding gave %s" % result.status)
            return str(ldpc.extract(code, result.z))
        llr = bsc_llr([int(ch) for ch in text], dd.get('bsc_p'))
        result = ldpc.balanced_decode_symmetric(code, llr, dd.get('ell'), dd.get('c'), dd.get('max_iter'))
        if not result.ok:
            raise ValueError("no candidate shift decoded")
        return str(result.u)
    if scheme == "pb":
        k = dd.get('k')
        ecc = _pb_code(dd, k)
        cells = core.BitWord(text).bits
        layout = make_rng(dd.get('layout_seed')).permutation(ecc.length)
        u = partial_balanced.pb_decode(core.BitWord(cells[layout]), ecc, k)
        if u is None:
            raise ValueError("partial balanced decoding failed")
        return str(u)
    raise ValueError("unknown scheme %r" % scheme)


def read_levels(file):
    """Cell levels, separated by commas, blanks or newlines."""
    levels = list()
    with open(file, 'r') as data:
        for line in data:
            line = line.split('#')[0]
            levels += [float(v) for v in re.split(r'[,\s]+', line.strip()) if v != '']
    logging.info("Read %d cell levels from %s" % (len(levels), file))
    return levels


def threshold(dd, file):
    levels = thresholding.CellLevelVector(read_levels(file))
    lo = float(levels.levels.min())
    hi = float(levels.levels.max())
    report = thresholding.threshold_report(levels, None, dd.get('a_const'), lo, hi, dd.get('eps'))
    balanced = thresholding.balancing_threshold_exact(levels)[1]
    out = ["%s: %r" % (name, value) for name, value in report.items()]
    if not balanced:
        out.append("warning: no threshold balances this block exactly")
    return "\n".join(out)


def sim(dd, kind):
    spec = harness.ExperimentSpec(kind, dd.get('seed'), dd.get('trials'), dd.params(), dd.get('out'))
    table = harness.run(spec)
    harness.emit(table, spec.out, dd.get('format'))
    return "Wrote %s" % spec.out


def mlc_command(dd, action, arg):
    q = dd.get('q')
    if action == "rank":
        return str(mlc.rank_balanced(arg, q))
    if action == "unrank":
        return str(mlc.unrank_balanced(int(arg), q, dd.get('m')))
    if action == "balance":
        x, trace = mlc.knuth_q_balance(arg, q)
        return "%s %s" % (x, ",".join(str(loc) for loc in trace.locations))
    raise ValueError("unknown mlc action %r" % action)


def main(argv):
    dd = config(argv)
    # The logfile contains multiple runs, so add a useful delimiter
    logging.info("-----------------------\nStarting: %r " % argv)
    args = dd.args
    if len(args) < 1:
        dd.usage(argv, 2)
    command = args[0]
    try:
        if command == "encode" and len(args) == 2:
            print(encode(dd, args[1]))
        elif command == "decode" and len(args) == 2:
            print(decode(dd, args[1]))
        elif command == "threshold" and len(args) == 2:
            print(threshold(dd, args[1]))
        elif command == "sim" and len(args) == 2:
            print(sim(dd, args[1]))
        elif command == "mlc" and len(args) == 3:
            print(mlc_command(dd, args[1], args[2]))
        else:
            dd.usage(argv, 2)
    except (ValueError, IndexError, OSError) as inst:
        logging.error("%s failed: %s" % (command, inst))
        print("ERROR: %s" % inst)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main(sys.argv))
