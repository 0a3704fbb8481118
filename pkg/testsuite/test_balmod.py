#!/usr/bin/python3
#
#   Copyright (C) 2026   Free Software Foundation, Inc.
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

# The command line and its settings

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)) + '/..')

import pytest

import balmod
from balmodlib import dejagnu, harness, ldpc
from balmodlib.channel import DriftModel, make_rng, sample_levels
from balmodlib.config import config
from balmodlib.rcfile import RcFile, coerce

dj = dejagnu.dejagnu()


@pytest.fixture(autouse=True)
def no_rcfile(tmp_path, monkeypatch):
    monkeypatch.setenv('HOME', str(tmp_path))


def run(capsys, *args):
    status = balmod.main(['balmod.py'] + list(args))
    return status, capsys.readouterr().out.strip()


def test_coerce():
    assert dj.equals(coerce(' 3 ', 0), 3, "int")
    assert dj.equals(coerce('0.25', 0.0), 0.25, "float")
    assert dj.equals(coerce('Yes', False), True, "bool")
    assert dj.equals(coerce('0.1, 0.2', [0.0]), [0.1, 0.2], "list of floats")
    assert dj.equals(coerce('64,128', [256]), [64, 128], "list of ints")
    assert dj.equals(coerce('variance_growth', 'mean_drift'), 'variance_growth', "text")
    with pytest.raises(ValueError):
        coerce('maybe', False)


def test_rcfile(tmp_path):
    rc = tmp_path / "settings"
    rc.write_text("# drift settings\ncells = 500\n\nmodel=variance_growth\nno equals sign\ncolour=blue\n")
    options = RcFile(str(rc)).apply({'cells': 10000, 'model': 'mean_drift'})
    assert dj.equals(options['cells'], 500, "converted to int")
    assert dj.equals(options['model'], 'variance_growth', "text setting")
    assert dj.equals(options['colour'], 'blue', "unknown setting kept")
    with pytest.raises(OSError):
        RcFile(str(tmp_path / "missing"))


def test_config(tmp_path):
    rc = tmp_path / "settings"
    rc.write_text("cells=500\nseed=3\n")
    dd = config(['balmod.py', '-s', '5', '-D', 't_grid=0.1,0.2', '--define', 'exhaustive=yes',
                 '--config', str(rc), 'sim', 'ber'])
    assert dj.equals(dd.get('seed'), 5, "command line beats the file")
    assert dj.equals(dd.get('cells'), 500, "file beats the defaults")
    assert dj.equals(dd.get('t_grid'), [0.1, 0.2], "list setting")
    assert dj.equals(dd.get('exhaustive'), True, "bool setting")
    assert dj.equals(dd.args, ['sim', 'ber'], "commands left over")
    assert dj.equals(dd.params()['cells'], 500, "experiment parameters")
    assert dj.istrue('seed' not in dd.params(), "run options are not parameters")
    with pytest.raises(SystemExit) as status:
        config(['balmod.py', '-f', 'pdf'])
    assert dj.equals(status.value.code, 2, "bad format")
    with pytest.raises(SystemExit) as status:
        config(['balmod.py', '-D', 'cells'])
    assert dj.equals(status.value.code, 2, "define without a value")


def test_usage(capsys):
    with pytest.raises(SystemExit) as status:
        balmod.main(['balmod.py'])
    assert dj.equals(status.value.code, 2, "no command")
    with pytest.raises(SystemExit) as status:
        balmod.main(['balmod.py', '--help'])
    assert dj.equals(status.value.code, 0, "help")
    assert dj.istrue("Commands:" in capsys.readouterr().out, "usage text")


def test_knuth_commands(capsys):
    status, word = run(capsys, 'encode', '1111')
    assert dj.equals(status, 0, "encode")
    assert dj.equals(len(word), 8, "four payload and four prefix bits")
    assert dj.equals(word.count('1'), 4, "balanced")
    status, text = run(capsys, 'decode', word)
    assert dj.equals(text, "1111", "decode")
    status, text = run(capsys, 'decode', '1111111')
    assert dj.equals(status, 1, "no codeword of that length")
    assert dj.istrue(text.startswith("ERROR:"), "error message")


def test_ldpc_commands(capsys):
    defines = ['--scheme', 'ldpc', '-D', 'n=56', '-D', 'a=3', '-D', 'b=7']
    code = balmod._code(config(['balmod.py'] + defines))
    message = "10" * (code.k // 2) + "1" * (code.k % 2)
    status, word = run(capsys, *(defines + ['encode', message]))
    assert dj.equals(status, 0, "encode")
    assert dj.equals(word.count('1'), 28, "balanced")
    status, text = run(capsys, *(defines + ['decode', word]))
    assert dj.equals(text, message, "decode hard reads")
    erased = '?' + word[1:6] + '?' + word[7:]
    status, text = run(capsys, *(defines + ['decode', erased]))
    assert dj.istrue(status == 1 or text == message, "erasures decode or fail loudly")


def test_ldpc_soft_decode(capsys, tmp_path):
    defines = ['--scheme', 'ldpc', '-D', 'n=56', '-D', 'a=3', '-D', 'b=7']
    code = balmod._code(config(['balmod.py'] + defines))
    message = "01" * (code.k // 2) + "0" * (code.k % 2)
    x, i = ldpc.balanced_encode(code, message)
    block = sample_levels(x, DriftModel('mean_drift', 0.1), 0.2, make_rng(18))
    levels = tmp_path / "levels.txt"
    levels.write_text("\n".join(repr(float(v)) for v in block.levels.levels) + "\n")
    status, text = run(capsys, *(defines + ['decode', str(levels)]))
    assert dj.equals(status, 0, "soft decode")
    assert dj.equals(text, message, "message from cell levels")


def test_pb_commands(capsys):
    defines = ['--scheme', 'pb', '-D', 'n=84', '-D', 'a=3', '-D', 'b=7', '-D', 'k=16']
    status, word = run(capsys, *(defines + ['encode', '1111111100000111']))
    assert dj.equals(status, 0, "encode")
    status, text = run(capsys, *(defines + ['decode', word]))
    assert dj.equals(text, "1111111100000111", "decode")


def test_threshold_command(capsys, tmp_path):
    levels = tmp_path / "levels.txt"
    levels.write_text("0.1, 0.9\n0.2 0.8   # two more\n")
    status, text = run(capsys, 'threshold', str(levels))
    assert dj.equals(status, 0, "threshold")
    assert dj.istrue("balancing: 0.5" in text.splitlines(), "balancing threshold")
    assert dj.istrue("fixed: 0.5" in text.splitlines(), "fixed threshold")
    status, text = run(capsys, 'threshold', str(tmp_path / "missing.txt"))
    assert dj.equals(status, 1, "missing file")


def test_mlc_commands(capsys):
    status, word = run(capsys, '-D', 'q=3', '-D', 'm=3', 'mlc', 'unrank', '98')
    assert dj.equals(len(word), 9, "length q m")
    status, text = run(capsys, '-D', 'q=3', 'mlc', 'rank', word)
    assert dj.equals(text, "98", "rank inverts unrank")
    status, text = run(capsys, '-D', 'q=3', 'mlc', 'balance', '000000111')
    assert dj.equals(status, 0, "balance")
    status, text = run(capsys, 'mlc', 'shuffle', '0123')
    assert dj.equals(status, 1, "unknown action")


def test_sim_command(capsys, tmp_path):
    out = str(tmp_path / "compare.csv")
    status, text = run(capsys, '-t', '2', '-o', out, '-D', 'cells=100', '-D', 't_grid=0.1',
                       'sim', 'threshold-compare')
    assert dj.equals(status, 0, "sim")
    table = harness.load(out)
    assert dj.equals(len(table.rows), len(harness.STRATEGIES) + 1, "rows written")
    assert dj.istrue("trials=2" in table.spec, "spec in the file")


if __name__ == '__main__':
    print("Run with: pytest %s" % os.path.basename(__file__))
