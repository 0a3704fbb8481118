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

import os
import sys
import itertools
sys.path.append(os.path.dirname(os.path.abspath(__file__)) + '/..')

import numpy as np
import pytest
from hypothesis import given, strategies as st

from balmodlib import dejagnu
from balmodlib.core import (BalancedWord, BitWord, KnuthCodeword, find_balancing_index,
                            invert_prefix, knuth_decode, knuth_encode, knuth_prefix_length,
                            knuth_split, prefix_weights, weight)

dj = dejagnu.dejagnu()

words = st.lists(st.integers(0, 1), min_size=1, max_size=64)
even_words = st.integers(1, 32).flatmap(lambda h: st.lists(st.integers(0, 1), min_size=2 * h, max_size=2 * h))


def test_weight():
    assert dj.equals(weight("0000"), 0, "weight(0000)")
    assert dj.equals(weight("0110"), 2, "weight(0110)")
    assert dj.equals(weight("1111111100000000"), 8, "weight(1111111100000000)")


def test_bitword():
    w = BitWord("1010")
    assert dj.equals(len(w), 4, "BitWord length")
    assert dj.matches(w, "1010", "BitWord text")
    assert dj.istrue(w == BitWord([1, 0, 1, 0]), "BitWord from a list")
    with pytest.raises(AttributeError):
        w.bits = None
    with pytest.raises(ValueError):
        w.bits[0] = 0
    with pytest.raises(ValueError):
        BitWord("10201")
    with pytest.raises(ValueError):
        BitWord("")
    with pytest.raises(ValueError):
        BalancedWord("1110")


def test_invert_prefix():
    assert dj.matches(invert_prefix("1010", 0), "1010", "invert_prefix(1010, 0)")
    assert dj.matches(invert_prefix("1010", 2), "0110", "invert_prefix(1010, 2)")
    assert dj.matches(invert_prefix("1111", 4), "0000", "invert_prefix(1111, 4)")
    with pytest.raises(IndexError):
        invert_prefix("1010", 5)
    with pytest.raises(IndexError):
        invert_prefix("1010", -1)


@given(words, st.data())
def test_invert_prefix_involution(bits, data):
    i = data.draw(st.integers(0, len(bits)))
    assert invert_prefix(invert_prefix(bits, i), i) == BitWord(bits)


def test_find_balancing_index():
    assert dj.equals(find_balancing_index("0110"), 0, "find_balancing_index(0110)")
    assert dj.equals(find_balancing_index("1111"), 2, "find_balancing_index(1111)")
    assert dj.equals(find_balancing_index("1000"), 3, "find_balancing_index(1000)")
    with pytest.raises(ValueError):
        find_balancing_index("101")


@given(even_words)
def test_balancing_index_is_minimal(bits):
    n = len(bits)
    i = find_balancing_index(bits)
    assert 0 <= i < n
    assert weight(invert_prefix(bits, i)) == n // 2
    assert all(weight(invert_prefix(bits, j)) != n // 2 for j in range(i))


@given(words)
def test_weight_walk(bits):
    steps = np.diff(prefix_weights(bits))
    assert np.all(np.abs(steps) == 1)
    assert prefix_weights(bits)[-1] == len(bits) - weight(bits)


def test_prefix_length():
    assert dj.equals(knuth_prefix_length(2), 2, "C(2,1) covers 2 indices")
    assert dj.equals(knuth_prefix_length(16), 6, "C(6,3) = 20 covers 16 indices")
    assert dj.equals(knuth_prefix_length(6), 4, "C(4,2) = 6 covers 6 indices")
    assert dj.equals(knuth_prefix_length(7), 6, "7 indices need a 6 bit prefix")


def test_knuth_encode():
    c = knuth_encode("0110")
    assert dj.matches(c.payload, "0110", "knuth_encode(0110) payload")
    assert dj.equals(c.index, 0, "knuth_encode(0110) index")
    c = knuth_encode("1111")
    assert dj.matches(c.payload, "0011", "knuth_encode(1111) payload")
    assert dj.equals(c.index, 2, "knuth_encode(1111) index")
    assert dj.equals(c.bits().weight * 2, len(c.bits()), "whole codeword balanced")
    with pytest.raises(ValueError):
        knuth_encode("101")


def test_knuth_decode():
    c = KnuthCodeword.from_index(BalancedWord("0110"), 0)
    assert dj.matches(knuth_decode(c), "0110", "knuth_decode(0110, 0)")
    c = KnuthCodeword.from_index(BalancedWord("0011"), 2)
    assert dj.matches(knuth_decode(c), "1111", "knuth_decode(0011, 2)")
    c = KnuthCodeword.from_index(BalancedWord("010011"), 3)
    assert dj.matches(knuth_decode(c), "101011", "knuth_decode(010011, 3)")
    # 4 bit payload, 4 bit prefix: ranks 4 and 5 are not indices
    c = KnuthCodeword.from_index(BalancedWord("0101"), 5)
    with pytest.raises(ValueError):
        knuth_decode(c)


def test_knuth_round_trip_exhaustive():
    for k in range(2, 17, 2):
        for bits in itertools.product((0, 1), repeat=k):
            c = knuth_encode(bits)
            if knuth_decode(c) != BitWord(bits):
                assert dj.fails("knuth round trip of %s" % (bits,))
            stored = c.bits()
            if knuth_decode(knuth_split(stored, k)) != BitWord(bits):
                assert dj.fails("knuth round trip through the cells of %s" % (bits,))
    assert dj.passes("knuth round trip for every message up to 16 bits")


if __name__ == '__main__':
    dj.verbose_level(2)
    for name, test in list(globals().items()):
        if name.startswith('test_') and callable(test):
            test()
    dj.totals()
