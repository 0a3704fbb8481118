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

# Binary words and Knuth's balancing code. Any word of even length can be
# made balanced by inverting its first i bits for some i, since the weight
# moves by exactly one per step of i and ends at n - weight. The index i is
# written as a short balanced prefix, so the whole codeword is balanced too.

import logging
import math
from dataclasses import dataclass

import numpy as np

from balmodlib import mlc


class BitWord(object):
    """A fixed length binary word, most significant (leftmost) bit first."""
    __slots__ = ('bits',)

    def __init__(self, bits):
        if isinstance(bits, BitWord):
            bits = bits.bits
        elif isinstance(bits, str):
            if any(ch not in '01' for ch in bits):
                raise ValueError("not a binary string: %r" % bits)
            bits = [int(ch) for ch in bits]
        arr = np.array(bits, dtype=np.uint8).ravel()
        if arr.size == 0:
            raise ValueError("a word needs at least one bit")
        if arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, 'bits', arr)

    def __setattr__(self, name, value):
        raise AttributeError("BitWord is immutable")

    def __len__(self):
        return int(self.bits.size)

    def __getitem__(self, index):
        return self.bits[index]

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def __eq__(self, other):
        if isinstance(other, BitWord):
            return np.array_equal(self.bits, other.bits)
        if isinstance(other, str):
            return str(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __str__(self):
        return ''.join('1' if b else '0' for b in self.bits)

    def __repr__(self):
        return "%s(%r)" % (type(self).__name__, str(self))

    @property
    def weight(self):
        return int(self.bits.sum(dtype=np.int64))

    def array(self):
        """A writable copy of the bits."""
        return self.bits.copy()


class BalancedWord(BitWord):
    """A BitWord of even length with exactly n/2 ones."""
    __slots__ = ()

    def __init__(self, bits):
        BitWord.__init__(self, bits)
        n = len(self)
        if n % 2 != 0 or self.weight != n // 2:
            raise ValueError("%s is not balanced (length %d, weight %d)" % (self, n, self.weight))


def weight(w):
    """Hamming weight of a word."""
    return BitWord(w).weight


def invert_prefix(w, i):
    """Complement the first i bits of w."""
    w = BitWord(w)
    if i < 0 or i > len(w):
        raise IndexError("prefix length %r outside [0, %d]" % (i, len(w)))
    bits = w.array()
    bits[:i] ^= 1
    return BitWord(bits)


def prefix_weights(w):
    """weight(invert_prefix(w, i)) for every i in [0, n]."""
    bits = BitWord(w).bits.astype(np.int64)
    ones = np.concatenate(([0], np.cumsum(bits)))
    steps = np.arange(bits.size + 1)
    return int(bits.sum()) + steps - 2 * ones


def find_balancing_index(w):
    """Smallest i such that inverting the first i bits balances w."""
    w = BitWord(w)
    n = len(w)
    if n % 2 != 0:
        raise ValueError("cannot balance a word of odd length %d" % n)
    hits = np.flatnonzero(prefix_weights(w)[:n] == n // 2)
    return int(hits[0])


def knuth_prefix_length(k):
    """Smallest even p with C(p, p/2) >= k."""
    p = 2
    while math.comb(p, p // 2) < k:
        p += 2
    return p


@dataclass(frozen=True)
class KnuthCodeword:
    """A balanced payload plus a balanced prefix naming the inversion index."""
    payload: BalancedWord
    prefix: BalancedWord

    @classmethod
    def from_index(cls, payload, i, prefix_length=None):
        k = len(payload)
        p = prefix_length or knuth_prefix_length(k)
        if math.comb(p, p // 2) < k:
            raise ValueError("a %d bit prefix cannot index %d positions" % (p, k))
        prefix = mlc.unrank_balanced(i, 2, p // 2)
        return cls(BalancedWord(payload), BalancedWord(prefix.symbols))

    @property
    def index(self):
        return mlc.rank_balanced(self.prefix.bits, 2)

    def bits(self):
        """The codeword as written to the cells: prefix then payload."""
        return BalancedWord(np.concatenate((self.prefix.bits, self.payload.bits)))


def knuth_encode(u, prefix_length=None):
    """Balance u by prefix inversion and attach the balanced index prefix."""
    u = BitWord(u)
    k = len(u)
    if k % 2 != 0:
        raise ValueError("Knuth encoding needs an even message length, got %d" % k)
    i = find_balancing_index(u)
    logging.debug("knuth_encode: %s balanced at i=%d" % (u, i))
    return KnuthCodeword.from_index(invert_prefix(u, i), i, prefix_length)


def knuth_decode(c):
    """Read the index from the prefix and undo the inversion."""
    i = c.index
    k = len(c.payload)
    if i >= k:
        raise ValueError("prefix decodes to i=%d, payload has only %d bits" % (i, k))
    return invert_prefix(c.payload, i)


def knuth_split(bits, k):
    """Parse a stored codeword (prefix then payload) back into its parts."""
    word = BitWord(bits)
    p = len(word) - k
    if p <= 0:
        raise ValueError("codeword of length %d has no room for a %d bit payload" % (len(word), k))
    return KnuthCodeword(BalancedWord(word.bits[p:]), BalancedWord(word.bits[:p]))
