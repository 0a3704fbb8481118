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

# Partial-balanced modulation. Only the message part of a codeword is
# balanced: the message u is balanced by prefix inversion into u~, the
# index i is appended in plain binary, and any systematic code protects
# [u~, i]. The cells are shuffled so the message cells are spread over the
# whole block, and the read threshold balances the message cells alone.

import logging
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from balmodlib import ldpc
from balmodlib.channel import make_rng
from balmodlib.core import BalancedWord, BitWord, find_balancing_index, invert_prefix
from balmodlib.thresholding import CellLevelVector, balancing_threshold_exact, read_with_threshold


class SystematicCode(Protocol):
    """A code whose codewords start with the message bits verbatim."""
    length: int
    dimension: int

    def encode(self, msg): ...

    def decode(self, word): ...


class LdpcSystematic(object):
    """A shortened LDPC code laid out as [message, parity].

    The first `dimension` information positions of the code carry the
    message, the remaining ones are fixed to zero and never stored.
    """

    def __init__(self, code, dimension, crossover=0.02, max_iter=50):
        if dimension > code.k:
            raise ValueError("%r cannot carry %d message bits" % (code, dimension))
        self.code = code
        self.dimension = dimension
        self.length = dimension + code.rank
        self.crossover = crossover
        self.max_iter = max_iter
        self.message_cols = code.info_cols[:dimension]
        self.shortened_cols = code.info_cols[dimension:]

    def encode(self, msg):
        msg = BitWord(msg)
        if len(msg) != self.dimension:
            raise ValueError("message has %d bits, the code carries %d" % (len(msg), self.dimension))
        u = np.zeros(self.code.k, dtype=np.uint8)
        u[:self.dimension] = msg.bits
        z = ldpc.encode(self.code, u).bits
        return BitWord(np.concatenate((z[self.message_cols], z[self.code.pivot_cols])))

    def decode(self, word):
        """Hard decision BP decode; returns (message, ok)."""
        word = BitWord(word)
        if len(word) != self.length:
            raise ValueError("received %d bits, the code is %d long" % (len(word), self.length))
        mag = math.log((1.0 - self.crossover) / self.crossover)
        soft = mag * (1.0 - 2.0 * word.bits.astype(np.float64))
        llr = np.empty(self.code.n)
        llr[self.message_cols] = soft[:self.dimension]
        llr[self.code.pivot_cols] = soft[self.dimension:]
        llr[self.shortened_cols] = ldpc.LLR_CLIP
        z, ok = ldpc.bp_decode(self.code, llr, self.max_iter)
        ok = ok and not np.any(z.bits[self.shortened_cols])
        return BitWord(z.bits[self.message_cols]), ok


def index_bits(k):
    """Bits of the plain binary index field for a k bit message."""
    return max(1, math.ceil(math.log2(k)))


@dataclass(frozen=True)
class PartialCodeword:
    u_tilde: BalancedWord
    i_bits: BitWord
    parity: BitWord
    layout: np.ndarray

    def logical(self):
        return BitWord(np.concatenate((self.u_tilde.bits, self.i_bits.bits, self.parity.bits)))

    def physical(self):
        """The bits as placed in the cells: cell layout[j] holds logical bit j."""
        cells = np.empty(len(self.layout), dtype=np.uint8)
        cells[self.layout] = self.logical().bits
        return BitWord(cells)


def pb_encode(u, ecc, layout_seed):
    u = BitWord(u)
    k = len(u)
    if k % 2 != 0:
        raise ValueError("partial balancing needs an even message length, got %d" % k)
    i = find_balancing_index(u)
    u_tilde = BalancedWord(invert_prefix(u, i))
    width = index_bits(k)
    i_bits = BitWord([(i >> (width - 1 - b)) & 1 for b in range(width)])
    if k + width != ecc.dimension:
        logging.error("ECC dimension %d does not fit %d message and %d index bits"
                      % (ecc.dimension, k, width))
        raise ValueError("ECC dimension %d, need %d" % (ecc.dimension, k + width))
    codeword = ecc.encode(np.concatenate((u_tilde.bits, i_bits.bits)))
    parity = BitWord(codeword.bits[ecc.dimension:])
    layout = make_rng(layout_seed).permutation(ecc.length)
    return PartialCodeword(u_tilde, i_bits, parity, layout)


def pb_threshold(levels, layout, k):
    """Threshold balancing the k message cells only."""
    levels = CellLevelVector(levels).levels
    return balancing_threshold_exact(levels[np.asarray(layout)[:k]])[0]


def pb_read(levels, layout, k):
    """Read every cell at the message-balancing threshold, in logical order."""
    levels = CellLevelVector(levels)
    cells = read_with_threshold(levels, pb_threshold(levels, layout, k))
    return BitWord(cells.bits[np.asarray(layout)])


def pb_decode(y, ecc, k):
    """Correct, split off the index and undo the inversion; None on failure."""
    msg, ok = ecc.decode(y)
    if not ok:
        logging.debug("partial balanced decode: ECC failure")
        return None
    u_tilde = msg.bits[:k]
    i = 0
    for bit in msg.bits[k:k + index_bits(k)]:
        i = 2 * i + int(bit)
    if i >= k:
        logging.debug("partial balanced decode: index %d out of range" % i)
        return None
    u = invert_prefix(u_tilde, i)
    if 2 * int(u_tilde.sum()) != k or find_balancing_index(u) != i:
        logging.warning("partial balanced decode: decoded index %d does not balance the message" % i)
        return None
    return u


def rate_fixed_vs_partial(n, k_fixed, k_pb, i_bits):
    """Data rates of a fully balanced code and of a partial-balanced one.

    Either rate may be skipped by passing None for its dimension.
    """
    if n <= 0:
        raise ValueError("block length must be positive, got %r" % n)
    fixed = None if k_fixed is None else k_fixed / float(n)
    partial = None if k_pb is None else (k_pb - (i_bits or 0)) / float(n)
    return fixed, partial
