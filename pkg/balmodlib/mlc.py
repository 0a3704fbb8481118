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

# Balanced codes for multi-level cells. There are two ways of getting a
# word where every level shows up equally often: treat the message as the
# lexicographic rank of a balanced word (enumerative coding), or run a
# Knuth style prefix operation once per split of the level set and keep
# the split locations as a trace.

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class QaryWord(object):
    """A word over the alphabet {0, ..., q-1}."""
    def __init__(self, symbols, q):
        if isinstance(symbols, str):
            symbols = [int(s) for s in symbols]
        self.symbols = np.array(symbols, dtype=np.int64)
        self.symbols.flags.writeable = False
        self.q = int(q)
        if self.q < 2:
            raise ValueError("alphabet size must be at least 2, got %r" % q)
        if self.symbols.size and (self.symbols.min() < 0 or self.symbols.max() >= self.q):
            raise ValueError("symbol out of range for q=%d: %r" % (self.q, str(self)))

    def __len__(self):
        return int(self.symbols.size)

    def __eq__(self, other):
        if not isinstance(other, QaryWord):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash((self.q, self.symbols.tobytes()))

    def __str__(self):
        if self.q <= 10:
            return ''.join(str(int(s)) for s in self.symbols)
        return ','.join(str(int(s)) for s in self.symbols)

    def __repr__(self):
        return "%s(%r, q=%d)" % (type(self).__name__, str(self), self.q)

    def counts(self):
        return np.bincount(self.symbols, minlength=self.q)


class BalancedQaryWord(QaryWord):
    """A q-ary word where every symbol appears exactly m times."""
    def __init__(self, symbols, q):
        QaryWord.__init__(self, symbols, q)
        if len(self) % self.q != 0:
            raise ValueError("length %d is not a multiple of q=%d" % (len(self), self.q))
        counts = self.counts()
        if not np.all(counts == len(self) // self.q):
            raise ValueError("word %s is not balanced, symbol counts %r" % (self, counts.tolist()))

    @property
    def m(self):
        return len(self) // self.q


@dataclass
class BalancingTrace:
    """Split locations recorded by knuth_q_balance, in pre-order.

    ``groups`` holds the level group chosen at each split; it is always 0
    for the even splits and only carries information for odd ones.
    """
    locations: list = field(default_factory=list)
    groups: list = field(default_factory=list)

    def __len__(self):
        return len(self.locations)


@lru_cache(maxsize=None)
def _multinomial(n, parts):
    result = math.factorial(n)
    for part in parts:
        result //= math.factorial(part)
    return result


def multinomial(n, parts):
    """Exact multinomial coefficient n! / (p1! p2! ...)."""
    parts = tuple(int(p) for p in parts)
    if any(p < 0 for p in parts) or sum(parts) != n:
        raise ValueError("parts %r do not sum to %d" % (parts, n))
    return _multinomial(int(n), parts)


def balanced_count(q, m):
    """Number of balanced words of length q*m."""
    return multinomial(q * m, (m,) * q)


def unrank_steps(r, q, m):
    """Yield (symbol, remaining rank) for each position while unranking r."""
    total = balanced_count(q, m)
    if r < 0 or r >= total:
        raise ValueError("rank %d out of range [0, %d)" % (r, total))
    counts = [m] * q
    remaining = q * m
    while remaining > 0:
        for s in range(q):
            if counts[s] == 0:
                continue
            counts[s] -= 1
            block = _multinomial(remaining - 1, tuple(counts))
            if r < block:
                break
            counts[s] += 1
            r -= block
        remaining -= 1
        yield s, r


def unrank_balanced(r, q, m):
    """The r-th balanced word of length q*m in lexicographic order."""
    return BalancedQaryWord([s for s, _ in unrank_steps(r, q, m)], q)


def rank_balanced(x, q=None):
    """Lexicographic rank of a balanced word, inverse of unrank_balanced."""
    if not isinstance(x, BalancedQaryWord):
        x = BalancedQaryWord(x, q if q is not None else getattr(x, 'q', 2))
    q = x.q
    counts = [x.m] * q
    remaining = len(x)
    rank = 0
    for symbol in x.symbols:
        for s in range(symbol):
            if counts[s] == 0:
                continue
            counts[s] -= 1
            rank += _multinomial(remaining - 1, tuple(counts))
            counts[s] += 1
        counts[symbol] -= 1
        remaining -= 1
    return rank


def message_length(k, q):
    """Smallest m with multinomial(qm; m, ..., m) >= 2^k."""
    m = 1
    while balanced_count(q, m) < (1 << k):
        m += 1
    return m


def rank_message(bits, q):
    """Map a binary message onto the balanced word whose rank it spells."""
    bits = ''.join(str(int(b)) for b in bits)
    m = message_length(len(bits), q)
    r = int(bits, 2) if bits else 0
    logging.debug("rank codec: k=%d q=%d -> n=%d, rank %d" % (len(bits), q, q * m, r))
    return unrank_balanced(r, q, m)


def unrank_message(x, k):
    """Recover the k-bit message from its balanced word."""
    r = rank_balanced(x)
    if r >= (1 << k):
        raise ValueError("rank %d does not fit in %d bits" % (r, k))
    return format(r, '0%db' % k) if k else ''


def _smallest_prime(n):
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def _split(levels):
    """How a level set splits: (groups of local indices, shift of the operation).

    Even sets split into two halves and the operation swaps them. Odd sets
    use residue classes modulo their smallest prime p and the operation adds
    one, which moves every class to the next.
    """
    size = len(levels)
    if size % 2 == 0:
        half = size // 2
        return [list(range(half)), list(range(half, size))], half
    p = _smallest_prime(size)
    return [[t for t in range(size) if t % p == g] for g in range(p)], 1


def _find_location(local, size, classes, shift):
    """Smallest prefix length making one of the first classes exact."""
    length = len(local)
    ngroups = len(classes)
    group_of = np.empty(size, dtype=np.int64)
    for g, members in enumerate(classes):
        group_of[members] = g
    target = length * len(classes[0]) // size
    counts = np.bincount(group_of[local], minlength=ngroups)
    for i in range(length + 1):
        for g in range(max(ngroups - 1, 1)):
            if counts[g] == target:
                return i, g
        if i == length:
            break
        old = group_of[local[i]]
        new = group_of[(local[i] + shift) % size]
        counts[old] -= 1
        counts[new] += 1
    raise ValueError("no balancing location found for a split of %d levels" % size)


def _children(levels, classes, g):
    size = len(levels)
    if size % 2 == 0:
        return [[levels[t] for t in members] for members in classes]
    chosen = [levels[t] for t in classes[g]]
    rest = [levels[t] for t in range(size) if t not in classes[g]]
    return [chosen, rest]


def _balance(word, levels, trace):
    size = len(levels)
    if size < 2:
        return
    pos = np.flatnonzero(np.isin(word, levels))
    index = {s: t for t, s in enumerate(levels)}
    local = np.array([index[s] for s in word[pos]], dtype=np.int64)
    classes, shift = _split(levels)
    i, g = _find_location(local, size, classes, shift)
    local[:i] = (local[:i] + shift) % size
    word[pos] = np.array(levels, dtype=np.int64)[local]
    trace.locations.append(i)
    trace.groups.append(g)
    for child in _children(levels, classes, g):
        _balance(word, child, trace)


def _unbalance(word, levels, trace, cursor):
    size = len(levels)
    if size < 2:
        return cursor
    if cursor >= len(trace.locations):
        raise ValueError("malformed trace: ran out of split locations")
    i = trace.locations[cursor]
    g = trace.groups[cursor] if cursor < len(trace.groups) else 0
    pos = np.flatnonzero(np.isin(word, levels))
    classes, shift = _split(levels)
    if i < 0 or i > len(pos) or g < 0 or g >= max(len(classes) - 1, 1):
        raise ValueError("malformed trace entry (%r, %r) for a split of length %d" % (i, g, len(pos)))
    cursor += 1
    for child in _children(levels, classes, g):
        cursor = _unbalance(word, child, trace, cursor)
    index = {s: t for t, s in enumerate(levels)}
    local = np.array([index[s] for s in word[pos]], dtype=np.int64)
    local[:i] = (local[:i] - shift) % size
    word[pos] = np.array(levels, dtype=np.int64)[local]
    return cursor


def knuth_q_balance(u, q=None):
    """Balance a q-ary word with one prefix operation per level split."""
    if not isinstance(u, QaryWord):
        u = QaryWord(u, q)
    if len(u) % u.q != 0:
        raise ValueError("length %d is not a multiple of q=%d" % (len(u), u.q))
    word = u.symbols.copy()
    trace = BalancingTrace()
    _balance(word, list(range(u.q)), trace)
    logging.debug("knuth_q_balance: %s -> trace %r" % (u, trace.locations))
    return BalancedQaryWord(word, u.q), trace


def knuth_q_unbalance(x, trace, q=None):
    """Undo knuth_q_balance given its trace."""
    if not isinstance(x, QaryWord):
        x = QaryWord(x, q)
    if not isinstance(trace, BalancingTrace):
        trace = BalancingTrace(list(trace), [0] * len(trace))
    word = x.symbols.copy()
    used = _unbalance(word, list(range(x.q)), trace, 0)
    if used != len(trace.locations):
        raise ValueError("malformed trace: %d entries, %d used" % (len(trace.locations), used))
    return QaryWord(word, x.q)


def _log2_exact(value, name):
    a = int(value).bit_length() - 1
    if value < 1 or (1 << a) != value:
        raise ValueError("%s must be a power of two, got %r" % (name, value))
    return a


def trace_bit_cost(q, m):
    """Closed form (q-1)ab - q(a-2) - 2 for q = 2^a, m = 2^b."""
    a = _log2_exact(q, 'q')
    b = _log2_exact(m, 'm')
    return (q - 1) * a * b - q * (a - 2) - 2


def trace_bit_cost_exact(q, m):
    """Bits actually needed to store every trace entry of knuth_q_balance."""
    def cost(size, length):
        if size < 2:
            return 0
        if size % 2 == 0:
            bits = math.ceil(math.log2(length)) if length > 1 else 0
            return bits + 2 * cost(size // 2, length // 2)
        p = _smallest_prime(size)
        bits = math.ceil(math.log2(length + 1)) + (math.ceil(math.log2(p - 1)) if p > 2 else 0)
        part = size // p
        return bits + cost(part, length // p) + cost(size - part, length - length // p)
    return cost(q, q * m)


def redundancy_factor(q):
    """How much more redundancy the split construction costs than a full balanced set."""
    if q < 2:
        raise ValueError("q must be at least 2, got %r" % q)
    lq = math.log2(q)
    return 2.0 * (q - 1) * lq / (q - lq)


def full_set_redundancy(q, m):
    """log2 q^(qm) - log2 multinomial(qm; m, ..., m), in bits."""
    return q * m * math.log2(q) - math.log2(balanced_count(q, m))
